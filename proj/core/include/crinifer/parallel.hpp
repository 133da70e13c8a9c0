#pragma once

#include <cstddef>
#include <functional>

namespace crinifer {

// Worker count: hardware concurrency capped by CRINIFER_THREADS when set.
unsigned worker_count();

// Runs body(i) for i in [0, n); results must be written to per-index slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned workers = 0);

}  // namespace crinifer
