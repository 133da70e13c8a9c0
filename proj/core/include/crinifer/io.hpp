#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "crinifer/ray_tracer.hpp"

namespace crinifer {

struct IoError : Error {
  using Error::Error;
};

struct ChecksumMismatch : IoError {
  std::string file;
  explicit ChecksumMismatch(const std::string& f) : IoError("checksum mismatch for " + f), file(f) {}
};

std::string sha256_hex(std::string_view data);

std::string read_text_file(const std::filesystem::path& p);
void write_text_file(const std::filesystem::path& p, std::string_view data);

// {address, depth, points: [[t, re, im], ...], pullbacks: [...]}
std::string ray_tail_to_json(const RayTail& r);
RayTail ray_tail_from_json(const std::string& text);

}  // namespace crinifer
