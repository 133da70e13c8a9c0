#include <benchmark/benchmark.h>

#include "crinifer/semiconjugacy.hpp"

using namespace crinifer;

namespace {

PullbackConfig tails_config() {
  PullbackConfig c;
  c.min_label = 2;
  c.start_radius = 60;
  c.depth = 6;
  c.refine_tol = 1e-7;
  return c;
}

void BM_Eval(benchmark::State& st) {
  auto f = EntireMap::cosh();
  cplx z{1.3, 0.7};
  for (auto _ : st) {
    benchmark::DoNotOptimize(eval(f, z));
    z += cplx{1e-9, 0};
  }
}
BENCHMARK(BM_Eval);

void BM_TraceHair(benchmark::State& st) {
  auto g = EntireMap::scaled_cosh(0.1);
  Alphabet a(g, DomainSpec::defaults(g));
  PullbackConfig c;
  c.start_radius = 60;
  c.depth = static_cast<int>(st.range(0));
  HairTracer tr(a, c);
  auto addr = ExternalAddress::parse("(R1.L-1)");
  for (auto _ : st) benchmark::DoNotOptimize(tr.trace(addr));
}
BENCHMARK(BM_TraceHair)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_ExtendOneLevel(benchmark::State& st) {
  auto f = EntireMap::cosh();
  Alphabet a(f, DomainSpec::defaults(f));
  HairTracer tails(a, tails_config());
  auto s = ExternalAddress::parse("(R1)");
  auto init = initial_configuration_from_tails(tails, {s});
  RayConfiguration cfg(a, init);
  const int n = static_cast<int>(st.range(0));
  cfg.extend_to(n - 1);
  const auto& ray = cfg.ray(s, Sign::Plus);
  CanonicalRay base = ray;
  base.levels.resize(n);
  base.detail.resize(n);
  base.chain.resize(n - 1);
  for (auto _ : st) benchmark::DoNotOptimize(extend_one_level(a, base, ray, init));
}
BENCHMARK(BM_ExtendOneLevel)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_PhiStage(benchmark::State& st) {
  auto f = EntireMap::cosh();
  Alphabet a(f, DomainSpec::defaults(f));
  std::vector<ExternalAddress> addrs{ExternalAddress::parse("(R1)"), ExternalAddress::parse("(L-1)")};
  PullbackConfig mc;
  mc.start_radius = 60;
  ModelStore store(EntireMap::scaled_cosh(0.1), mc, addrs);
  HairTracer tails(a, tails_config());
  auto init = initial_configuration_from_tails(tails, store.addresses());
  RayConfiguration rays(a, init);
  const int n = static_cast<int>(st.range(0));
  rays.extend_to(n);
  ThetaMap theta = build_theta(f, store, tails, init);
  auto xs = cauchy_samples(store, addrs, 8, n, 4.6, 400);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(phi_stage(rays, theta, store, xs[i++ % xs.size()], n));
}
BENCHMARK(BM_PhiStage)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_MetricDistance(benchmark::State& st) {
  MetricSurrogate m(2.0);
  cplx a{5, 1}, b{-3, 7};
  for (auto _ : st) benchmark::DoNotOptimize(m.distance(a, b));
}
BENCHMARK(BM_MetricDistance);

}  // namespace

BENCHMARK_MAIN();
