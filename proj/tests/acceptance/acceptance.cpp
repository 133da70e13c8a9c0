#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crinifer/cli_io.hpp"
#include "crinifer/io.hpp"
#include "crinifer/parallel.hpp"

using namespace crinifer;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

ExternalAddress A(const char* s) { return ExternalAddress::parse(s); }

HairTracer cosh_tails(const Alphabet& a) {
  PullbackConfig c;
  c.min_label = 2;
  c.start_radius = 60;
  c.depth = 6;
  c.refine_tol = 1e-7;
  return HairTracer(a, c);
}

PullbackConfig model_config() {
  PullbackConfig c;
  c.start_radius = 60;
  c.depth = 20;
  return c;
}

Outcome singular_data_check() {
  auto f = EntireMap::cosh();
  auto s = singular_values(f);
  std::sort(s.begin(), s.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  bool ok = s.size() == 2 && std::abs(s[0] + 1.0) < 1e-12 && std::abs(s[1] - 1.0) < 1e-12;
  auto cps = critical_points_in_disc(f, 20.0);
  int expected = 2 * static_cast<int>(std::floor(20.0 / kPi)) + 1;
  ok = ok && static_cast<int>(cps.size()) == expected;
  for (cplx c : cps) {
    double k = c.imag() / kPi;
    ok = ok && std::abs(c.real()) < 1e-12 && std::abs(k - std::round(k)) < 1e-12 && local_degree(f, c) == 2;
    ok = ok && std::abs(derivative(f, c)) < 1e-12;
  }
  return {ok, fmt("S = {%.1f, %.1f}; %.0f critical points kπi in |z| < 20, all degree 2", s[0].real(), s[1].real(),
                  double(cps.size()))};
}

Outcome disjoint_model() {
  auto g = EntireMap::scaled_cosh(0.1);
  auto rep = disjoint_type_check(g, 100, 1e-9);
  // plain fixed-point iteration
  double x = 0.0;
  for (int i = 0; i < 200; ++i) x = 0.1 * std::cosh(x);
  bool ok = rep.pass && rep.fixed_point && std::abs(*rep.fixed_point - x) < 1e-9 &&
            std::abs(x - 0.10050) < 1e-5 && std::abs(rep.multiplier) < 0.02;
  int worst = 0;
  for (cplx v : singular_values(g)) {
    cplx z = v;
    int n = 0;
    while (std::abs(z - x) >= 1e-9 && n < 100) {
      z = eval(g, z);
      ++n;
    }
    ok = ok && std::abs(z - x) < 1e-9;
    worst = std::max(worst, n);
  }
  return {ok, fmt("fixed point %.8f, |multiplier| %.6f, singular orbits within 1e-9 after %.0f iterations", x,
                  std::abs(rep.multiplier), worst)};
}

Outcome ray_dynamics() {
  auto g = EntireMap::scaled_cosh(0.1);
  Alphabet a(g, DomainSpec::defaults(g));
  HairTracer tr(a, model_config());
  auto addrs = periodic_addresses({{'R', 0}, {'L', 0}, {'R', 1}, {'L', -1}}, 3);
  std::vector<RayTail> rays(addrs.size()), shifted(addrs.size());
  std::vector<DynamicsReport> reps(addrs.size());
  parallel_for(addrs.size(), [&](std::size_t i) {
    rays[i] = tr.trace(addrs[i]);
    shifted[i] = tr.trace(addrs[i].shift());
    reps[i] = verify_ray_dynamics(tr, rays[i], shifted[i], 1e-6);
  });
  int passed = 0;
  double worst = 0;
  for (const auto& r : reps) {
    passed += r.pass;
    worst = std::max(worst, r.worst_distance);
  }
  return {passed == static_cast<int>(addrs.size()) && addrs.size() >= 20,
          fmt("%.0f/%.0f addresses of period <= 3 at depth 20, worst residual %.2e", passed, double(addrs.size()), worst)};
}

Outcome split_structure() {
  auto f = EntireMap::cosh();
  Alphabet a(f, DomainSpec::defaults(f));
  HairTracer tails(a, [] {
    PullbackConfig c;
    c.min_label = 2;
    c.start_radius = 60;
    c.depth = 6;
    return c;
  }());
  RayConfiguration cfg(a, cosh_real_axis_configuration(tails));
  cfg.extend_to(1);
  bool ok = true;
  int segments = 0;
  for (const char* s : {"(R)", "L.(R)"})
    for (Sign sg : {Sign::Minus, Sign::Plus}) {
      const auto& r = cfg.ray(A(s), sg);
      cplx tip = r.tips()[1];
      ok = ok && std::abs(std::abs(tip.imag()) - kPi / 2) < 1e-12 && std::abs(tip.real()) < 1e-12;
      ok = ok && std::abs(eval(f, tip)) < 1e-12;
      ok = ok && r.split_events.size() == 1 && std::abs(r.split_events[0].point) < 1e-12 &&
           r.split_events[0].local_degree == 2;
      auto poly = r.level(1).polyline();
      bool vertical = true;
      for (int j = 0; j <= 100; ++j) {
        cplx p{0.0, std::copysign(kPi / 2 * j / 100.0, tip.imag())};
        vertical = vertical && distance_to_polyline(p, poly) < 1e-8;
      }
      segments += vertical;
    }
  // + and - copies of (R) separate at 0 toward opposite ends
  cplx rp = cfg.ray(A("(R)"), Sign::Plus).tips()[1], rm = cfg.ray(A("(R)"), Sign::Minus).tips()[1];
  ok = ok && std::abs(rp - rm) > 3.0;
  return {ok && segments == 4, fmt("%.0f of 4 level-1 curves contain [0, ±iπ/2]; split at 0 of degree 2; |f(±iπ/2)| < 1e-12",
                                   segments)};
}

Outcome counting() {
  auto f = EntireMap::cosh();
  Alphabet a(f, DomainSpec::defaults(f));
  HairTracer tails(a, [] {
    PullbackConfig c;
    c.min_label = 2;
    c.start_radius = 60;
    c.depth = 6;
    return c;
  }());
  RayConfiguration cfg(a, initial_configuration_from_tails(tails, {A("(R)"), A("L.(R)"), A("R.L.(R)"), A("L1.L.(R)")}));
  cfg.extend_to(5);
  bool ok = true;
  std::string detail;
  struct Case {
    cplx z;
    int expected;
    const char* name;
  };
  for (auto c : {Case{{0, 0}, 4, "0"}, Case{{5, 0}, 2, "5"}, Case{{0, kPi}, 4, "iπ"}}) {
    int n = static_cast<int>(signed_addresses_of(cfg, c.z, 5).size());
    int formula = count_formula(f, c.z, 5);
    ok = ok && n == c.expected && formula == c.expected;
    detail += std::string(detail.empty() ? "" : ", ") + c.name + ": " + std::to_string(n) + "/" + std::to_string(formula);
  }
  return {ok, "signed addresses/formula at " + detail};
}

Outcome order_preservation() {
  std::vector<ExternalAddress> addrs;
  for (int k = -4; k <= 5; ++k) {
    addrs.push_back(ExternalAddress::constant({'R', k}));
    addrs.push_back(ExternalAddress::constant({'L', k}));
  }
  ModelStore store(EntireMap::scaled_cosh(0.1), model_config(), addrs);
  auto f = EntireMap::cosh();
  Alphabet a(f, DomainSpec::defaults(f));
  HairTracer tails = cosh_tails(a);
  RayConfiguration cfg(a, initial_configuration_from_tails(tails, addrs));
  cfg.extend_to(1);
  auto rep = order_correspondence_check(store, cfg.all(), 50.0);
  bool ok = rep.pass && rep.unresolved == 0 && rep.skipped.empty() && rep.triples >= 1140;
  return {ok, fmt("%.0f addresses, %.0f triples agree, %.0f unresolved", double(addrs.size()), rep.triples,
                  rep.unresolved) +
                  (rep.pass ? "" : "; disagreement " + rep.disagreement)};
}

struct CauchyRun {
  std::unique_ptr<ModelStore> store;
  std::unique_ptr<HairTracer> tails;
  std::unique_ptr<InitialConfiguration> init;
  std::unique_ptr<RayConfiguration> rays;
  PhiApprox phi;
  double seconds = 0;
};

CauchyRun& cauchy_run() {
  static CauchyRun run = [] {
    auto t0 = std::chrono::steady_clock::now();
    CauchyRun r;
    std::vector<ExternalAddress> addrs;
    for (auto s : {"(R1)", "(L1)", "(R-1)", "(L-1)", "(R2)", "(L-2)", "(R1.L1)", "(R-1.L2)", "(L1.R2.R-1)", "(R1.R-1)"})
      addrs.push_back(A(s));
    auto f = EntireMap::cosh();
    Alphabet a(f, DomainSpec::defaults(f));
    r.store = std::make_unique<ModelStore>(EntireMap::scaled_cosh(0.1), model_config(), addrs);
    r.tails = std::make_unique<HairTracer>(cosh_tails(a));
    r.init = std::make_unique<InitialConfiguration>(initial_configuration_from_tails(*r.tails, r.store->addresses()));
    r.rays = std::make_unique<RayConfiguration>(a, *r.init);
    r.rays->extend_to(12);
    ThetaMap theta = build_theta(f, *r.store, *r.tails, *r.init);
    auto samples = cauchy_samples(*r.store, addrs, 50, 12, 4.6, 400);
    r.phi = cauchy_report(*r.rays, theta, *r.store, samples, 12, MetricSurrogate(2.0));
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }();
  return run;
}

Outcome cauchy_decay() {
  const auto& r = cauchy_run();
  const auto& g = r.phi.gaps;
  bool positive = std::all_of(g.begin(), g.end(), [](double x) { return x > 0; });
  bool ok = r.phi.complete && r.phi.samples.size() == 50 && g.size() == 12 && positive && r.phi.fitted_ratio > 1 &&
            g.back() / g.front() < 0.1;
  return {ok, fmt("50 samples, N = 12: gaps %.2e .. %.2e, fitted ratio %.3f, last/first %.2e", g.front(), g.back(),
                  r.phi.fitted_ratio, g.back() / g.front())};
}

Outcome functional_equation() {
  const auto& r = cauchy_run();
  bool ok = r.phi.complete && r.phi.functional_residual <= 1e-8;
  return {ok, fmt("max |f(φ_{n+1}(x)) − φ_n(g̃(x))| = %.2e over 50 samples, n < 12", r.phi.functional_residual)};
}

Outcome landing() {
  const auto& r = cauchy_run();
  auto f = EntireMap::cosh();
  int passed = 0, total = 0;
  double worst = 0;
  for (const auto* ray : r.rays->all()) {
    SignedAddress sh{ray->signed_address.address.shift(), ray->signed_address.sign};
    auto rep = landing_check(f, *ray, r.rays->ray(sh), 1e-6);
    ++total;
    if (rep.verdict == Verdict::Pass) {
      ++passed;
      worst = std::max(worst, rep.forward_defect);
    }
  }
  return {passed >= 10 && passed == total,
          fmt("%.0f/%.0f signed addresses land at depth 12, worst forward defect %.2e", passed, total, worst)};
}

Outcome expansion() {
  const auto& r = cauchy_run();
  auto f = EntireMap::cosh();
  MetricSurrogate m(2.0);
  long samples = 0, failures = 0;
  double lo = INFINITY;
  for (const auto* ray : r.rays->all())
    for (int l = 0; l <= ray->top_level(); ++l) {
      const auto& pts = ray->level(l).points;
      for (std::size_t i = 0; i < pts.size(); i += 97) {
        if (!(std::abs(pts[i].z) > 2 * m.core_radius())) continue;
        ++samples;
        try {
          double e = m.expansion(f, pts[i].z);
          lo = std::min(lo, e);
          failures += !(e > 1);
        } catch (const MetricDomainError&) {
          ++failures;
        }
      }
    }
  return {samples >= 500 && failures == 0,
          fmt("%.0f samples with |z| > 2K, minimum expansion %.4f, %.0f below 1", double(samples), lo, double(failures))};
}

Outcome order_axioms() {
  auto f = EntireMap::cosh();
  Alphabet a(f, DomainSpec::defaults(f));
  auto addrs = periodic_addresses({{'R', 0}, {'L', 0}, {'R', 1}}, 3);
  std::vector<SignedAddress> sa;
  for (const auto& x : addrs)
    for (Sign s : {Sign::Minus, Sign::Plus}) sa.push_back({x, s});
  const std::size_t n = sa.size();
  std::vector<std::vector<Ordering>> cmp(n, std::vector<Ordering>(n));
  long checks = 0;
  bool ok = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cmp[i][j] = signed_compare(a, sa[i], sa[j]);
  auto lt = [&](std::size_t i, std::size_t j) { return cmp[i][j] == Ordering::Less; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      ++checks;
      ok = ok && cmp[i][j] != Ordering::Undetermined;
      ok = ok && ((cmp[i][j] == Ordering::Equal) == (i == j));
      ok = ok && (lt(i, j) == (cmp[j][i] == Ordering::Greater));
      // restricted to one sign the order is lexicographic
      if (sa[i].sign == sa[j].sign) ok = ok && cmp[i][j] == lex_compare(a, sa[i].address, sa[j].address);
    }
  std::vector<std::vector<std::vector<char>>> cyc(n, std::vector<std::vector<char>>(n, std::vector<char>(n, 0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        if (lt(i, j) && lt(j, k)) ok = ok && lt(i, k);
        if (i != j && j != k && i != k) cyc[i][j][k] = cyclic_interval_member(a, sa[i], sa[j], sa[k]);
        ++checks;
      }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        ok = ok && cyc[i][j][k] == cyc[j][k][i];
        ok = ok && (cyc[i][j][k] != cyc[k][j][i]);
        for (std::size_t l = 0; l < n; ++l) {
          if (l == i || l == j || l == k) continue;
          if (cyc[i][j][k] && cyc[i][k][l]) ok = ok && cyc[i][j][l];
          ++checks;
        }
      }
  // cyclic order of symbols at infinity, δ included
  std::vector<std::optional<Symbol>> syms{std::nullopt, Symbol{'R', 0}, Symbol{'L', 0}, Symbol{'R', 1}};
  for (const auto& x : syms)
    for (const auto& y : syms)
      for (const auto& z : syms) {
        if (x == y || y == z || x == z) continue;
        bool c = cyclic_order_at_infinity(a, x, y, z);
        ok = ok && c == cyclic_order_at_infinity(a, y, z, x) && c != cyclic_order_at_infinity(a, z, y, x);
        ++checks;
      }
  return {ok, fmt("%.0f addresses x 2 signs, %.0f axiom checks", double(addrs.size()), double(checks))};
}

Outcome determinism(const fs::path& work) {
  RunConfig cfg;
  cfg.addresses = {"(R)", "L.(R)", "(R1)", "(L-1.R1)"};
  cfg.depth = 6;
  std::ostringstream log;
  std::vector<std::vector<std::pair<std::string, std::string>>> runs;
  for (const char* name : {"run-a", "run-b"}) {
    cfg.output = (work / name).string();
    fs::remove_all(cfg.output);
    cmd_trace(cfg, log);
    cmd_render(cfg, log);
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& e : fs::recursive_directory_iterator(cfg.output))
      if (e.is_regular_file()) files.push_back({fs::relative(e.path(), cfg.output).string(), read_text_file(e.path())});
    std::sort(files.begin(), files.end());
    runs.push_back(std::move(files));
  }
  bool ok = runs[0] == runs[1] && !runs[0].empty();
  return {ok, fmt("%.0f files byte-identical across two runs (trace + render)", double(runs[0].size()))};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "crinifer-acceptance";
  struct Criterion {
    int id;
    const char* name;
    double budget;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all{
      {1, "cosh singular data", 1, singular_data_check},
      {2, "disjoint-type model", 1, disjoint_model},
      {3, "ray dynamics", 30, ray_dynamics},
      {4, "cosh split structure", 10, split_structure},
      {5, "counting formula", 5, counting},
      {6, "order preservation", 30, order_preservation},
      {7, "Cauchy decay", 300, cauchy_decay},
      {8, "functional equation", 300, functional_equation},
      {9, "landing", 120, landing},
      {10, "expansion", 5, expansion},
      {11, "order axioms", 5, order_axioms},
      {12, "determinism", 60, [&] { return determinism(work); }},
  };
  int failed = 0;
  for (const auto& c : all) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // shared pipeline time is charged to criterion 7
    if (c.id == 7) s = cauchy_run().seconds;
    bool in_time = s < c.budget;
    bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s %2d %-22s %8.2fs  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, s, o.detail.c_str(),
                in_time ? "" : " (over time budget)");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
