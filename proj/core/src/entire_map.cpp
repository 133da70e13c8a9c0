#include "crinifer/entire_map.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace crinifer {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

cplx checked(cplx w) {
  if (!finite(w) || std::abs(w) > kEscapeThreshold) throw EscapedMagnitude(kEscapeThreshold);
  return w;
}

// n-th derivative of the unscaled core function.
cplx core_derivative(Family fam, cplx z, int n) {
  switch (fam) {
    case Family::Cosh:
    case Family::ScaledCosh:
      return (n % 2 == 0) ? std::cosh(z) : std::sinh(z);
    case Family::ScaledExp:
      return std::exp(z);
    case Family::ScaledSin:
      switch (n % 4) {
        case 0: return std::sin(z);
        case 1: return std::cos(z);
        case 2: return -std::sin(z);
        default: return -std::cos(z);
      }
  }
  return {};
}

void push_unique(std::vector<cplx>& v, cplx z, double tol = 1e-12) {
  for (const auto& w : v)
    if (std::abs(w - z) <= tol * std::max(1.0, std::abs(z))) return;
  v.push_back(z);
}

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error("bad number '" + s + "'");
  }
  if (used != s.size()) throw Error("bad number '" + s + "'");
  return v;
}

}  // namespace

std::optional<cplx> try_eval(const EntireMap& f, cplx z) {
  if (!finite(z)) return std::nullopt;
  // exp/cosh overflow once the real part passes ~710
  double big = f.cosh_type() && f.family != Family::ScaledSin ? std::abs(z.real()) : z.real();
  if (f.family == Family::ScaledSin) big = std::abs(z.imag());
  if (big > 700.0) return std::nullopt;
  cplx w = f.lambda() * core_derivative(f.family, z, 0);
  if (!finite(w) || std::abs(w) > kEscapeThreshold) return std::nullopt;
  return w;
}

cplx eval(const EntireMap& f, cplx z) {
  auto w = try_eval(f, z);
  if (!w) throw EscapedMagnitude(kEscapeThreshold);
  return *w;
}

cplx nth_derivative(const EntireMap& f, cplx z, int n) {
  return checked(f.lambda() * core_derivative(f.family, z, n));
}

cplx derivative(const EntireMap& f, cplx z) { return nth_derivative(f, z, 1); }

std::vector<cplx> critical_points_in_disc(const EntireMap& f, double radius) {
  if (!(radius > 0.0)) throw Error("radius must be positive");
  std::vector<cplx> out;
  switch (f.family) {
    case Family::Cosh:
    case Family::ScaledCosh: {
      int kmax = static_cast<int>(std::floor(radius / kPi + 1e-12));
      out.push_back({0.0, 0.0});
      for (int k = 1; k <= kmax; ++k) {
        out.push_back({0.0, k * kPi});
        out.push_back({0.0, -k * kPi});
      }
      break;
    }
    case Family::ScaledSin: {
      int kmax = static_cast<int>(std::ceil(radius / kPi)) + 1;
      for (int k = -kmax; k <= kmax; ++k) {
        double x = kPi / 2 + k * kPi;
        if (std::abs(x) <= radius) out.push_back({x, 0.0});
      }
      std::sort(out.begin(), out.end(),
                [](cplx a, cplx b) { return std::abs(a) < std::abs(b) || (std::abs(a) == std::abs(b) && a.real() < b.real()); });
      break;
    }
    case Family::ScaledExp:
      break;
  }
  return out;
}

std::vector<cplx> singular_values(const EntireMap& f) {
  std::vector<cplx> sv;
  if (f.family == Family::ScaledExp) {
    sv.push_back({0.0, 0.0});
  } else {
    cplx l = f.lambda();
    sv.push_back(-l);
    sv.push_back(l);
  }
  return sv;
}

SingularData singular_data(const EntireMap& f, int depth) {
  SingularData d;
  d.depth = depth;
  if (f.family == Family::ScaledExp)
    d.asymptotic_values.push_back({0.0, 0.0});
  else
    d.critical_values = singular_values(f);
  for (cplx v : singular_values(f)) {
    cplx z = v;
    push_unique(d.postsingular_sample, z);
    for (int j = 1; j <= depth; ++j) {
      auto w = try_eval(f, z);
      if (!w) break;
      z = *w;
      push_unique(d.postsingular_sample, z);
    }
  }
  return d;
}

int local_degree(const EntireMap& f, cplx z, double tol) {
  double scale = std::max(1.0, std::abs(f.lambda()));
  for (int n = 1; n <= kDegreeCap; ++n) {
    if (std::abs(nth_derivative(f, z, n)) > tol * scale) return n;
  }
  throw DegeneratePoint("degenerate point: derivatives vanish up to order " + std::to_string(kDegreeCap));
}

OrbitRecord orbit(const EntireMap& f, cplx seed, int max_iter, double escape_radius) {
  OrbitRecord r;
  r.seed = seed;
  r.points.push_back(seed);
  cplx z = seed;
  for (int k = 0; k < max_iter; ++k) {
    auto w = try_eval(f, z);
    if (!w || std::abs(*w) > escape_radius) {
      r.escaped = true;
      r.escape_index = k + 1;
      break;
    }
    z = *w;
    r.points.push_back(z);
  }
  return r;
}

namespace {

enum class Fate { Escapes, Attracted, Undecided };

Fate fate_of(const EntireMap& f, cplx v) {
  cplx z = v;
  for (int k = 0; k < 400; ++k) {
    auto w = try_eval(f, z);
    if (!w || std::abs(*w) > 1e12) return Fate::Escapes;
    if (std::abs(*w - z) < 1e-13 * std::max(1.0, std::abs(z))) {
      return std::abs(derivative(f, *w)) < 1.0 ? Fate::Attracted : Fate::Undecided;
    }
    z = *w;
  }
  return Fate::Undecided;
}

}  // namespace

SeparationReport separation_check(const EntireMap& f, double epsilon, int depth) {
  if (depth < 1) throw Error("separation_check: depth must be >= 1");
  SeparationReport rep;
  for (cplx v : singular_values(f)) {
    if (fate_of(f, v) == Fate::Attracted) continue;  // Fatou orbit, not in P_J
    cplx z = v;
    push_unique(rep.sample, z);
    for (int j = 1; j <= depth; ++j) {
      auto w = try_eval(f, z);
      if (!w) break;
      z = *w;
      push_unique(rep.sample, z);
    }
  }
  double best = INFINITY;
  for (std::size_t i = 0; i < rep.sample.size(); ++i) {
    for (std::size_t j = i + 1; j < rep.sample.size(); ++j) {
      cplx a = rep.sample[i], b = rep.sample[j];
      double m = std::max(std::abs(a), std::abs(b));
      double ratio = std::abs(a - b) / m;
      if (ratio < best) {
        best = ratio;
        rep.pair = std::make_pair(a, b);
      }
    }
  }
  if (rep.pair) {
    rep.ratio = best;
    rep.pass = best >= epsilon;
  }
  return rep;
}

DisjointTypeReport disjoint_type_check(const EntireMap& f, int max_iter, double tol, double domain_radius) {
  DisjointTypeReport rep;
  std::optional<cplx> common;
  for (cplx v : singular_values(f)) {
    cplx z = v;
    bool converged = false;
    int it = 0;
    for (; it < max_iter; ++it) {
      auto w = try_eval(f, z);
      if (!w) {
        rep.reason = "orbit escapes";
        return rep;
      }
      double step = std::abs(*w - z);
      z = *w;
      if (step < tol) {
        converged = true;
        ++it;
        break;
      }
    }
    rep.iterations = std::max(rep.iterations, it);
    if (!converged) {
      rep.reason = std::abs(z) > 1e6 ? "orbit escapes" : "no convergence within max_iter";
      return rep;
    }
    if (common && std::abs(*common - z) > 10 * tol) {
      rep.reason = "singular orbits converge to different limits";
      return rep;
    }
    if (!common) common = z;
  }
  rep.fixed_point = common;
  rep.multiplier = derivative(f, *common);
  if (std::abs(rep.multiplier) >= 1.0) {
    rep.reason = "limit is not attracting";
    return rep;
  }
  if (domain_radius > 0.0 && std::abs(*common) >= domain_radius) {
    rep.reason = "fixed point outside D";
    return rep;
  }
  rep.pass = true;
  return rep;
}

std::string format_scale(cplx lambda) {
  if (lambda.imag() == 0.0 && !std::signbit(lambda.imag())) return shortest(lambda.real());
  std::string im = shortest(lambda.imag());
  if (im[0] != '-') im = "+" + im;
  return shortest(lambda.real()) + "re" + im + "im";
}

cplx parse_scale(const std::string& text) {
  auto re = text.find("re");
  if (re == std::string::npos) return {parse_double(text), 0.0};
  if (text.size() < re + 4 || text.substr(text.size() - 2) != "im")
    throw Error("bad complex literal '" + text + "'");
  double r = parse_double(text.substr(0, re));
  std::string im = text.substr(re + 2, text.size() - re - 4);
  if (!im.empty() && im[0] == '+') im.erase(0, 1);
  return {r, parse_double(im)};
}

EntireMap parse_map_spec(const std::string& spec) {
  auto colon = spec.find(':');
  std::string fam = spec.substr(0, colon);
  EntireMap f;
  if (fam == "cosh") f.family = Family::Cosh;
  else if (fam == "scaled-cosh") f.family = Family::ScaledCosh;
  else if (fam == "scaled-exp") f.family = Family::ScaledExp;
  else if (fam == "scaled-sin") f.family = Family::ScaledSin;
  else throw Error("unknown map family '" + fam + "'");
  if (colon == std::string::npos) {
    if (f.family != Family::Cosh) throw Error("map '" + fam + "' needs lambda=...");
    return f;
  }
  std::string params = spec.substr(colon + 1);
  std::size_t pos = 0;
  bool have_lambda = false;
  while (pos <= params.size()) {
    auto comma = params.find(',', pos);
    std::string kv = params.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error("bad map parameter '" + kv + "'");
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "lambda") {
      f.scale = parse_scale(val);
      have_lambda = true;
    } else if (key == "precision") {
      f.precision = static_cast<int>(parse_double(val));
    } else {
      throw Error("unknown map parameter '" + key + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (f.family == Family::Cosh && have_lambda && f.scale != cplx{1.0, 0.0})
    throw Error("plain cosh takes no lambda");
  if (f.family != Family::Cosh && !have_lambda) throw Error("missing lambda");
  return f;
}

std::string format_map_spec(const EntireMap& f) {
  std::string out;
  switch (f.family) {
    case Family::Cosh: out = "cosh"; break;
    case Family::ScaledCosh: out = "scaled-cosh"; break;
    case Family::ScaledExp: out = "scaled-exp"; break;
    case Family::ScaledSin: out = "scaled-sin"; break;
  }
  if (f.family != Family::Cosh) out += ":lambda=" + format_scale(f.scale);
  if (f.precision != 16) out += (f.family == Family::Cosh ? ":" : ",") + std::string("precision=") + std::to_string(f.precision);
  return out;
}

}  // namespace crinifer
