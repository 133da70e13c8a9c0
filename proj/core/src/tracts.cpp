#include "crinifer/tracts.hpp"

#include <algorithm>
#include <cmath>

namespace crinifer {

namespace {

const cplx I{0.0, 1.0};

double wrap_pi(double a) {
  a = std::remainder(a, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  return a;
}

double wrap_2pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  return a;
}

// u with (u + 1/u)/2 = a and |u| >= 1
cplx big_root(cplx a) {
  if (std::abs(a) > 1e100) return 2.0 * a;
  cplx s = std::sqrt(a * a - 1.0);
  cplx u1 = a + s, u2 = a - s;
  return std::abs(u1) >= std::abs(u2) ? u1 : u2;
}

}  // namespace

DomainSpec DomainSpec::defaults(const EntireMap& f) {
  DomainSpec s;
  double m = std::abs(f.lambda());
  for (cplx v : singular_values(f)) m = std::max(m, std::abs(v));
  s.disc_radius = std::max(1.0, 2.0 * m);
  double argl = std::arg(f.lambda());
  switch (f.family) {
    case Family::Cosh:
    case Family::ScaledCosh:
      s.delta_direction = wrap_pi(-kPi / 2 + argl);
      break;
    case Family::ScaledSin:
    case Family::ScaledExp:
      s.delta_direction = wrap_pi(kPi + argl);
      break;
  }
  return s;
}

Alphabet::Alphabet(const EntireMap& f, const DomainSpec& spec, int k_max) : map_(f), spec_(spec), k_max_(k_max) {
  const double r = spec.disc_radius;
  if (!(r > 0.0)) throw DomainSpecError("disc_radius must be positive");
  if (k_max < 0) throw DomainSpecError("k_max must be non-negative");
  for (cplx v : singular_values(f))
    if (std::abs(v) >= r) throw DomainSpecError("D must contain S(f)");
  if (std::abs(eval(f, 0.0)) >= r) throw DomainSpecError("D must contain f(0)");
  // bounded postsingular orbits
  for (cplx v : singular_values(f)) {
    auto orb = orbit(f, v, 200, 1e6);
    if (!orb.escaped) {
      for (std::size_t i = orb.points.size() / 2; i < orb.points.size(); ++i)
        if (std::abs(orb.points[i]) >= r) throw DomainSpecError("D must contain the bounded postsingular set");
    }
  }
  phi_ = wrap_pi(spec.delta_direction - std::arg(f.lambda()));
  if (f.cosh_type()) {
    double q = phi_ / (kPi / 2);
    if (std::abs(q - std::round(q)) > 1e-9) throw DomainSpecError("unsupported δ direction for this λ");
  }
  // δ must stay outside every tract
  const cplx dir = std::polar(1.0, spec.delta_direction);
  auto off_tract = [&](double t) {
    auto w = try_eval(f, t * dir);
    return w && std::abs(*w) < r;
  };
  for (int j = 0; j <= 20000; ++j)
    if (!off_tract(r + 0.01 * j)) throw DomainSpecError("δ meets tract closure");
  for (double t = r + 200.0; t < 1e6; t *= 1.01)
    if (!off_tract(t)) throw DomainSpecError("δ meets tract closure");

  const cplx w0 = std::polar(2.0 * r, seed_direction());
  for (char tr : tracts()) {
    for (int k = -k_max; k <= k_max; ++k) {
      Symbol s{tr, k};
      cplx rep = invert(s, w0);
      if (!in_W(eval(f, rep))) throw DomainSpecError("representative outside W");
      domains_.push_back({s, rep});
    }
  }
  std::sort(domains_.begin(), domains_.end(),
            [this](const FundamentalDomain& a, const FundamentalDomain& b) { return compare(a.symbol, b.symbol) < 0; });
}

std::vector<char> Alphabet::tracts() const {
  switch (map_.family) {
    case Family::Cosh:
    case Family::ScaledCosh: return {'R', 'L'};
    case Family::ScaledSin: return {'D', 'U'};
    case Family::ScaledExp: return {0};
  }
  return {};
}

bool Alphabet::valid_symbol(const Symbol& s) const {
  auto t = tracts();
  return std::find(t.begin(), t.end(), s.tract) != t.end();
}

bool Alphabet::in_window(const Symbol& s) const { return valid_symbol(s) && std::abs(s.k) <= k_max_; }

bool Alphabet::in_W(cplx w) const {
  double m = std::abs(w);
  if (!(m > spec_.disc_radius)) return false;
  cplx v = w * std::polar(1.0, -spec_.delta_direction);
  return !(v.real() > 0 && std::abs(v.imag()) <= 1e-15 * m);
}

bool Alphabet::crosses_cut(cplx w1, cplx w2) const {
  cplx rot = std::polar(1.0, -spec_.delta_direction);
  cplx a = w1 * rot, b = w2 * rot;
  if ((a.imag() > 0 && b.imag() > 0) || (a.imag() < 0 && b.imag() < 0)) return false;
  double x;
  if (a.imag() == b.imag()) {
    x = std::max(a.real(), b.real());
  } else {
    double s = a.imag() / (a.imag() - b.imag());
    x = a.real() + s * (b.real() - a.real());
  }
  return x >= spec_.disc_radius;
}

double Alphabet::window_lo() const { return phi_ <= 0 ? phi_ : phi_ - kTwoPi; }

double Alphabet::arg_in_window(cplx u) const {
  double lo = window_lo();
  double a = std::arg(u);
  while (a <= lo) a += kTwoPi;
  while (a > lo + kTwoPi) a -= kTwoPi;
  return a;
}

cplx Alphabet::to_zeta(cplx z) const {
  return map_.family == Family::ScaledSin ? I * (z - kPi / 2) : z;
}

cplx Alphabet::from_zeta(cplx zeta) const {
  return map_.family == Family::ScaledSin ? kPi / 2 - I * zeta : zeta;
}

int Alphabet::side(const Symbol& s) const { return (s.tract == 'R' || s.tract == 'D') ? 1 : -1; }

double Alphabet::tract_direction(const Symbol& s) const {
  if (map_.family == Family::ScaledExp) return 0.0;
  return std::arg(from_zeta(double(side(s))) - from_zeta(0.0));
}

cplx Alphabet::invert(const Symbol& s, cplx w) const {
  if (!valid_symbol(s)) throw Error("symbol " + s.str() + " not in this alphabet");
  if (!in_W(w)) throw BranchDomainError("inverse branch: w outside W", w);
  cplx a = w / map_.lambda();
  if (map_.family == Family::ScaledExp) {
    cplx L{std::log(std::abs(a)), arg_in_window(a)};
    return L + I * (kTwoPi * s.k);
  }
  cplx u = big_root(a);
  cplx L{std::log(std::abs(u)), arg_in_window(u)};
  return from_zeta(double(side(s)) * L + I * (kTwoPi * s.k));
}

cplx Alphabet::invert_log(const Symbol& s, double log_modulus, double angle) const {
  if (log_modulus < 600.0) return invert(s, std::polar(std::exp(log_modulus), angle));
  if (!valid_symbol(s)) throw Error("symbol " + s.str() + " not in this alphabet");
  cplx dir = std::polar(1.0, angle - std::arg(map_.lambda()));
  if (!in_W(std::polar(1.0, angle) * (spec_.disc_radius + 1.0)))
    throw BranchDomainError("inverse branch: w on δ", std::polar(1.0, angle));
  double la = log_modulus - std::log(std::abs(map_.lambda()));
  if (map_.family == Family::ScaledExp) return cplx{la, arg_in_window(dir)} + I * (kTwoPi * s.k);
  // u ≈ 2a for huge a
  cplx L{la + std::log(2.0), arg_in_window(dir)};
  return from_zeta(double(side(s)) * L + I * (kTwoPi * s.k));
}

std::optional<Symbol> Alphabet::classify(cplx z) const {
  auto w = try_eval(map_, z);
  if (w && !in_W(*w)) return std::nullopt;
  double lo = window_lo();
  if (map_.family == Family::ScaledExp) {
    return Symbol{0, static_cast<int>(std::floor((z.imag() - lo) / kTwoPi))};
  }
  cplx zeta = to_zeta(z);
  if (zeta.real() == 0.0) return std::nullopt;
  auto tr = tracts();
  if (zeta.real() > 0) return Symbol{tr[0], static_cast<int>(std::floor((zeta.imag() - lo) / kTwoPi))};
  return Symbol{tr[1], static_cast<int>(std::floor((lo + zeta.imag()) / kTwoPi)) + 1};
}

std::vector<cplx> Alphabet::preimages_near(cplx w, cplx guess, int count) const {
  cplx a = w / map_.lambda();
  std::vector<cplx> cand;
  if (map_.family == Family::ScaledExp) {
    cplx L = std::log(a);
    int k0 = static_cast<int>(std::lround((guess.imag() - L.imag()) / kTwoPi));
    for (int k = k0 - 2; k <= k0 + 2; ++k) cand.push_back(L + I * (kTwoPi * k));
  } else {
    cplx L = std::log(big_root(a));
    cplx g = to_zeta(guess);
    for (double sg : {1.0, -1.0}) {
      cplx base = sg * L;
      int k0 = static_cast<int>(std::lround((g.imag() - base.imag()) / kTwoPi));
      for (int k = k0 - 2; k <= k0 + 2; ++k) cand.push_back(from_zeta(base + I * (kTwoPi * k)));
    }
  }
  std::sort(cand.begin(), cand.end(),
            [&](cplx p, cplx q) { return std::abs(p - guess) < std::abs(q - guess); });
  if (static_cast<int>(cand.size()) > count) cand.resize(count);
  return cand;
}

std::optional<cplx> Alphabet::nearest_critical_point(cplx z) const {
  if (map_.family == Family::ScaledExp) return std::nullopt;
  cplx zeta = to_zeta(z);
  return from_zeta(I * (kPi * std::round(zeta.imag() / kPi)));
}

OrderKey Alphabet::order_key(const Symbol& s) const {
  double dir = 0.0;
  if (map_.cosh_type()) dir = side(s) > 0 ? 0.0 : kPi;
  if (map_.family == Family::ScaledSin) dir -= kPi / 2;
  double angle = wrap_2pi(dir - spec_.delta_direction);
  cplx z = invert(s, std::polar(1e8, seed_direction()));
  double transverse = (z * std::polar(1.0, -dir)).imag();
  return {angle, transverse};
}

int Alphabet::compare(const Symbol& a, const Symbol& b) const {
  if (a == b) return 0;
  auto ka = order_key(a), kb = order_key(b);
  if (ka == kb) return natural_symbol_compare(a, b);
  return ka < kb ? -1 : 1;
}

SymbolCompare Alphabet::comparator() const {
  return [this](const Symbol& a, const Symbol& b) { return compare(a, b); };
}

Alphabet build_alphabet(const EntireMap& f, const DomainSpec& spec, int k_max) { return Alphabet(f, spec, k_max); }

std::optional<FundamentalDomain> classify_point(const Alphabet& a, cplx z) {
  auto s = a.classify(z);
  if (!s) return std::nullopt;
  if (!a.in_window(*s)) return std::nullopt;
  return FundamentalDomain{*s, z};
}

ExternalAddress address_of_orbit(const Alphabet& a, cplx z, int depth) {
  if (depth < 1) throw Error("address_of_orbit: depth must be >= 1");
  std::vector<Symbol> syms;
  cplx w = z;
  for (int n = 0; n < depth; ++n) {
    if (!(std::abs(w) > a.spec().disc_radius)) throw AddressError("iterate in the bounded part", n);
    auto s = a.classify(w);
    if (!s) throw AddressError("iterate not in any fundamental domain", n);
    if (!a.in_window(*s)) throw AddressError("symbol " + s->str() + " outside the alphabet window", n);
    syms.push_back(*s);
    if (n + 1 < depth) {
      auto nx = try_eval(a.map(), w);
      if (!nx) {
        // real axis is invariant for real positive λ: the rest of the orbit stays in the real tract
        const auto& f = a.map();
        bool real_inv = f.family != Family::ScaledSin && f.lambda().imag() == 0.0 && f.lambda().real() > 0.0 &&
                        w.imag() == 0.0;
        if (!real_inv) throw AddressError("orbit overflow", n + 1);
        Symbol s{f.family == Family::ScaledExp ? char(0) : 'R', 0};
        while (static_cast<int>(syms.size()) < depth) syms.push_back(s);
        break;
      }
      w = *nx;
    }
  }
  return ExternalAddress(syms, {});
}

bool cyclic_order_at_infinity(const Alphabet& a, const std::optional<Symbol>& x, const std::optional<Symbol>& y,
                              const std::optional<Symbol>& z) {
  auto less = [&](const std::optional<Symbol>& p, const std::optional<Symbol>& q) {
    if (!p) return q.has_value();
    if (!q) return false;
    return a.compare(*p, *q) < 0;
  };
  return cyclically_between(x, y, z, less);
}

Ordering lex_compare(const Alphabet& a, const ExternalAddress& x, const ExternalAddress& y) {
  return lex_compare(x, y, a.comparator());
}

}  // namespace crinifer
