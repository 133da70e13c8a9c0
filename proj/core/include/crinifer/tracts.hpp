#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "crinifer/address.hpp"
#include "crinifer/entire_map.hpp"

namespace crinifer {

struct DomainSpecError : Error {
  using Error::Error;
};

struct BranchDomainError : Error {
  cplx w;
  BranchDomainError(const std::string& msg, cplx w_) : Error(msg), w(w_) {}
};

struct DomainSpec {
  double disc_radius = 2.0;
  double delta_direction = -kPi / 2;

  static DomainSpec defaults(const EntireMap& f);
};

struct FundamentalDomain {
  Symbol symbol;
  cplx representative;
};

struct OrderKey {
  double angle;       // asymptotic direction, counterclockwise from δ, in (0, 2π)
  double transverse;  // offset across the direction

  auto operator<=>(const OrderKey&) const = default;
};

class Alphabet {
 public:
  Alphabet(const EntireMap& f, const DomainSpec& spec, int k_max = 16);

  const EntireMap& map() const { return map_; }
  const DomainSpec& spec() const { return spec_; }
  int k_max() const { return k_max_; }
  const std::vector<FundamentalDomain>& domains() const { return domains_; }

  bool in_W(cplx w) const;
  bool in_window(const Symbol& s) const;
  bool valid_symbol(const Symbol& s) const;
  std::vector<char> tracts() const;

  // The point of domain `s` mapping to w; throws BranchDomainError when w ∉ W.
  cplx invert(const Symbol& s, cplx w) const;
  // Same for w = exp(log_modulus + i·angle); avoids overflow for huge w.
  cplx invert_log(const Symbol& s, double log_modulus, double angle) const;
  // Symbol of the fundamental domain containing z, none when f(z) ∉ W.
  std::optional<Symbol> classify(cplx z) const;
  // Preimages of w sorted by distance to `guess`; no W restriction.
  std::vector<cplx> preimages_near(cplx w, cplx guess, int count = 4) const;
  // Critical point of f closest to z (none for exp).
  std::optional<cplx> nearest_critical_point(cplx z) const;
  // True when the segment [w1, w2] meets δ.
  bool crosses_cut(cplx w1, cplx w2) const;

  OrderKey order_key(const Symbol& s) const;
  // Linear order after cutting the cyclic order at δ.
  int compare(const Symbol& a, const Symbol& b) const;
  SymbolCompare comparator() const;

  // Direction opposite δ (used for seeds).
  double seed_direction() const { return spec_.delta_direction + kPi; }
  // Asymptotic argument of points far out in the domain of s.
  double tract_direction(const Symbol& s) const;

 private:
  double window_lo() const;
  double arg_in_window(cplx u) const;
  cplx to_zeta(cplx z) const;
  cplx from_zeta(cplx zeta) const;
  int side(const Symbol& s) const;

  EntireMap map_;
  DomainSpec spec_;
  int k_max_;
  double phi_;  // cut angle in the normalised w/λ plane
  std::vector<FundamentalDomain> domains_;
};

Alphabet build_alphabet(const EntireMap& f, const DomainSpec& spec, int k_max = 16);

std::optional<FundamentalDomain> classify_point(const Alphabet& a, cplx z);

struct AddressError : Error {
  int index;
  AddressError(const std::string& msg, int idx)
      : Error(msg + " at index " + std::to_string(idx)), index(idx) {}
};

ExternalAddress address_of_orbit(const Alphabet& a, cplx z, int depth);

// nullopt stands for δ.
bool cyclic_order_at_infinity(const Alphabet& a, const std::optional<Symbol>& x, const std::optional<Symbol>& y,
                              const std::optional<Symbol>& z);

Ordering lex_compare(const Alphabet& a, const ExternalAddress& x, const ExternalAddress& y);

// Cyclic betweenness from a linear order: [x, y, z] iff x<y<z, y<z<x or z<x<y.
template <class T, class Less>
bool cyclically_between(const T& x, const T& y, const T& z, Less less) {
  return (less(x, y) && less(y, z)) || (less(y, z) && less(z, x)) || (less(z, x) && less(x, y));
}

}  // namespace crinifer
