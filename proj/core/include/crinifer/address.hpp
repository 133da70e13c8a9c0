#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "crinifer/entire_map.hpp"

namespace crinifer {

// tract: 'R'/'L' (cosh-type), 'D'/'U' (sin-type), 0 for exp branches.
struct Symbol {
  char tract = 0;
  int k = 0;

  auto operator<=>(const Symbol&) const = default;
  std::string str() const;
  static Symbol parse(const std::string& token);
};

enum class Ordering { Less, Equal, Greater, Undetermined };

const char* to_string(Ordering o);

struct AddressParseError : Error {
  std::size_t position;
  AddressParseError(const std::string& msg, std::size_t pos)
      : Error(msg + " at position " + std::to_string(pos)), position(pos) {}
};

class ExternalAddress {
 public:
  ExternalAddress() = default;
  ExternalAddress(std::vector<Symbol> prefix, std::vector<Symbol> tail = {});

  static ExternalAddress parse(const std::string& literal);
  static ExternalAddress constant(Symbol s) { return ExternalAddress({}, {s}); }

  const std::vector<Symbol>& prefix() const { return prefix_; }
  const std::vector<Symbol>& tail() const { return tail_; }
  bool periodic() const { return !tail_.empty(); }
  // Number of available symbols; only meaningful without a tail.
  std::size_t depth() const { return prefix_.size(); }
  bool has(std::size_t n) const { return periodic() || n < prefix_.size(); }
  Symbol at(std::size_t n) const;
  Symbol head() const { return at(0); }

  ExternalAddress shift() const;
  ExternalAddress shift(std::size_t n) const;
  // Minimal tail period, shortest prefix. Used for keys and equality.
  ExternalAddress normalized() const;
  // First n symbols as a finite address.
  ExternalAddress truncate(std::size_t n) const;

  std::string str() const;
  std::string key() const { return normalized().str(); }

  bool operator==(const ExternalAddress& o) const { return key() == o.key(); }
  bool same_literal(const ExternalAddress& o) const { return prefix_ == o.prefix_ && tail_ == o.tail_; }

 private:
  std::vector<Symbol> prefix_;
  std::vector<Symbol> tail_;
};

using SymbolCompare = std::function<int(const Symbol&, const Symbol&)>;

// Lexicographic order induced by a linear order on symbols.
Ordering lex_compare(const ExternalAddress& a, const ExternalAddress& b, const SymbolCompare& cmp);

// Natural order on (tract, k); used when no alphabet is at hand.
int natural_symbol_compare(const Symbol& a, const Symbol& b);

enum class Sign { Minus, Plus };

inline char sign_char(Sign s) { return s == Sign::Minus ? '-' : '+'; }
Sign parse_sign(const std::string& s);

struct SignedAddress {
  ExternalAddress address;
  Sign sign = Sign::Plus;

  std::string str() const { return address.str() + sign_char(sign); }
  std::string key() const { return address.key() + sign_char(sign); }
  bool operator==(const SignedAddress& o) const { return sign == o.sign && address == o.address; }
};

// All addresses (a)^ω with 1 <= period <= max_period over the given symbols, deduplicated by key.
std::vector<ExternalAddress> periodic_addresses(const std::vector<Symbol>& symbols, int max_period);

}  // namespace crinifer
