#include "crinifer/address.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <numeric>
#include <set>

namespace crinifer {

std::string Symbol::str() const {
  if (tract == 0) return std::to_string(k);
  std::string s(1, tract);
  if (k != 0) s += std::to_string(k);
  return s;
}

Symbol Symbol::parse(const std::string& token) {
  if (token.empty()) throw Error("empty symbol");
  Symbol s;
  std::size_t i = 0;
  if (std::isalpha(static_cast<unsigned char>(token[0]))) {
    char c = token[0];
    if (c != 'R' && c != 'L' && c != 'U' && c != 'D') throw Error("unknown tract letter '" + std::string(1, c) + "'");
    s.tract = c;
    i = 1;
  }
  if (i < token.size()) {
    const char* first = token.data() + i;
    const char* last = token.data() + token.size();
    auto res = std::from_chars(first, last, s.k);
    if (res.ec != std::errc() || res.ptr != last) throw Error("bad symbol '" + token + "'");
  } else if (s.tract == 0) {
    throw Error("bad symbol '" + token + "'");
  }
  if (s.str() != token) throw Error("non-canonical symbol '" + token + "'");
  return s;
}

const char* to_string(Ordering o) {
  switch (o) {
    case Ordering::Less: return "LT";
    case Ordering::Equal: return "EQ";
    case Ordering::Greater: return "GT";
    case Ordering::Undetermined: return "undetermined at available depth";
  }
  return "?";
}

ExternalAddress::ExternalAddress(std::vector<Symbol> prefix, std::vector<Symbol> tail)
    : prefix_(std::move(prefix)), tail_(std::move(tail)) {
  if (prefix_.empty() && tail_.empty()) throw Error("address needs at least one symbol");
}

namespace {

std::vector<Symbol> parse_run(const std::string& text, std::size_t offset) {
  std::vector<Symbol> out;
  std::size_t pos = 0;
  while (true) {
    auto dot = text.find('.', pos);
    std::string tok = text.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    try {
      out.push_back(Symbol::parse(tok));
    } catch (const Error& e) {
      throw AddressParseError(e.what(), offset + pos);
    }
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return out;
}

std::string join(const std::vector<Symbol>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += '.';
    s += v[i].str();
  }
  return s;
}

}  // namespace

ExternalAddress ExternalAddress::parse(const std::string& lit) {
  if (lit.empty()) throw AddressParseError("empty address", 0);
  auto open = lit.find('(');
  std::vector<Symbol> prefix, tail;
  if (open == std::string::npos) {
    if (lit.find(')') != std::string::npos) throw AddressParseError("unbalanced ')'", lit.find(')'));
    prefix = parse_run(lit, 0);
    return ExternalAddress(prefix, {});
  }
  if (lit.back() != ')') throw AddressParseError("periodic tail must end the address", lit.size() - 1);
  if (open > 0) {
    if (lit[open - 1] != '.') throw AddressParseError("expected '.' before '('", open);
    if (open < 2) throw AddressParseError("empty prefix symbol", 0);
    prefix = parse_run(lit.substr(0, open - 1), 0);
  }
  std::string inner = lit.substr(open + 1, lit.size() - open - 2);
  if (inner.find('(') != std::string::npos || inner.find(')') != std::string::npos)
    throw AddressParseError("nested parentheses", open + 1);
  tail = parse_run(inner, open + 1);
  return ExternalAddress(prefix, tail);
}

Symbol ExternalAddress::at(std::size_t n) const {
  if (n < prefix_.size()) return prefix_[n];
  if (tail_.empty()) throw Error("address symbol " + std::to_string(n) + " beyond truncation depth");
  return tail_[(n - prefix_.size()) % tail_.size()];
}

ExternalAddress ExternalAddress::shift() const {
  if (!prefix_.empty()) {
    if (prefix_.size() == 1 && tail_.empty()) throw Error("cannot shift a depth-1 finite address");
    return ExternalAddress(std::vector<Symbol>(prefix_.begin() + 1, prefix_.end()), tail_);
  }
  std::vector<Symbol> t(tail_.begin() + 1, tail_.end());
  t.push_back(tail_.front());
  return ExternalAddress({}, t);
}

ExternalAddress ExternalAddress::shift(std::size_t n) const {
  ExternalAddress a = *this;
  for (std::size_t i = 0; i < n; ++i) a = a.shift();
  return a;
}

ExternalAddress ExternalAddress::normalized() const {
  if (tail_.empty()) return *this;
  std::vector<Symbol> t = tail_;
  // minimal period
  for (std::size_t p = 1; p <= t.size(); ++p) {
    if (t.size() % p) continue;
    bool ok = true;
    for (std::size_t i = p; i < t.size() && ok; ++i) ok = t[i] == t[i - p];
    if (ok) {
      t.resize(p);
      break;
    }
  }
  std::vector<Symbol> pre = prefix_;
  // absorb trailing prefix symbols into the tail
  while (!pre.empty() && pre.back() == t.back()) {
    pre.pop_back();
    std::rotate(t.rbegin(), t.rbegin() + 1, t.rend());
  }
  return ExternalAddress(pre, t);
}

ExternalAddress ExternalAddress::truncate(std::size_t n) const {
  std::vector<Symbol> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(at(i));
  return ExternalAddress(v, {});
}

std::string ExternalAddress::str() const {
  std::string s = join(prefix_);
  if (!tail_.empty()) {
    if (!s.empty()) s += '.';
    s += "(" + join(tail_) + ")";
  }
  return s;
}

int natural_symbol_compare(const Symbol& a, const Symbol& b) {
  if (a == b) return 0;
  return a < b ? -1 : 1;
}

Ordering lex_compare(const ExternalAddress& a, const ExternalAddress& b, const SymbolCompare& cmp) {
  std::size_t n;
  if (a.periodic() && b.periodic()) {
    n = std::max(a.prefix().size(), b.prefix().size()) + std::lcm(a.tail().size(), b.tail().size());
  } else if (a.periodic()) {
    n = b.depth();
  } else if (b.periodic()) {
    n = a.depth();
  } else {
    n = std::min(a.depth(), b.depth());
  }
  for (std::size_t i = 0; i < n; ++i) {
    int c = cmp(a.at(i), b.at(i));
    if (c < 0) return Ordering::Less;
    if (c > 0) return Ordering::Greater;
  }
  if (a.periodic() && b.periodic()) return Ordering::Equal;
  if (!a.periodic() && !b.periodic() && a.depth() == b.depth()) return Ordering::Equal;
  return Ordering::Undetermined;
}

Sign parse_sign(const std::string& s) {
  if (s == "-" || s == "minus") return Sign::Minus;
  if (s == "+" || s == "plus") return Sign::Plus;
  throw Error("bad sign '" + s + "'");
}

std::vector<ExternalAddress> periodic_addresses(const std::vector<Symbol>& symbols, int max_period) {
  std::vector<ExternalAddress> out;
  std::set<std::string> seen;
  for (int p = 1; p <= max_period; ++p) {
    std::vector<std::size_t> idx(p, 0);
    while (true) {
      std::vector<Symbol> t;
      for (auto i : idx) t.push_back(symbols[i]);
      ExternalAddress a({}, t);
      if (seen.insert(a.key()).second) out.push_back(a.normalized());
      int j = p - 1;
      while (j >= 0 && ++idx[j] == symbols.size()) idx[j--] = 0;
      if (j < 0) break;
    }
  }
  return out;
}

}  // namespace crinifer
