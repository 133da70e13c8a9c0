#include <gtest/gtest.h>

#include <cmath>

#include "crinifer/tracts.hpp"

using namespace crinifer;

namespace {

const cplx I{0.0, 1.0};

Alphabet cosh_alphabet() { return Alphabet(EntireMap::cosh(), DomainSpec::defaults(EntireMap::cosh()), 4); }

}  // namespace

TEST(Tracts, DefaultsAreValid) {
  for (const auto& f : {EntireMap::cosh(), EntireMap::scaled_cosh(0.1), EntireMap::scaled_exp(0.2),
                        EntireMap::scaled_sin(0.5)}) {
    EXPECT_NO_THROW(Alphabet(f, DomainSpec::defaults(f), 3)) << format_map_spec(f);
  }
  EXPECT_EQ(DomainSpec::defaults(EntireMap::cosh()).disc_radius, 2.0);
  EXPECT_EQ(DomainSpec::defaults(EntireMap::scaled_cosh(0.1)).disc_radius, 1.0);
}

TEST(Tracts, InvalidSpecsRejected) {
  auto f = EntireMap::cosh();
  try {
    Alphabet(f, {3.0, 0.0});
    FAIL();
  } catch (const DomainSpecError& e) {
    EXPECT_STREQ(e.what(), "δ meets tract closure");
  }
  EXPECT_THROW(Alphabet(f, {0.5, -kPi / 2}), DomainSpecError);   // S(f) outside D
  EXPECT_THROW(Alphabet(f, {3.0, -kPi / 4}), DomainSpecError);   // unsupported cut
  EXPECT_THROW(Alphabet(EntireMap::scaled_exp(0.2), {1.0, 0.0}), DomainSpecError);
}

TEST(Tracts, AlphabetCounts) {
  Alphabet g(EntireMap::scaled_cosh(0.1), {1.0, -kPi / 2}, 2);
  EXPECT_EQ(g.domains().size(), 2u * 5u);
  for (const auto& d : g.domains()) EXPECT_TRUE(g.in_W(eval(g.map(), d.representative)));
  Alphabet e(EntireMap::scaled_exp(0.2), DomainSpec::defaults(EntireMap::scaled_exp(0.2)), 3);
  EXPECT_EQ(e.domains().size(), 7u);
  for (std::size_t i = 0; i < e.domains().size(); ++i) EXPECT_EQ(e.domains()[i].symbol.k, int(i) - 3);
}

TEST(Tracts, InverseBranchExamples) {
  auto a = cosh_alphabet();
  double w = std::cosh(5.0);
  EXPECT_NEAR(std::abs(a.invert({'R', 0}, w) - 5.0), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(a.invert({'L', 0}, w) + 5.0), 0.0, 1e-13);
  Alphabet e(EntireMap::scaled_exp(0.2), DomainSpec::defaults(EntireMap::scaled_exp(0.2)));
  // w = λ sits inside D, so use a point in W
  EXPECT_THROW(e.invert({0, 0}, 0.2), BranchDomainError);
  EXPECT_NEAR(std::abs(e.invert({0, 0}, 0.2 * std::exp(2.0)) - 2.0), 0.0, 1e-14);
  EXPECT_THROW(a.invert({'R', 0}, 1.0), BranchDomainError);
}

TEST(Tracts, InverseIsRightInverseAndClassifies) {
  auto a = cosh_alphabet();
  for (const auto& d : a.domains()) {
    for (double r : {3.0, 10.0, 1e3}) {
      for (double t : {-3.0, -1.0, 0.0, 0.5, 2.0, 3.1}) {
        cplx w = std::polar(r, t);
        if (!a.in_W(w)) continue;
        cplx z = a.invert(d.symbol, w);
        EXPECT_LT(std::abs(eval(a.map(), z) - w), 1e-12 * r);
        auto s = a.classify(z);
        ASSERT_TRUE(s);
        EXPECT_EQ(*s, d.symbol);
      }
    }
  }
}

TEST(Tracts, ClassifyExamples) {
  auto a = cosh_alphabet();
  auto r = classify_point(a, 5.0);
  auto l = classify_point(a, -5.0);
  ASSERT_TRUE(r && l);
  EXPECT_EQ(r->symbol.str(), "R");
  EXPECT_EQ(l->symbol.str(), "L");
  EXPECT_FALSE(classify_point(a, 0.0));
  auto s = EntireMap::scaled_sin(0.5);
  Alphabet b(s, DomainSpec::defaults(s), 3);
  EXPECT_EQ(b.classify(cplx(0.3, -6.0))->str(), "D");
  EXPECT_EQ(b.classify(cplx(0.3, 6.0))->str(), "U");
}

TEST(Tracts, AddressOfOrbit) {
  auto a = cosh_alphabet();
  EXPECT_EQ(address_of_orbit(a, 5.0, 4).str(), "R.R.R.R");
  try {
    address_of_orbit(a, 0.0, 1);
    FAIL();
  } catch (const AddressError& e) {
    EXPECT_EQ(e.index, 0);
  }
  // shift compatibility
  cplx z{3.0, 6.5};
  auto full = address_of_orbit(a, z, 2);
  auto tail = address_of_orbit(a, eval(a.map(), z), 1);
  EXPECT_EQ(full.shift().str(), tail.str());
}

TEST(Tracts, CyclicOrder) {
  Alphabet e(EntireMap::scaled_exp(0.2), DomainSpec::defaults(EntireMap::scaled_exp(0.2)), 3);
  Symbol s0{0, 0}, s1{0, 1}, s2{0, 2};
  EXPECT_TRUE(cyclic_order_at_infinity(e, s0, s1, s2));
  EXPECT_FALSE(cyclic_order_at_infinity(e, s2, s1, s0));
  EXPECT_TRUE(cyclic_order_at_infinity(e, s1, s2, s0));
  EXPECT_TRUE(cyclic_order_at_infinity(e, std::nullopt, s0, s1));

  auto a = cosh_alphabet();
  // axioms on all triples of the built alphabet plus δ
  std::vector<std::optional<Symbol>> xs{std::nullopt};
  for (const auto& d : a.domains()) xs.push_back(d.symbol);
  for (const auto& x : xs)
    for (const auto& y : xs)
      for (const auto& z : xs) {
        if (x == y || y == z || x == z) continue;
        bool b = cyclic_order_at_infinity(a, x, y, z);
        EXPECT_EQ(b, cyclic_order_at_infinity(a, y, z, x));
        EXPECT_NE(b, cyclic_order_at_infinity(a, z, y, x));
      }
}

TEST(Tracts, CoshOrderAfterCut) {
  auto a = cosh_alphabet();
  // right tract branches upward, then left tract branches downward
  EXPECT_LT(a.compare({'R', -1}, {'R', 0}), 0);
  EXPECT_LT(a.compare({'R', 4}, {'L', 4}), 0);
  EXPECT_LT(a.compare({'L', 1}, {'L', 0}), 0);
  auto p = [](const char* s) { return ExternalAddress::parse(s); };
  // R precedes L after cutting at the lower imaginary axis
  EXPECT_EQ(lex_compare(a, p("R.(L)"), p("(R)")), Ordering::Greater);
  EXPECT_EQ(lex_compare(a, p("R.(R)"), p("R.(L)")), Ordering::Less);
  EXPECT_EQ(lex_compare(a, p("(R)"), p("(R)")), Ordering::Equal);
}

TEST(Tracts, CutCrossing) {
  auto a = cosh_alphabet();
  EXPECT_TRUE(a.crosses_cut(cplx(-1.0, -5.0), cplx(1.0, -5.0)));
  EXPECT_FALSE(a.crosses_cut(cplx(-1.0, 5.0), cplx(1.0, 5.0)));
  EXPECT_FALSE(a.crosses_cut(cplx(-1.0, -1.0), cplx(1.0, -1.0)));
}
