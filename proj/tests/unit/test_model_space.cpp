#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "crinifer/io.hpp"
#include "crinifer/model_space.hpp"

using namespace crinifer;

namespace {

ExternalAddress A(const char* s) { return ExternalAddress::parse(s); }

std::vector<ExternalAddress> constant_addresses() {
  std::vector<ExternalAddress> v;
  for (int k = -4; k <= 5; ++k) {
    v.push_back(ExternalAddress::constant({'R', k}));
    v.push_back(ExternalAddress::constant({'L', k}));
  }
  return v;
}

const ModelStore& store() {
  static const ModelStore s = [] {
    PullbackConfig c;
    c.start_radius = 60;
    c.depth = 20;
    auto addrs = constant_addresses();
    addrs.push_back(A("(R.L1)"));
    return ModelStore(EntireMap::scaled_cosh(0.1), c, addrs);
  }();
  return s;
}

const Alphabet& alphabet() { return store().tracer().alphabet(); }

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("crinifer_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(ModelSpace, ModelMapOnRealHair) {
  ModelPoint x{A("(R)"), 5.0, Sign::Plus};
  ModelPoint y = model_map(store(), x);
  EXPECT_EQ(y.address, x.address);
  EXPECT_EQ(y.sign, Sign::Plus);
  cplx z = project(store(), x), w = project(store(), y);
  EXPECT_EQ(z.imag(), 0.0);
  EXPECT_EQ(w.imag(), 0.0);
  EXPECT_GT(std::abs(w), std::abs(z));
}

TEST(ModelSpace, ModelMapPreservesSignAndCommutesWithProjection) {
  std::mt19937_64 rng(7);
  auto addrs = store().addresses();
  std::uniform_int_distribution<std::size_t> pick(0, addrs.size() - 1);
  std::uniform_real_distribution<double> lab(4.6, 7.0);
  for (int i = 0; i < 1000; ++i) {
    ModelPoint x{addrs[pick(rng)], lab(rng), i % 2 ? Sign::Plus : Sign::Minus};
    ModelPoint y = model_map(store(), x);
    ASSERT_EQ(y.sign, x.sign);
    cplx gz = eval(store().map_g(), project(store(), x));
    EXPECT_LT(std::abs(project(store(), y) - gz), 1e-8 * std::max(1.0, std::abs(gz)));
  }
}

TEST(ModelSpace, ProjectionForgetsSign) {
  ModelPoint p{A("(L2)"), 6.0, Sign::Plus}, m{A("(L2)"), 6.0, Sign::Minus};
  EXPECT_EQ(project(store(), p), project(store(), m));
}

TEST(ModelSpace, RangeExhaustedOnOverflow) {
  ModelPoint x{A("(R)"), 800.0, Sign::Plus};
  EXPECT_THROW(model_map(store(), x), RangeExhausted);
}

TEST(ModelSpace, SignedCompareExamples) {
  SignedAddress m{A("(R)"), Sign::Minus}, p{A("(R)"), Sign::Plus}, q{A("(L)"), Sign::Minus};
  EXPECT_EQ(signed_compare(alphabet(), m, p), Ordering::Less);
  EXPECT_EQ(signed_compare(alphabet(), p, q), Ordering::Less);
  EXPECT_EQ(signed_compare(alphabet(), p, p), Ordering::Equal);
}

TEST(ModelSpace, SignedCompareAntisymmetryExhaustive) {
  std::vector<Symbol> syms{{'R', 0}, {'L', 0}};
  std::vector<SignedAddress> all;
  for (int w = 0; w < 8; ++w) {
    std::vector<Symbol> word;
    for (int i = 0; i < 3; ++i) word.push_back(syms[(w >> i) & 1]);
    for (Sign s : {Sign::Minus, Sign::Plus}) all.push_back({ExternalAddress(word), s});
  }
  for (const auto& a : all)
    for (const auto& b : all) {
      Ordering ab = signed_compare(alphabet(), a, b), ba = signed_compare(alphabet(), b, a);
      EXPECT_EQ(ab == Ordering::Less, ba == Ordering::Greater);
      EXPECT_EQ(ab == Ordering::Equal, a == b);
    }
}

TEST(ModelSpace, CyclicIntervalMembership) {
  SignedAddress a{A("(R)"), Sign::Minus}, x{A("(R)"), Sign::Plus}, b{A("(L)"), Sign::Plus};
  EXPECT_TRUE(cyclic_interval_member(alphabet(), a, x, b));
  EXPECT_TRUE(cyclic_interval_member(alphabet(), x, b, a));
  EXPECT_FALSE(cyclic_interval_member(alphabet(), x, a, b));
  EXPECT_THROW(cyclic_interval_member(alphabet(), a, a, b), Error);
}

TEST(ModelSpace, CyclicityExhaustive) {
  std::vector<SignedAddress> all;
  for (auto s : {"(R)", "(L)", "(R1)", "R.(L)"})
    for (Sign sg : {Sign::Minus, Sign::Plus}) all.push_back({A(s), sg});
  for (const auto& a : all)
    for (const auto& x : all)
      for (const auto& b : all) {
        if (a == x || x == b || a == b) continue;
        EXPECT_EQ(cyclic_interval_member(alphabet(), a, x, b), cyclic_interval_member(alphabet(), x, b, a));
        EXPECT_NE(cyclic_interval_member(alphabet(), a, x, b), cyclic_interval_member(alphabet(), a, b, x));
      }
}

TEST(ModelSpace, OrderCorrespondenceOfHairs) {
  auto rep = order_correspondence_check(store(), {}, 50);
  EXPECT_TRUE(rep.pass) << rep.disagreement;
  EXPECT_GE(rep.triples, 1140);
  EXPECT_TRUE(rep.skipped.empty());
}

TEST(ModelSpace, OrderCorrespondenceDetectsMislabel) {
  auto f = EntireMap::cosh();
  Alphabet af(f, DomainSpec::defaults(f));
  PullbackConfig fc;
  fc.min_label = 2;
  fc.start_radius = 60;
  fc.depth = 6;
  fc.refine_tol = 1e-7;
  HairTracer tails(af, fc);
  std::vector<ExternalAddress> addrs{A("(R)"), A("(L)"), A("(R1)"), A("(L1)")};
  RayConfiguration cfg(af, initial_configuration_from_tails(tails, addrs));
  auto rays = cfg.all();
  EXPECT_TRUE(order_correspondence_check(store(), rays, 50).pass);
  std::vector<CanonicalRay> copies;
  for (const auto* r : rays) copies.push_back(*r);
  for (auto& c : copies) {
    if (c.signed_address.address == A("(R1)")) c.signed_address.address = A("(L1)");
    else if (c.signed_address.address == A("(L1)")) c.signed_address.address = A("(R1)");
  }
  std::vector<const CanonicalRay*> bad;
  for (const auto& c : copies) bad.push_back(&c);
  auto rep = order_correspondence_check(store(), bad, 50);
  EXPECT_FALSE(rep.pass);
  EXPECT_FALSE(rep.disagreement.empty());
}

TEST(ModelSpace, ExpHairsFollowBranchIndex) {
  PullbackConfig c;
  c.start_radius = 60;
  c.depth = 12;
  std::vector<ExternalAddress> addrs{ExternalAddress::constant({0, -1}), ExternalAddress::constant({0, 0}),
                                     ExternalAddress::constant({0, 1})};
  ModelStore s(EntireMap::scaled_exp(0.2), c, addrs);
  const Alphabet& a = s.tracer().alphabet();
  EXPECT_EQ(lex_compare(a, addrs[0], addrs[1]), Ordering::Less);
  EXPECT_EQ(lex_compare(a, addrs[1], addrs[2]), Ordering::Less);
  auto rep = order_correspondence_check(s, {}, 50);
  EXPECT_TRUE(rep.pass) << rep.disagreement;
  EXPECT_EQ(rep.triples, 1);
}

TEST(ModelSpace, DivergenceCriterion) {
  ModelPoint x{A("(R1)"), store().hair(A("(R1)")).points.back().t, Sign::Plus};
  std::vector<ModelPoint> orbit{x};
  while (orbit.size() < 40) {
    try {
      orbit.push_back(model_map(store(), orbit.back()));
    } catch (const RangeExhausted&) {
      break;
    }
  }
  ASSERT_GE(orbit.size(), 20u);
  orbit.erase(orbit.begin(), orbit.end() - 20);
  EXPECT_TRUE(divergence_criterion(store(), orbit));
  std::vector<ModelPoint> constant(25, ModelPoint{A("(R1)"), store().hair(A("(R1)")).points.back().t, Sign::Plus});
  EXPECT_FALSE(divergence_criterion(store(), constant));
  std::vector<cplx> alternating;
  for (int i = 0; i < 30; ++i) alternating.push_back(i % 2 ? cplx(1e3 * i, 0) : cplx(1, 0));
  EXPECT_FALSE(divergence_criterion(alternating, 10));
  EXPECT_THROW(divergence_criterion(std::vector<cplx>(5, cplx(1e9, 0)), 10), InsufficientEvidence);
}

TEST(ModelSpace, StoreRoundTripIsBitExact) {
  auto d1 = temp_dir("store1"), d2 = temp_dir("store2");
  store().save(d1);
  ModelStore back = ModelStore::load(d1);
  back.save(d2);
  for (const auto& e : std::filesystem::directory_iterator(d1))
    EXPECT_EQ(read_text_file(e.path()), read_text_file(d2 / e.path().filename()));
  for (const auto& [key, h] : store().hairs()) {
    const auto& b = back.hair(h.address);
    ASSERT_EQ(b.points.size(), h.points.size());
    for (std::size_t i = 0; i < h.points.size(); ++i) {
      EXPECT_EQ(b.points[i].t, h.points[i].t);
      EXPECT_EQ(b.points[i].z, h.points[i].z);
    }
  }
}

TEST(ModelSpace, CorruptedStoreIsRefused) {
  auto d = temp_dir("store_bad");
  store().save(d);
  auto f = d / "hair_0000.json";
  std::string body = read_text_file(f);
  body[body.size() / 2] = body[body.size() / 2] == '1' ? '2' : '1';
  write_text_file(f, body);
  EXPECT_THROW(ModelStore::load(d), ChecksumMismatch);
}
