#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "crinifer/signed_rays.hpp"

namespace crinifer {

struct ModelPoint {
  ExternalAddress address;
  double t = 0.0;
  Sign sign = Sign::Plus;
};

struct RangeExhausted : Error {
  int required_depth;
  RangeExhausted(const std::string& what, int depth)
      : Error("range exhausted: " + what + " (extend to depth " + std::to_string(depth) + ")"), required_depth(depth) {}
};

struct InsufficientEvidence : Error {
  using Error::Error;
};

// Traced hairs of a disjoint-type map, closed under the shift.
class ModelStore {
 public:
  ModelStore(const EntireMap& g, const PullbackConfig& cfg, const std::vector<ExternalAddress>& addresses);

  const EntireMap& map_g() const { return tracer_.map(); }
  const HairTracer& tracer() const { return tracer_; }
  const std::map<std::string, RayTail>& hairs() const { return hairs_; }
  const std::map<std::string, bool>& endpoint_flags() const { return landed_; }
  std::vector<ExternalAddress> addresses() const;

  bool contains(const ExternalAddress& a) const { return hairs_.count(a.key()) > 0; }
  const RayTail& hair(const ExternalAddress& a) const;
  // Whether x references a traced hair within its label range.
  bool valid(const ModelPoint& x) const;
  // Hair point at label x.t.
  cplx position(const ModelPoint& x) const;

  // Directory with one JSON file per hair and manifest.json.
  void save(const std::filesystem::path& dir) const;
  static ModelStore load(const std::filesystem::path& dir);

 private:
  ModelStore(HairTracer tracer) : tracer_(std::move(tracer)) {}

  HairTracer tracer_;
  std::map<std::string, RayTail> hairs_;
  std::map<std::string, bool> landed_;
};

ModelPoint model_map(const ModelStore& store, const ModelPoint& x);
cplx project(const ModelStore& store, const ModelPoint& x);

// Lexicographic on addresses, then − before +.
Ordering signed_compare(const Alphabet& a, const SignedAddress& x, const SignedAddress& y);

// [a, x, b] in the cyclic order of signed addresses; throws unless pairwise distinct.
bool cyclic_interval_member(const Alphabet& alph, const SignedAddress& a, const SignedAddress& x,
                            const SignedAddress& b);

struct OrderReport {
  bool pass = true;
  int triples = 0;
  int unresolved = 0;  // triples with coincident crossings at this radius
  std::vector<std::string> skipped;
  std::string disagreement;  // first offending triple
};

// Argument where a polyline first crosses |z| = r coming from infinity.
std::optional<double> crossing_angle(const std::vector<cplx>& poly, double r);

// Cyclic orders at |z| = R of g-hairs, f-rays (+ copy) and signed_compare agree on every triple.
// Pass an empty ray list to compare only the g-hairs.
OrderReport order_correspondence_check(const ModelStore& store, const std::vector<const CanonicalRay*>& rays_f,
                                       double radius);

// Final 10% of moduli above T with the minimum increasing; throws below 20 samples.
bool divergence_criterion(const std::vector<cplx>& points, double threshold);
bool divergence_criterion(const ModelStore& store, const std::vector<ModelPoint>& xs, double threshold = 0.0);

}  // namespace crinifer
