#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crinifer/address.hpp"
#include "crinifer/tracts.hpp"

namespace crinifer {

struct PullbackConfig {
  double start_radius = 50.0;  // largest label traced
  int samples = 32;            // per unit of log-label
  int depth = 20;
  double refine_tol = 1e-8;    // max chord deviation
  double max_gap = 0.5;        // max distance between consecutive points
  double label_cap = 30.0;     // labels at or above this are seeded directly
  double min_label = 0.0;      // no point below this label

  bool operator==(const PullbackConfig&) const = default;
};

struct RayPoint {
  double t;
  cplx z;
  int pullbacks;  // inverse branches applied to reach z
};

struct RayTail {
  ExternalAddress address;
  int depth = 0;
  std::vector<RayPoint> points;  // decreasing t

  std::vector<cplx> polyline() const;
};

cplx inverse_branch(const Alphabet& a, const Symbol& s, cplx w);

// Hairs parametrised by labels. Label dynamics F(t) = |λ|cosh t (|λ|e^t for exp) satisfy
// f(P_s(t)) = P_{σs}(F(t)).
class HairTracer {
 public:
  HairTracer(const Alphabet& alphabet, PullbackConfig cfg);

  const Alphabet& alphabet() const { return alphabet_; }
  const EntireMap& map() const { return alphabet_.map(); }
  const PullbackConfig& config() const { return cfg_; }

  double label_map(double t) const;
  double label_inverse(double y) const;  // NaN below the range of F
  std::optional<double> label_fixed_point() const { return fixed_; }
  // Smallest label whose point is reached with at most `depth` + 1 pullbacks.
  double tip_label(int depth) const;
  // Number of label steps until the cap.
  int steps_to_cap(double t) const;

  std::optional<RayPoint> point(const ExternalAddress& s, double t, int depth) const;
  RayPoint point_or_throw(const ExternalAddress& s, double t, int depth) const;
  RayTail trace(const ExternalAddress& s) const;
  RayTail trace(const ExternalAddress& s, int depth) const;
  // Seed direction in the image plane: the tract direction of the next symbol, kept off δ.
  double seed_angle(const Symbol& next) const;

 private:
  double mid_label(double t1, double t2) const;
  void refine(const ExternalAddress& s, int depth, const RayPoint& a, const RayPoint& b, int level,
              std::vector<RayPoint>& out) const;

  Alphabet alphabet_;
  PullbackConfig cfg_;
  double lam_;
  std::optional<double> fixed_;
};

RayTail trace_ray_disjoint(const EntireMap& g, const ExternalAddress& address, const PullbackConfig& cfg);

struct DynamicsReport {
  bool pass = false;
  double worst_distance = 0.0;
  std::optional<RayPoint> worst_point;
  int checked = 0;
  bool escape_monotone = false;
  std::string message;
};

double distance_to_polyline(cplx p, const std::vector<cplx>& poly);
double distance_to_segment(cplx p, cplx a, cplx b);

DynamicsReport verify_ray_dynamics(const HairTracer& tracer, const RayTail& ray, const RayTail& shifted, double tol);
DynamicsReport verify_ray_dynamics(const EntireMap& f, const RayTail& ray, const RayTail& shifted, double tol);

struct EndpointEstimate {
  bool converged = false;
  cplx value;
  double last_increment = INFINITY;
};

// Tips reached with exactly j + 1 pullbacks, j = 0..depth.
std::vector<cplx> tips_by_depth(const RayTail& ray);
EndpointEstimate endpoint_estimate(const RayTail& ray, double tol);
EndpointEstimate endpoint_from_tips(const std::vector<cplx>& tips, double tol);

}  // namespace crinifer
