#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crinifer/model_space.hpp"

namespace crinifer {

// Hyperbolic density of {|z| > K}: ρ(z) = 1/(|z| log(|z|/K)).
class MetricSurrogate {
 public:
  explicit MetricSurrogate(double core_radius = 2.0);

  double core_radius() const { return k_; }
  double density(cplx z) const;
  // Upper bound: shortest of the straight segment and two arc-plus-radial paths.
  double distance(cplx a, cplx b) const;
  // |f'(z)| ρ(f(z)) / ρ(z).
  double expansion(const EntireMap& f, cplx z) const;

 private:
  double segment_length(cplx a, cplx b) const;
  double radial(double r0, double r1) const;
  double arc(double r, double dtheta) const;

  double k_;
};

struct MetricDomainError : Error {
  using Error::Error;
};

// Near-infinity correspondence from g-hairs to f initial rays by label conjugacy.
class ThetaMap {
 public:
  ThetaMap(const ModelStore& store, const HairTracer& f_tails, const InitialConfiguration& rays_f);

  const std::string& matching_rule() const { return rule_; }
  double validity_radius() const { return validity_radius_; }
  double annulus_constant() const { return m_; }
  // f label paired with the g label t; below the f tails' minimum label the tip is used.
  double tau(double t) const;
  cplx operator()(const ModelPoint& x) const;
  const InitialConfiguration& rays() const { return *rays_; }

  // Worst |θ(g(z)) − f(θ(z))| in the metric over hair vertices beyond validity_radius.
  double commutation_defect(const MetricSurrogate& metric) const;
  // Max of |θz|/|z| and |z|/|θz| over hair vertices with |z| >= min_radius.
  double fit_annulus(double min_radius) const;

 private:
  const ModelStore* store_;
  HairTracer f_;
  const InitialConfiguration* rays_;
  std::string rule_ = "label-conjugacy";
  double t_min_f_;
  double validity_radius_ = 0.0;
  double m_ = 1.0;
};

ThetaMap build_theta(const EntireMap& f, const ModelStore& store, const HairTracer& f_tails,
                     const InitialConfiguration& rays_f);

// φ_n(x) = f^{-n}_{(s,*)}(θ(π(g̃ⁿ(x)))) along the canonical rays of `rays`.
cplx phi_stage(const RayConfiguration& rays, const ThetaMap& theta, const ModelStore& store, const ModelPoint& x,
               int n);

struct PhiSample {
  ModelPoint point;
  std::vector<cplx> values;  // φ_0 .. φ_N
};

struct PhiApprox {
  int stage = 0;
  std::vector<PhiSample> samples;
  std::vector<double> gaps;
  double fitted_ratio = 0.0;
  double mu_hat = 0.0;
  double functional_residual = 0.0;  // max |f(φ_{n+1}(x)) − φ_n(g̃(x))|
  bool complete = true;
  std::string error;
};

PhiApprox cauchy_report(const RayConfiguration& rays, const ThetaMap& theta, const ModelStore& store,
                        const std::vector<ModelPoint>& sample, int N, const MetricSurrogate& metric);

struct Residual {
  double finite_stage = 0.0;
  double limit_bound = 0.0;
  double total() const { return finite_stage + limit_bound; }
};

Residual semiconjugacy_residual(const PhiApprox& phi);

struct FiberReport {
  bool pass = false;
  bool undetermined = false;
  int count = 0;
  int formula = 0;
  int max_degree = 2;
  int critical_visits = 0;
  long bound = 0;
  std::string message;
};

FiberReport fiber_count_check(const EntireMap& f, const RayConfiguration& rays, cplx z, int depth);

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

struct LandingReport {
  Verdict verdict = Verdict::Inconclusive;
  cplx endpoint;
  double last_gap = INFINITY;
  double forward_defect = INFINITY;
};

LandingReport landing_check(const EntireMap& f, const CanonicalRay& ray, const CanonicalRay& shifted, double tol);

// Labels F_g^{-N}(y) for y log-spaced in [y0, y1]: points whose N-th image sits at label y.
std::vector<ModelPoint> cauchy_samples(const ModelStore& store, const std::vector<ExternalAddress>& addresses,
                                       int count, int N, double y0, double y1);

}  // namespace crinifer
