#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crinifer/ray_tracer.hpp"

namespace crinifer {

struct SplitEvent {
  cplx point;
  int level = 0;
  int local_degree = 2;
  int iterate = 1;  // (f^iterate)'(point) = 0
};

struct LevelVertex {
  cplx z;
  cplx w;              // f(z) on the previous level of the shifted ray
  int crit_iter = 0;   // k > 0 when z is a critical point of f^k
  bool pulled = false; // false for the prepended far part
};

struct BranchStep {
  Symbol symbol;
  std::optional<Sign> split_sign;

  bool operator==(const BranchStep&) const = default;
};

struct CanonicalRay {
  SignedAddress signed_address;
  std::vector<RayTail> levels;
  std::vector<SplitEvent> split_events;
  std::vector<std::vector<LevelVertex>> detail;  // per level
  std::vector<BranchStep> chain;                 // per level >= 1

  int top_level() const { return static_cast<int>(levels.size()) - 1; }
  const RayTail& level(int n) const { return levels.at(n); }
  std::vector<cplx> tips() const;
};

struct InitialConfiguration {
  std::map<std::string, RayTail> rays;  // keyed by normalized address
  std::function<double(double)> label_map;      // F on labels
  std::function<double(double)> label_inverse;  // F^{-1} on labels

  const RayTail& at(const ExternalAddress& a) const;
  bool contains(const ExternalAddress& a) const { return rays.count(a.key()) > 0; }
};

struct InvarianceError : Error {
  std::string address;
  InvarianceError(const std::string& addr, double defect)
      : Error("forward-invariance defect " + std::to_string(defect) + " for " + addr), address(addr) {}
};

// Worst distance of f(γ⁰_s) from γ⁰_{σs}; throws InvarianceError above tol.
double check_forward_invariance(const EntireMap& f, const InitialConfiguration& cfg, double tol);

// γ⁰_s = label tails of f traced from tracer.config().min_label.
InitialConfiguration initial_configuration_from_tails(const HairTracer& f_tails,
                                                      const std::vector<ExternalAddress>& addresses);

// [0, ∞) for (R) and (-∞, 0] for L.(R); cosh only.
InitialConfiguration cosh_real_axis_configuration(const HairTracer& f_tails);

struct AmbiguousContinuation : Error {
  cplx w;
  AmbiguousContinuation(cplx w_) : Error("ambiguous continuation near critical point; refine sampling"), w(w_) {}
};

struct ExtensionOptions {
  double refine_tol = 1e-8;
  double max_gap = 0.25;
  // Pullbacks are only evaluated where the image lies within this modulus.
  double far_radius = 1e6;
};

CanonicalRay initial_canonical_ray(const SignedAddress& a, const RayTail& gamma0);

// Level n of `ray` from level n-1 of `shifted` (the canonical ray of the shifted signed address).
CanonicalRay extend_one_level(const Alphabet& f, const CanonicalRay& ray, const CanonicalRay& shifted,
                              const InitialConfiguration& init, const ExtensionOptions& opt = {});

// f^{-1,[level]}_{(s,*)}: w near level-1 of the shifted ray, mapped into level `level` of `ray`.
cplx pull_back_point(const Alphabet& f, const CanonicalRay& ray, int level, cplx w);

class RayConfiguration {
 public:
  RayConfiguration(const Alphabet& f, InitialConfiguration init, ExtensionOptions opt = {});

  const Alphabet& alphabet() const { return alphabet_; }
  const InitialConfiguration& initial() const { return init_; }
  // Breadth-first extension of every tracked signed address to `depth`.
  void extend_to(int depth);
  int depth() const { return depth_; }

  const CanonicalRay& ray(const SignedAddress& a) const;
  const CanonicalRay& ray(const ExternalAddress& a, Sign s) const { return ray({a, s}); }
  bool contains(const SignedAddress& a) const { return rays_.count(a.key()) > 0; }
  std::vector<const CanonicalRay*> all() const;

 private:
  Alphabet alphabet_;
  InitialConfiguration init_;
  ExtensionOptions opt_;
  std::map<std::string, CanonicalRay> rays_;
  int depth_ = 0;
};

std::vector<SignedAddress> signed_addresses_of(const RayConfiguration& cfg, cplx z, int depth, double tol = 1e-6);

struct Undetermined : Error {
  using Error::Error;
};

int count_formula(const EntireMap& f, cplx z, int depth);

struct AgreementReport {
  bool pass = true;
  int pairs_checked = 0;
  int outside_interval = 0;
  std::vector<int> differing_levels;  // for pairs that share the address but not the sign
  std::string message;
};

AgreementReport check_agreement_interval(const std::vector<const CanonicalRay*>& rays, int n);

}  // namespace crinifer
