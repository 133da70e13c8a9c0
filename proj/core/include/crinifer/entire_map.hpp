#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crinifer {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kEscapeThreshold = 1e300;
inline constexpr int kDegreeCap = 8;

enum class Family { Cosh, ScaledCosh, ScaledExp, ScaledSin };

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an evaluation leaves the representable range.
struct EscapedMagnitude : Error {
  double threshold;
  explicit EscapedMagnitude(double thr)
      : Error("escaped-to-infinity magnitude (threshold " + std::to_string(thr) + ")"), threshold(thr) {}
};

struct DegeneratePoint : Error {
  using Error::Error;
};

struct EntireMap {
  Family family = Family::Cosh;
  cplx scale{1.0, 0.0};
  int precision = 16;

  static EntireMap cosh() { return {}; }
  static EntireMap scaled_cosh(cplx lambda) { return {Family::ScaledCosh, lambda, 16}; }
  static EntireMap scaled_exp(cplx lambda) { return {Family::ScaledExp, lambda, 16}; }
  static EntireMap scaled_sin(cplx lambda) { return {Family::ScaledSin, lambda, 16}; }

  bool cosh_type() const { return family != Family::ScaledExp; }
  // Effective multiplier (1 for plain cosh).
  cplx lambda() const { return family == Family::Cosh ? cplx{1.0, 0.0} : scale; }

  bool operator==(const EntireMap&) const = default;
};

struct SingularData {
  std::vector<cplx> critical_values;
  std::vector<cplx> asymptotic_values;
  std::vector<cplx> postsingular_sample;
  int depth = 0;
};

struct OrbitRecord {
  cplx seed;
  std::vector<cplx> points;
  bool escaped = false;
  std::optional<int> escape_index;
};

cplx eval(const EntireMap& f, cplx z);
std::optional<cplx> try_eval(const EntireMap& f, cplx z);
cplx derivative(const EntireMap& f, cplx z);
cplx nth_derivative(const EntireMap& f, cplx z, int n);

std::vector<cplx> critical_points_in_disc(const EntireMap& f, double radius);
std::vector<cplx> singular_values(const EntireMap& f);
SingularData singular_data(const EntireMap& f, int depth);
int local_degree(const EntireMap& f, cplx z, double tol = 1e-10);

OrbitRecord orbit(const EntireMap& f, cplx seed, int max_iter, double escape_radius = kEscapeThreshold);

struct SeparationReport {
  bool pass = true;
  std::optional<std::pair<cplx, cplx>> pair;
  double ratio = 0.0;
  std::vector<cplx> sample;
};

SeparationReport separation_check(const EntireMap& f, double epsilon, int depth);

struct DisjointTypeReport {
  bool pass = false;
  std::optional<cplx> fixed_point;
  cplx multiplier{0.0, 0.0};
  int iterations = 0;
  std::string reason;
};

DisjointTypeReport disjoint_type_check(const EntireMap& f, int max_iter, double tol,
                                       double domain_radius = 0.0);

// `cosh`, `scaled-cosh:lambda=0.1`, `scaled-exp:lambda=0.2re+0im`
EntireMap parse_map_spec(const std::string& spec);
std::string format_map_spec(const EntireMap& f);
std::string format_scale(cplx lambda);
cplx parse_scale(const std::string& text);

}  // namespace crinifer
