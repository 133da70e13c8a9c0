#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "crinifer/semiconjugacy.hpp"

namespace crinifer {

struct ConfigError : Error {
  using Error::Error;
};

struct AddressGenerator {
  int period = 1;
  std::vector<Symbol> symbols;
};

struct PhiSettings {
  int stages = 12;
  int samples = 50;
  double label_lo = 4.6;
  double label_hi = 400.0;
};

struct RenderSpec {
  double re_min = -4, re_max = 4, im_min = -4, im_max = 4;
  int width = 800, height = 800;

  void validate() const;
};

enum class InitialKind { Tails, RealAxis };

struct RunConfig {
  std::string map = "cosh";
  double model_lambda = 0.1;
  std::vector<std::string> addresses;
  std::optional<AddressGenerator> generator;
  PullbackConfig trace;  // model hairs
  PullbackConfig tails;  // initial rays of the target
  InitialKind initial = InitialKind::Tails;
  int depth = 12;        // canonical-ray levels
  double core_radius = 2.0;
  std::string output = "crinifer-out";
  PhiSettings phi;
  RenderSpec render;
  std::vector<cplx> fiber_points{{0.0, 0.0}};

  RunConfig();
  static RunConfig parse(const std::string& json_text);
  static RunConfig load(const std::filesystem::path& p);
  std::string serialize() const;

  EntireMap target() const { return parse_map_spec(map); }
  EntireMap model() const;
  // Literal addresses plus the generator output, in alphabet order, deduplicated.
  std::vector<ExternalAddress> address_list() const;
};

struct TraceResult {
  std::vector<std::string> files;  // relative to the output directory
  std::vector<std::string> failures;
};

// Model hairs, signed canonical rays, and manifest.json with checksums.
TraceResult cmd_trace(const RunConfig& cfg, std::ostream& log);

PhiApprox cmd_phi(const RunConfig& cfg, std::ostream& log);

// Returns the SVG path; warns on an empty viewport.
std::filesystem::path cmd_render(const RunConfig& cfg, std::ostream& log);

// Prints one line per check; true iff all pass.
bool cmd_check(const RunConfig& cfg, std::ostream& log);

struct RenderedRay {
  std::string label;
  Sign sign = Sign::Plus;
  std::vector<cplx> points;
  std::vector<cplx> splits;
  std::optional<cplx> endpoint;
};

std::string render_svg(const std::vector<RenderedRay>& rays, const RenderSpec& spec, bool* empty = nullptr);

std::string canonical_ray_to_json(const CanonicalRay& r);
RenderedRay rendered_ray_from_json(const std::string& text);
std::string phi_report_to_json(const PhiApprox& phi, const Residual& res);

// Verifies manifest checksums under dir; throws ChecksumMismatch or IoError.
void verify_manifest(const std::filesystem::path& dir);

}  // namespace crinifer
