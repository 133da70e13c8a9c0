#include "crinifer/ray_tracer.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

namespace crinifer {

std::vector<cplx> RayTail::polyline() const {
  std::vector<cplx> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.z);
  return out;
}

cplx inverse_branch(const Alphabet& a, const Symbol& s, cplx w) { return a.invert(s, w); }

HairTracer::HairTracer(const Alphabet& alphabet, PullbackConfig cfg) : alphabet_(alphabet), cfg_(cfg) {
  if (cfg_.depth < 0) throw Error("depth must be >= 0");
  if (cfg_.samples < 1) throw Error("samples must be >= 1");
  if (!(cfg_.start_radius > alphabet_.spec().disc_radius)) throw Error("start_radius must exceed the tract threshold");
  lam_ = std::abs(map().lambda());
  // repelling fixed point of F, approached by backward iteration from the cap
  double y = cfg_.label_cap;
  for (int i = 0; i < 5000; ++i) {
    double x = label_inverse(y);
    if (!std::isfinite(x)) break;
    if (std::abs(x - y) < 1e-15 * y) {
      fixed_ = x;
      break;
    }
    y = x;
  }
}

double HairTracer::seed_angle(const Symbol& next) const {
  double b = alphabet_.tract_direction(next);
  double d = std::remainder(b - alphabet_.spec().delta_direction, kTwoPi);
  if (std::abs(d) < 1e-6) b += d >= 0 ? 1e-6 : -1e-6;
  return b;
}

double HairTracer::label_map(double t) const {
  return map().family == Family::ScaledExp ? lam_ * std::exp(t) : lam_ * std::cosh(t);
}

double HairTracer::label_inverse(double y) const {
  if (map().family == Family::ScaledExp) return y > 0 ? std::log(y / lam_) : NAN;
  return y >= lam_ ? std::acosh(y / lam_) : NAN;
}

int HairTracer::steps_to_cap(double t) const {
  int k = 0;
  while (t < cfg_.label_cap) {
    double nt = label_map(t);
    if (!(nt > t) || ++k > 100000) return INT_MAX;
    t = nt;
  }
  return k;
}

double HairTracer::tip_label(int depth) const {
  double y = cfg_.label_cap;
  for (int i = 0; i < depth; ++i) {
    double x = label_inverse(y);
    if (!std::isfinite(x) || x < cfg_.min_label) {
      y = cfg_.min_label;
      break;
    }
    y = x;
  }
  y = std::max(y, cfg_.min_label);
  for (int i = 0; i < 1000 && steps_to_cap(y) > depth; ++i) y = std::nextafter(y, INFINITY) * (1 + 1e-15);
  return y;
}

std::optional<RayPoint> HairTracer::point(const ExternalAddress& s, double t, int depth) const {
  if (t < cfg_.min_label) return std::nullopt;
  int m = steps_to_cap(t);
  if (m > depth) return std::nullopt;
  double y = t;
  for (int j = 0; j < m; ++j) y = label_map(y);
  // log F(y) without overflow
  double logw = map().family == Family::ScaledExp
                    ? std::log(lam_) + y
                    : std::log(lam_) + y + std::log1p(std::exp(-2.0 * y)) - std::log(2.0);
  const Alphabet& a = alphabet_;
  Symbol sm = s.at(m);
  if (!a.in_window(sm)) throw Error("symbol " + sm.str() + " outside the alphabet window");
  cplx z = a.invert_log(sm, logw, seed_angle(s.has(m + 1) ? s.at(m + 1) : sm));
  for (int j = m - 1; j >= 0; --j) {
    Symbol sj = s.at(j);
    if (!a.in_window(sj)) throw Error("symbol " + sj.str() + " outside the alphabet window");
    if (!a.in_W(z)) return std::nullopt;
    z = a.invert(sj, z);
  }
  return RayPoint{t, z, m + 1};
}

RayPoint HairTracer::point_or_throw(const ExternalAddress& s, double t, int depth) const {
  auto p = point(s, t, depth);
  if (!p) throw Error("label " + std::to_string(t) + " not reachable at depth " + std::to_string(depth));
  return *p;
}

double HairTracer::mid_label(double t1, double t2) const {
  if (fixed_ && t1 > *fixed_ && t2 > *fixed_) return *fixed_ + std::sqrt((t1 - *fixed_) * (t2 - *fixed_));
  return 0.5 * (t1 + t2);
}

double distance_to_segment(cplx p, cplx a, cplx b) {
  cplx d = b - a;
  double n = std::norm(d);
  if (n == 0.0) return std::abs(p - a);
  double u = std::clamp(((p - a) * std::conj(d)).real() / n, 0.0, 1.0);
  return std::abs(p - (a + u * d));
}

double distance_to_polyline(cplx p, const std::vector<cplx>& poly) {
  if (poly.empty()) return INFINITY;
  if (poly.size() == 1) return std::abs(p - poly[0]);
  double best = INFINITY;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) best = std::min(best, distance_to_segment(p, poly[i], poly[i + 1]));
  return best;
}

void HairTracer::refine(const ExternalAddress& s, int depth, const RayPoint& a, const RayPoint& b, int level,
                        std::vector<RayPoint>& out) const {
  if (level > 48) return;
  double tm = mid_label(a.t, b.t);
  if (!(tm < a.t && tm > b.t)) return;
  auto pm = point(s, tm, depth);
  if (!pm) return;
  bool split = std::abs(a.z - b.z) > cfg_.max_gap || distance_to_segment(pm->z, a.z, b.z) > cfg_.refine_tol;
  if (!split) return;
  refine(s, depth, a, *pm, level + 1, out);
  out.push_back(*pm);
  refine(s, depth, *pm, b, level + 1, out);
}

RayTail HairTracer::trace(const ExternalAddress& s) const { return trace(s, cfg_.depth); }

RayTail HairTracer::trace(const ExternalAddress& s, int depth) const {
  if (!s.periodic() && s.depth() < static_cast<std::size_t>(depth + 1))
    throw Error("address " + s.str() + " shorter than trace depth");
  RayTail ray;
  ray.address = s;
  ray.depth = depth;
  double tip = tip_label(depth);
  std::vector<double> labels;
  for (int j = 0;; ++j) {
    double t = cfg_.start_radius * std::exp(-double(j) / cfg_.samples);
    if (t <= tip) break;
    labels.push_back(t);
  }
  for (int d = 0; d <= depth; ++d) {
    double td = tip_label(d);
    if (td <= cfg_.start_radius) labels.push_back(td);
  }
  std::sort(labels.begin(), labels.end(), std::greater<>());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  std::vector<RayPoint> coarse;
  for (double t : labels)
    if (auto p = point(s, t, depth)) coarse.push_back(*p);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    if (i) refine(s, depth, coarse[i - 1], coarse[i], 0, ray.points);
    ray.points.push_back(coarse[i]);
  }
  return ray;
}

RayTail trace_ray_disjoint(const EntireMap& g, const ExternalAddress& address, const PullbackConfig& cfg) {
  HairTracer tr(Alphabet(g, DomainSpec::defaults(g)), cfg);
  return tr.trace(address);
}

DynamicsReport verify_ray_dynamics(const HairTracer& tracer, const RayTail& ray, const RayTail& shifted, double tol) {
  DynamicsReport rep;
  if (ray.points.empty() || shifted.points.empty()) {
    rep.message = "empty ray";
    return rep;
  }
  const auto poly = shifted.polyline();
  const double tmax = shifted.points.front().t, tmin = shifted.points.back().t;
  const EntireMap& f = tracer.map();
  for (const auto& p : ray.points) {
    double ft = tracer.label_map(p.t);
    if (ft > tmax || ft < tmin) continue;
    auto w = try_eval(f, p.z);
    if (!w) continue;
    // vertices are label-ordered, so only segments around label F(t) can be nearest
    auto it = std::lower_bound(shifted.points.begin(), shifted.points.end(), ft,
                               [](const RayPoint& q, double v) { return q.t > v; });
    std::ptrdiff_t i = it - shifted.points.begin();
    std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - 3);
    std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(poly.size()) - 1, i + 3);
    double d = INFINITY;
    for (std::ptrdiff_t j = lo; j < hi; ++j) d = std::min(d, distance_to_segment(*w, poly[j], poly[j + 1]));
    if (lo == hi) d = std::abs(*w - poly[lo]);
    ++rep.checked;
    if (!rep.worst_point || d > rep.worst_distance) {
      rep.worst_distance = d;
      rep.worst_point = p;
    }
  }
  // far half: forward images gain modulus
  rep.escape_monotone = true;
  double tsplit = std::sqrt(ray.points.front().t * ray.points.back().t);
  for (const auto& p : ray.points) {
    if (p.t < tsplit) continue;
    auto w = try_eval(f, p.z);
    if (w && !(std::abs(*w) > std::abs(p.z))) rep.escape_monotone = false;
  }
  if (std::abs(ray.points.front().z) <= tracer.alphabet().spec().disc_radius) rep.escape_monotone = false;
  if (rep.checked == 0) {
    rep.message = "no forward images inside the shifted ray's range";
    return rep;
  }
  rep.pass = rep.worst_distance < tol && rep.escape_monotone;
  if (!rep.pass)
    rep.message = rep.escape_monotone ? "forward image leaves the shifted ray" : "moduli not eventually increasing";
  return rep;
}

DynamicsReport verify_ray_dynamics(const EntireMap& f, const RayTail& ray, const RayTail& shifted, double tol) {
  PullbackConfig cfg;
  cfg.depth = ray.depth;
  HairTracer tr(Alphabet(f, DomainSpec::defaults(f)), cfg);
  return verify_ray_dynamics(tr, ray, shifted, tol);
}

std::vector<cplx> tips_by_depth(const RayTail& ray) {
  std::vector<cplx> tips(ray.depth + 1);
  std::vector<double> best(ray.depth + 1, INFINITY);
  std::vector<bool> have(ray.depth + 1, false);
  for (const auto& p : ray.points) {
    int j = p.pullbacks - 1;
    if (j < 0 || j > ray.depth) continue;
    if (p.t < best[j]) {
      best[j] = p.t;
      tips[j] = p.z;
      have[j] = true;
    }
  }
  std::vector<cplx> out;
  for (int j = 0; j <= ray.depth && have[j]; ++j) out.push_back(tips[j]);
  return out;
}

EndpointEstimate endpoint_from_tips(const std::vector<cplx>& tips, double tol) {
  EndpointEstimate e;
  if (tips.empty()) return e;
  e.value = tips.back();
  if (tips.size() < 2) return e;
  e.last_increment = std::abs(tips.back() - tips[tips.size() - 2]);
  if (tips.size() < 4) return e;
  bool ok = true;
  for (std::size_t i = tips.size() - 3; i < tips.size(); ++i) ok = ok && std::abs(tips[i] - tips[i - 1]) < tol;
  e.converged = ok;
  return e;
}

EndpointEstimate endpoint_estimate(const RayTail& ray, double tol) {
  if (ray.depth < 2) {
    EndpointEstimate e;
    if (!ray.points.empty()) e.value = ray.points.back().z;
    return e;
  }
  return endpoint_from_tips(tips_by_depth(ray), tol);
}

}  // namespace crinifer
