#include "crinifer/semiconjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "crinifer/parallel.hpp"

namespace crinifer {

MetricSurrogate::MetricSurrogate(double core_radius) : k_(core_radius) {
  if (!(core_radius > 0)) throw Error("core radius must be positive");
}

double MetricSurrogate::density(cplx z) const {
  double r = std::abs(z);
  if (!(r > k_)) throw MetricDomainError("point inside the core disc");
  return 1.0 / (r * std::log(r / k_));
}

double MetricSurrogate::radial(double r0, double r1) const {
  return std::abs(std::log(std::log(r1 / k_)) - std::log(std::log(r0 / k_)));
}

double MetricSurrogate::arc(double r, double dtheta) const { return std::abs(dtheta) / std::log(r / k_); }

double MetricSurrogate::segment_length(cplx a, cplx b) const {
  if (distance_to_segment(0.0, a, b) <= k_) return INFINITY;
  cplx d = b - a;
  double len = std::abs(d);
  auto g = [&](double s) { return density(a + s * d) * len; };
  std::function<double(double, double, double, double, double, double, int)> simpson =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int depth) {
        double mid = 0.5 * (lo + hi);
        double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        double flm = g(lm), frm = g(rm);
        double left = (mid - lo) / 6 * (flo + 4 * flm + fmid);
        double right = (hi - mid) / 6 * (fmid + 4 * frm + fhi);
        double delta = left + right - whole;
        if (depth > 40 || std::abs(delta) <= 1e-13 * std::abs(left + right)) return left + right + delta / 15;
        return simpson(lo, mid, flo, flm, fmid, left, depth + 1) + simpson(mid, hi, fmid, frm, fhi, right, depth + 1);
      };
  double f0 = g(0), f1 = g(0.5), f2 = g(1);
  return simpson(0, 1, f0, f1, f2, (f0 + 4 * f1 + f2) / 6, 0);
}

double MetricSurrogate::distance(cplx a, cplx b) const {
  double ra = std::abs(a), rb = std::abs(b);
  if (!(ra > k_) || !(rb > k_)) throw MetricDomainError("point inside the core disc");
  if (a == b) return 0.0;
  double dt = std::abs(std::arg(b / a));
  double via_a = arc(ra, dt) + radial(ra, rb);
  double via_b = radial(ra, rb) + arc(rb, dt);
  return std::min({segment_length(a, b), via_a, via_b});
}

double MetricSurrogate::expansion(const EntireMap& f, cplx z) const {
  if (!(std::abs(z) > k_)) throw MetricDomainError("|z| within the core radius");
  cplx w = eval(f, z);
  if (!(std::abs(w) > k_)) throw MetricDomainError("|f(z)| within the core radius");
  return std::abs(derivative(f, z)) * density(w) / density(z);
}

ThetaMap::ThetaMap(const ModelStore& store, const HairTracer& f_tails, const InitialConfiguration& rays_f)
    : store_(&store), f_(f_tails), rays_(&rays_f), t_min_f_(f_tails.config().min_label) {
  for (const auto& a : store.addresses())
    if (!rays_f.contains(a)) throw Error("unpaired address " + a.str());
  for (const auto& [key, h] : store.hairs())
    for (const auto& p : h.points)
      if (!(tau(p.t) >= t_min_f_)) validity_radius_ = std::max(validity_radius_, std::abs(p.z));
  m_ = fit_annulus(validity_radius_);
}

double ThetaMap::tau(double t) const {
  const HairTracer& g = store_->tracer();
  double cap = g.config().label_cap;
  double y = t;
  int n = 0;
  while (y < cap) {
    double ny = g.label_map(y);
    if (!(ny > y) || ++n > 10000) return NAN;
    y = ny;
  }
  double x = y + std::log(std::abs(g.map().lambda()) / std::abs(f_.map().lambda()));
  for (int j = 0; j < n; ++j) {
    x = f_.label_inverse(x);
    if (!(x >= t_min_f_)) return NAN;
  }
  return x;
}

cplx ThetaMap::operator()(const ModelPoint& x) const {
  double tf = tau(x.t);
  const RayTail& tail = rays_->at(x.address);
  if (!(tf >= t_min_f_)) return tail.points.back().z;
  return f_.point_or_throw(x.address, tf, tail.depth).z;
}

double ThetaMap::fit_annulus(double min_radius) const {
  double m = 1.0;
  for (const auto& [key, h] : store_->hairs())
    for (const auto& p : h.points) {
      if (std::abs(p.z) < min_radius || !(tau(p.t) >= t_min_f_)) continue;
      cplx w = (*this)({h.address, p.t, Sign::Plus});
      double q = std::abs(w) / std::abs(p.z);
      m = std::max({m, q, 1.0 / q});
    }
  return m;
}

double ThetaMap::commutation_defect(const MetricSurrogate& metric) const {
  double worst = 0.0;
  const EntireMap& f = f_.map();
  for (const auto& [key, h] : store_->hairs()) {
    ExternalAddress sh = h.address.shift();
    const RayTail& img = store_->hair(sh);
    for (const auto& p : h.points) {
      if (std::abs(p.z) <= validity_radius_) continue;
      double ft = store_->tracer().label_map(p.t);
      if (ft > img.points.front().t) continue;
      cplx a = (*this)({sh, ft, Sign::Plus});
      auto b = try_eval(f, (*this)({h.address, p.t, Sign::Plus}));
      if (!b) continue;
      worst = std::max(worst, metric.distance(a, *b));
    }
  }
  return worst;
}

ThetaMap build_theta(const EntireMap& f, const ModelStore& store, const HairTracer& f_tails,
                     const InitialConfiguration& rays_f) {
  if (!(f_tails.map().family == f.family && f_tails.map().scale == f.scale))
    throw Error("f tails traced for a different map");
  return ThetaMap(store, f_tails, rays_f);
}

cplx phi_stage(const RayConfiguration& rays, const ThetaMap& theta, const ModelStore& store, const ModelPoint& x,
               int n) {
  if (n < 0) throw Error("stage must be >= 0");
  ModelPoint y = x;
  std::vector<ExternalAddress> orbit{x.address};
  for (int j = 0; j < n; ++j) {
    y = model_map(store, y);
    orbit.push_back(y.address);
  }
  cplx w = theta(y);
  for (int j = n - 1; j >= 0; --j) {
    int level = n - j;
    SignedAddress sa{orbit[j], x.sign};
    if (!rays.contains(sa) || rays.ray(sa).top_level() < level)
      throw Error("branch chain unavailable at level " + std::to_string(level) + " for " + sa.str());
    w = pull_back_point(rays.alphabet(), rays.ray(sa), level, w);
  }
  return w;
}

PhiApprox cauchy_report(const RayConfiguration& rays, const ThetaMap& theta, const ModelStore& store,
                        const std::vector<ModelPoint>& sample, int N, const MetricSurrogate& metric) {
  if (N < 3) throw Error("cauchy_report needs N >= 3");
  PhiApprox out;
  out.stage = N;
  const EntireMap& f = rays.alphabet().map();
  struct Row {
    PhiSample s;
    double fe = 0.0;
    double mu = 0.0;
    std::string error;
  };
  std::vector<Row> rows(sample.size());
  parallel_for(sample.size(), [&](std::size_t i) {
    Row& r = rows[i];
    r.s.point = sample[i];
    try {
      for (int n = 0; n <= N; ++n) r.s.values.push_back(phi_stage(rays, theta, store, sample[i], n));
      ModelPoint gx = model_map(store, sample[i]);
      for (int n = 0; n < N; ++n) {
        cplx lhs = eval(f, r.s.values[n + 1]);
        cplx rhs = phi_stage(rays, theta, store, gx, n);
        r.fe = std::max(r.fe, std::abs(lhs - rhs));
      }
      r.mu = metric.distance(project(store, sample[i]), r.s.values[0]);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });
  out.gaps.assign(N, 0.0);
  for (auto& r : rows) {
    if (!r.error.empty()) {
      out.complete = false;
      if (out.error.empty()) out.error = r.error;
      continue;
    }
    for (int n = 0; n < N; ++n) out.gaps[n] = std::max(out.gaps[n], metric.distance(r.s.values[n + 1], r.s.values[n]));
    out.functional_residual = std::max(out.functional_residual, r.fe);
    out.mu_hat = std::max(out.mu_hat, r.mu);
    out.samples.push_back(std::move(r.s));
  }
  out.mu_hat = std::max(out.mu_hat, out.gaps[0]);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int n = 0; n < N; ++n) {
    if (!(out.gaps[n] > 0)) continue;
    double y = std::log(out.gaps[n]);
    sx += n;
    sy += y;
    sxx += double(n) * n;
    sxy += n * y;
    ++m;
  }
  if (m >= 2) out.fitted_ratio = std::exp(-(m * sxy - sx * sy) / (m * sxx - sx * sx));
  return out;
}

Residual semiconjugacy_residual(const PhiApprox& phi) {
  Residual r;
  r.finite_stage = phi.functional_residual;
  double last = phi.gaps.empty() ? INFINITY : phi.gaps.back();
  r.limit_bound = phi.fitted_ratio > 1 ? last / (phi.fitted_ratio - 1) : INFINITY;
  return r;
}

FiberReport fiber_count_check(const EntireMap& f, const RayConfiguration& rays, cplx z, int depth) {
  FiberReport rep;
  try {
    rep.count = static_cast<int>(signed_addresses_of(rays, z, depth).size());
  } catch (const Error& e) {
    rep.message = e.what();
    return rep;
  }
  try {
    rep.formula = count_formula(f, z, depth);
  } catch (const Undetermined&) {
    rep.undetermined = true;
  }
  cplx w = z;
  rep.max_degree = 1;
  for (int j = 0; j < depth; ++j) {
    auto fw = try_eval(f, w);
    if (!fw) break;
    int d = local_degree(f, w);
    if (d > 1) {
      ++rep.critical_visits;
      rep.max_degree = std::max(rep.max_degree, d);
    }
    w = *fw;
  }
  rep.max_degree = std::max(rep.max_degree, 2);
  rep.bound = 2;
  for (int i = 0; i < rep.critical_visits; ++i) rep.bound *= rep.max_degree;
  rep.pass = rep.count <= rep.bound && (rep.undetermined || rep.count == rep.formula);
  if (!rep.pass)
    rep.message = "count " + std::to_string(rep.count) + ", formula " + std::to_string(rep.formula) + ", bound " +
                  std::to_string(rep.bound);
  return rep;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    default: return "inconclusive";
  }
}

LandingReport landing_check(const EntireMap& f, const CanonicalRay& ray, const CanonicalRay& shifted, double tol) {
  LandingReport rep;
  auto tips = ray.tips();
  rep.endpoint = tips.back();
  if (ray.top_level() < 5 || shifted.top_level() < 5) return rep;
  auto e = endpoint_from_tips(tips, tol);
  rep.last_gap = e.last_increment;
  if (!e.converged) return rep;
  auto w = try_eval(f, e.value);
  if (!w) return rep;
  rep.forward_defect = std::abs(*w - shifted.tips().back());
  rep.verdict = rep.forward_defect < tol ? Verdict::Pass : Verdict::Fail;
  return rep;
}

std::vector<ModelPoint> cauchy_samples(const ModelStore& store, const std::vector<ExternalAddress>& addresses,
                                       int count, int N, double y0, double y1) {
  if (addresses.empty() || count < 1) throw Error("cauchy_samples needs addresses and a positive count");
  std::vector<ModelPoint> out;
  const auto& tr = store.tracer();
  for (int i = 0; i < count; ++i) {
    double u = count > 1 ? double(i) / (count - 1) : 0.0;
    double t = y0 * std::pow(y1 / y0, u);
    for (int j = 0; j < N; ++j) t = tr.label_inverse(t);
    std::size_t ai = static_cast<std::size_t>(i) % addresses.size();
    Sign sg = (static_cast<std::size_t>(i) / addresses.size()) % 2 ? Sign::Minus : Sign::Plus;
    ModelPoint x{addresses[ai].normalized(), t, sg};
    if (!store.valid(x)) throw Error("sample off the traced range of " + x.address.str());
    out.push_back(x);
  }
  return out;
}

}  // namespace crinifer
