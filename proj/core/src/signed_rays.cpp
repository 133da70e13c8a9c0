#include "crinifer/signed_rays.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "crinifer/parallel.hpp"

namespace crinifer {

namespace {

constexpr double kCvTol = 1e-12;
constexpr double kApproach = 1e-7;

std::vector<cplx> critical_values(const EntireMap& f) {
  if (f.family == Family::ScaledExp) return {};
  return singular_values(f);
}

std::optional<cplx> matching_cv(const std::vector<cplx>& cvs, cplx w) {
  for (cplx v : cvs)
    if (std::abs(w - v) <= kCvTol * std::max(1.0, std::abs(v))) return v;
  return std::nullopt;
}

// Arclength parameter: remaining length to the tip, shifted to stay positive.
void assign_arclength(RayTail& r) {
  double acc = 1.0;
  for (std::size_t i = r.points.size(); i-- > 0;) {
    if (i + 1 < r.points.size()) acc += std::abs(r.points[i + 1].z - r.points[i].z);
    r.points[i].t = acc;
  }
}

class Walker {
 public:
  Walker(const Alphabet& a, const ExtensionOptions& opt, Sign sign, int level, std::vector<LevelVertex>& out,
         std::vector<SplitEvent>& splits, std::optional<Sign>& used)
      : a_(a), opt_(opt), sign_(sign), level_(level), out_(out), splits_(splits), used_(used) {}

  cplx step(cplx za, cplx wa, cplx wb, int depth) const {
    if (wa == wb) return za;
    cplx d = derivative(a_.map(), za);
    cplx guess = std::abs(d) > 1e-300 ? za + (wb - wa) / d : za;
    auto c = a_.preimages_near(wb, guess, 2);
    double d0 = std::abs(c[0] - guess), d1 = std::abs(c[1] - guess);
    if (d0 < 0.25 * d1 && d0 < 0.5 * std::abs(c[0] - za) + 1e-12 * (1 + std::abs(za))) return c[0];
    if (depth > 30) throw AmbiguousContinuation(wb);
    cplx wm = 0.5 * (wa + wb);
    cplx zm = step(za, wa, wm, depth + 1);
    return step(zm, wm, wb, depth + 1);
  }

  void follow(cplx wb) {
    cplx za = out_.back().z, wa = out_.back().w;
    cplx zb = step(za, wa, wb, 0);
    follow_rec(za, wa, zb, wb, 0);
  }

  void approach_critical(cplx v, int image_crit) {
    cplx wa = out_.back().w;
    double len = std::abs(wa - v);
    cplx w_near = v + (wa - v) * (std::min(kApproach, 0.01 * len) / len);
    follow(w_near);
    auto c = a_.nearest_critical_point(out_.back().z);
    if (!c || std::abs(eval(a_.map(), *c) - v) > 1e-9 * std::max(1.0, std::abs(v)) ||
        std::abs(*c - out_.back().z) > 1e-2)
      throw AmbiguousContinuation(v);
    int deg = local_degree(a_.map(), *c);
    if (deg > 2) throw Error("local degree " + std::to_string(deg) + " > 2 at a split");
    int iter = image_crit > 0 ? image_crit + 1 : 1;
    out_.push_back({*c, v, iter, true});
    splits_.push_back({*c, level_, deg, iter});
  }

  void depart_critical(cplx target) {
    const LevelVertex& cv = out_.back();
    cplx c = cv.z, v = cv.w;
    double len = std::abs(target - v);
    cplx w_eps = v + (target - v) * (std::min(kApproach, 0.01 * len) / len);
    auto cand = a_.preimages_near(w_eps, c, 2);
    cplx back = out_.size() >= 2 ? out_[out_.size() - 2].z - c : cplx{1.0, 0.0};
    double a0 = std::arg((cand[0] - c) / back), a1 = std::arg((cand[1] - c) / back);
    if (std::abs(std::sin(a0)) < 1e-3 || std::abs(std::sin(a1)) < 1e-3 || (a0 > 0) == (a1 > 0))
      throw AmbiguousContinuation(w_eps);
    cplx plus = a0 > 0 ? cand[0] : cand[1];
    cplx minus = a0 > 0 ? cand[1] : cand[0];
    out_.push_back({sign_ == Sign::Plus ? plus : minus, w_eps, 0, true});
    used_ = sign_;
  }

 private:
  void follow_rec(cplx za, cplx wa, cplx zb, cplx wb, int lvl) {
    cplx wm = 0.5 * (wa + wb);
    cplx zm = step(za, wa, wm, 0);
    bool split = std::abs(zb - za) > opt_.max_gap || distance_to_segment(zm, za, zb) > opt_.refine_tol;
    if (split && lvl < 40) {
      follow_rec(za, wa, zm, wm, lvl + 1);
      follow_rec(zm, wm, zb, wb, lvl + 1);
    } else {
      out_.push_back({zb, wb, 0, true});
    }
  }

  const Alphabet& a_;
  const ExtensionOptions& opt_;
  Sign sign_;
  int level_;
  std::vector<LevelVertex>& out_;
  std::vector<SplitEvent>& splits_;
  std::optional<Sign>& used_;
};

}  // namespace

std::vector<cplx> CanonicalRay::tips() const {
  std::vector<cplx> t;
  for (const auto& l : levels) t.push_back(l.points.back().z);
  return t;
}

const RayTail& InitialConfiguration::at(const ExternalAddress& a) const {
  auto it = rays.find(a.key());
  if (it == rays.end()) throw Error("no initial ray for " + a.str());
  return it->second;
}

double check_forward_invariance(const EntireMap& f, const InitialConfiguration& cfg, double tol) {
  double worst_all = 0.0;
  for (const auto& [key, ray] : cfg.rays) {
    const RayTail& img = cfg.at(ray.address.shift());
    const auto poly = img.polyline();
    double tmax = img.points.front().t, tmin = img.points.back().t;
    double worst = 0.0;
    for (const auto& p : ray.points) {
      double ft = cfg.label_map(p.t);
      if (ft > tmax || ft < tmin) continue;
      auto w = try_eval(f, p.z);
      if (!w) continue;
      auto it = std::lower_bound(img.points.begin(), img.points.end(), ft,
                                 [](const RayPoint& q, double v) { return q.t > v; });
      std::ptrdiff_t i = it - img.points.begin();
      std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - 3);
      std::ptrdiff_t hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(poly.size()) - 1, i + 3);
      double d = lo == hi ? std::abs(*w - poly[lo]) : INFINITY;
      for (std::ptrdiff_t j = lo; j < hi; ++j) d = std::min(d, distance_to_segment(*w, poly[j], poly[j + 1]));
      worst = std::max(worst, d);
    }
    if (worst > tol) throw InvarianceError(ray.address.str(), worst);
    worst_all = std::max(worst_all, worst);
  }
  return worst_all;
}

namespace {

std::vector<ExternalAddress> shift_closure(const std::vector<ExternalAddress>& addresses) {
  std::vector<ExternalAddress> out;
  std::set<std::string> seen;
  for (const auto& a0 : addresses) {
    ExternalAddress a = a0.normalized();
    while (seen.insert(a.key()).second) {
      if (!a.periodic()) throw Error("initial configurations need eventually periodic addresses: " + a.str());
      out.push_back(a);
      a = a.shift().normalized();
    }
  }
  return out;
}

}  // namespace

InitialConfiguration initial_configuration_from_tails(const HairTracer& f_tails,
                                                      const std::vector<ExternalAddress>& addresses) {
  InitialConfiguration cfg;
  auto all = shift_closure(addresses);
  std::vector<RayTail> traced(all.size());
  parallel_for(all.size(), [&](std::size_t i) { traced[i] = f_tails.trace(all[i]); });
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (traced[i].points.empty()) throw Error("empty tail for " + all[i].str());
    cfg.rays[all[i].key()] = std::move(traced[i]);
  }
  HairTracer copy = f_tails;
  cfg.label_map = [copy](double t) { return copy.label_map(t); };
  cfg.label_inverse = [copy](double y) { return copy.label_inverse(y); };
  return cfg;
}

InitialConfiguration cosh_real_axis_configuration(const HairTracer& f_tails) {
  if (f_tails.map().family != Family::Cosh) throw Error("real-axis configuration needs plain cosh");
  auto R = ExternalAddress::parse("(R)");
  auto LR = ExternalAddress::parse("L.(R)");
  RayTail right = f_tails.trace(R);
  double t0 = right.points.back().t;
  for (int j = 1;; ++j) {
    double x = t0 - 0.05 * j;
    if (x <= 1e-12) break;
    right.points.push_back({x, {x, 0.0}, 0});
  }
  right.points.push_back({0.0, {0.0, 0.0}, 0});
  RayTail left;
  left.address = LR;
  left.depth = right.depth;
  for (const auto& p : right.points) left.points.push_back({p.t, {-p.z.real(), 0.0}, p.pullbacks});
  InitialConfiguration cfg;
  cfg.rays[R.key()] = right;
  cfg.rays[LR.key()] = left;
  HairTracer copy = f_tails;
  cfg.label_map = [copy](double t) { return copy.label_map(t); };
  cfg.label_inverse = [copy](double y) { return copy.label_inverse(y); };
  return cfg;
}

namespace {

// Drops pulled vertices lying within tol of the chord of their kept neighbours.
std::vector<LevelVertex> decimate(const std::vector<LevelVertex>& v, double tol, double max_gap) {
  if (v.size() < 3) return v;
  std::vector<bool> pinned(v.size(), false);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i].crit_iter > 0 || !v[i].pulled)
      for (std::size_t j = i > 0 ? i - 1 : 0; j <= std::min(v.size() - 1, i + 1); ++j) pinned[j] = true;
  pinned.front() = pinned.back() = true;
  std::vector<LevelVertex> out{v[0]};
  std::size_t anchor = 0;
  for (std::size_t j = 1; j < v.size(); ++j) {
    bool ok = !pinned[j - 1] && j - anchor <= 64 && std::abs(v[j].z - v[anchor].z) <= max_gap;
    for (std::size_t m = anchor + 1; ok && m < j; ++m) ok = distance_to_segment(v[m].z, v[anchor].z, v[j].z) <= tol;
    if (!ok && j - 1 > anchor) {
      out.push_back(v[j - 1]);
      anchor = j - 1;
    }
  }
  out.push_back(v.back());
  return out;
}

}  // namespace

CanonicalRay initial_canonical_ray(const SignedAddress& a, const RayTail& gamma0) {
  CanonicalRay r;
  r.signed_address = a;
  r.levels.push_back(gamma0);
  r.levels.back().address = a.address;
  std::vector<LevelVertex> det;
  for (const auto& p : gamma0.points) det.push_back({p.z, {NAN, NAN}, 0, false});
  r.detail.push_back(std::move(det));
  return r;
}

CanonicalRay extend_one_level(const Alphabet& a, const CanonicalRay& ray, const CanonicalRay& shifted,
                              const InitialConfiguration& init, const ExtensionOptions& opt) {
  const int n = ray.top_level() + 1;
  if (shifted.top_level() < n - 1) throw Error("shifted ray lacks level " + std::to_string(n - 1));
  const ExternalAddress& s = ray.signed_address.address;
  const Symbol s0 = s.head();
  const auto& image = shifted.detail[n - 1];
  const RayTail& g0 = init.at(s);
  const RayTail& g0_shift = init.at(s.shift());
  const double t_cut = init.label_inverse(g0_shift.points.front().t);

  CanonicalRay out = ray;
  std::vector<LevelVertex> verts;
  for (const auto& p : g0.points) {
    if (!(p.t > t_cut * (1 + 1e-12))) break;
    auto w = try_eval(a.map(), p.z);
    verts.push_back({p.z, w ? *w : cplx{INFINITY, 0.0}, 0, false});
  }

  std::vector<SplitEvent> splits;
  std::optional<Sign> used;
  std::vector<LevelVertex> pulled;
  const auto cvs = critical_values(a.map());
  Walker walk(a, opt, ray.signed_address.sign, n, pulled, splits, used);

  pulled.push_back({a.invert(s0, image[0].z), image[0].z, image[0].crit_iter ? image[0].crit_iter + 1 : 0, true});
  bool at_crit = false;
  for (std::size_t i = 0; i + 1 < image.size(); ++i) {
    cplx wa = pulled.back().w, wb = image[i + 1].z;
    // interior critical values on [wa, wb]
    std::vector<std::pair<double, cplx>> inner;
    cplx d = wb - wa;
    for (cplx v : cvs) {
      double tol = kCvTol * std::max(1.0, std::abs(v));
      if (std::abs(v - wa) <= tol || std::abs(v - wb) <= tol) continue;
      if (distance_to_segment(v, wa, wb) <= tol) inner.push_back({((v - wa) * std::conj(d)).real() / std::norm(d), v});
    }
    std::sort(inner.begin(), inner.end(), [](auto& x, auto& y) { return x.first < y.first; });
    for (const auto& [u, v] : inner) {
      if (at_crit) walk.depart_critical(v);
      walk.approach_critical(v, 0);
      at_crit = true;
    }
    auto cv_end = matching_cv(cvs, wb);
    if (at_crit) walk.depart_critical(cv_end ? *cv_end : wb);
    at_crit = false;
    if (cv_end) {
      walk.approach_critical(*cv_end, image[i + 1].crit_iter);
      at_crit = true;
    } else {
      walk.follow(wb);
      if (image[i + 1].crit_iter > 0) {
        auto& last = pulled.back();
        last.crit_iter = image[i + 1].crit_iter + 1;
        splits.push_back({last.z, n, 2, last.crit_iter});
      }
    }
  }

  pulled = decimate(pulled, opt.refine_tol, opt.max_gap);
  verts.insert(verts.end(), pulled.begin(), pulled.end());
  RayTail level;
  level.address = s;
  level.depth = n;
  for (const auto& v : verts) level.points.push_back({0.0, v.z, n});
  assign_arclength(level);

  out.levels.push_back(std::move(level));
  out.detail.push_back(std::move(verts));
  for (const auto& e : splits) {
    bool dup = false;
    for (const auto& o : out.split_events) dup = dup || std::abs(o.point - e.point) < 1e-9;
    if (!dup) out.split_events.push_back(e);
  }
  out.chain.push_back({s0, used});
  return out;
}

cplx pull_back_point(const Alphabet& a, const CanonicalRay& ray, int level, cplx w) {
  if (level < 1 || level > ray.top_level()) throw Error("level " + std::to_string(level) + " unavailable");
  const auto& det = ray.detail[level];
  double best = INFINITY;
  std::size_t bi = 0;
  for (std::size_t i = 0; i + 1 < det.size(); ++i) {
    if (!det[i].pulled || !det[i + 1].pulled) continue;
    double d = distance_to_segment(w, det[i].w, det[i + 1].w);
    if (d < best) {
      best = d;
      bi = i;
    }
  }
  double scale = std::max(1.0, std::abs(w));
  if (best <= 1e-6 * scale) {
    cplx wa = det[bi].w, wb = det[bi + 1].w, dw = wb - wa;
    double u = std::norm(dw) > 0 ? std::clamp(((w - wa) * std::conj(dw)).real() / std::norm(dw), 0.0, 1.0) : 0.0;
    cplx guess = det[bi].z + u * (det[bi + 1].z - det[bi].z);
    return a.preimages_near(w, guess, 1)[0];
  }
  if (a.in_W(w)) return a.invert(ray.signed_address.address.head(), w);
  throw BranchDomainError("pullback argument off the ray and outside W", w);
}

RayConfiguration::RayConfiguration(const Alphabet& f, InitialConfiguration init, ExtensionOptions opt)
    : alphabet_(f), init_(std::move(init)), opt_(opt) {
  for (const auto& [key, r] : init_.rays) {
    if (!init_.contains(r.address.shift())) throw Error("configuration not closed under shift at " + r.address.str());
    for (Sign sg : {Sign::Minus, Sign::Plus}) {
      SignedAddress sa{r.address.normalized(), sg};
      rays_[sa.key()] = initial_canonical_ray(sa, r);
    }
  }
}

void RayConfiguration::extend_to(int depth) {
  for (int n = depth_ + 1; n <= depth; ++n) {
    std::vector<std::string> keys;
    for (const auto& [k, r] : rays_) keys.push_back(k);
    std::vector<CanonicalRay> next(keys.size());
    parallel_for(keys.size(), [&](std::size_t i) {
      const CanonicalRay& r = rays_.at(keys[i]);
      SignedAddress sh{r.signed_address.address.shift(), r.signed_address.sign};
      next[i] = extend_one_level(alphabet_, r, rays_.at(sh.key()), init_, opt_);
    });
    for (std::size_t i = 0; i < keys.size(); ++i) rays_[keys[i]] = std::move(next[i]);
    depth_ = n;
  }
}

const CanonicalRay& RayConfiguration::ray(const SignedAddress& a) const {
  auto it = rays_.find(a.key());
  if (it == rays_.end()) throw Error("untracked signed address " + a.str());
  return it->second;
}

std::vector<const CanonicalRay*> RayConfiguration::all() const {
  std::vector<const CanonicalRay*> v;
  for (const auto& [k, r] : rays_) v.push_back(&r);
  return v;
}

std::vector<SignedAddress> signed_addresses_of(const RayConfiguration& cfg, cplx z, int depth, double tol) {
  std::vector<SignedAddress> out;
  for (const CanonicalRay* r : cfg.all()) {
    int lvl = std::min(depth, r->top_level());
    if (distance_to_polyline(z, r->level(lvl).polyline()) <= tol) out.push_back(r->signed_address);
  }
  if (out.empty()) throw Error("not in configuration at this depth");
  return out;
}

int count_formula(const EntireMap& f, cplx z, int depth) {
  if (depth < 1) throw Error("count_formula: depth must be >= 1");
  int prod = 2;
  cplx w = z;
  for (int j = 0; j < depth; ++j) {
    auto fw = try_eval(f, w);
    if (!fw) break;
    int d = local_degree(f, w);
    if (d > 1 && j == depth - 1) throw Undetermined("critical point at the truncation boundary");
    prod *= d;
    w = *fw;
  }
  return prod;
}

AgreementReport check_agreement_interval(const std::vector<const CanonicalRay*>& rays, int n) {
  AgreementReport rep;
  for (std::size_t i = 0; i < rays.size(); ++i) {
    for (std::size_t j = i + 1; j < rays.size(); ++j) {
      const auto& a = *rays[i];
      const auto& b = *rays[j];
      if (a.top_level() < n || b.top_level() < n) throw Error("rays not extended to level " + std::to_string(n));
      bool agree = true;
      for (int k = 0; k < n && agree; ++k) agree = a.signed_address.address.at(k) == b.signed_address.address.at(k);
      if (!agree) {
        ++rep.outside_interval;
        continue;
      }
      ++rep.pairs_checked;
      if (a.signed_address.sign == b.signed_address.sign) {
        for (int k = 0; k < n; ++k) {
          const auto& x = a.chain[k];
          const auto& y = b.chain[k];
          if (x.symbol != y.symbol || (x.split_sign && y.split_sign && *x.split_sign != *y.split_sign)) {
            rep.pass = false;
            rep.message = "branch chains of " + a.signed_address.str() + " and " + b.signed_address.str() +
                          " differ at level " + std::to_string(k + 1);
          }
        }
      } else if (a.signed_address.address == b.signed_address.address) {
        for (int k = 0; k < n; ++k)
          if (!(a.chain[k] == b.chain[k])) rep.differing_levels.push_back(k + 1);
      }
    }
  }
  return rep;
}

}  // namespace crinifer
