#include "crinifer/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "crinifer/io.hpp"
#include "crinifer/parallel.hpp"
#include "json.hpp"

namespace crinifer {

using nlohmann::json;

ModelStore::ModelStore(const EntireMap& g, const PullbackConfig& cfg, const std::vector<ExternalAddress>& addresses)
    : tracer_(Alphabet(g, DomainSpec::defaults(g)), cfg) {
  std::vector<ExternalAddress> all;
  std::set<std::string> seen;
  for (const auto& a0 : addresses) {
    ExternalAddress a = a0.normalized();
    while (seen.insert(a.key()).second) {
      if (!a.periodic()) throw Error("model hairs need eventually periodic addresses: " + a.str());
      all.push_back(a);
      a = a.shift().normalized();
    }
  }
  std::vector<RayTail> traced(all.size());
  parallel_for(all.size(), [&](std::size_t i) { traced[i] = tracer_.trace(all[i]); });
  for (std::size_t i = 0; i < all.size(); ++i) {
    landed_[all[i].key()] = endpoint_estimate(traced[i], 1e-8).converged;
    hairs_[all[i].key()] = std::move(traced[i]);
  }
}

std::vector<ExternalAddress> ModelStore::addresses() const {
  std::vector<ExternalAddress> out;
  for (const auto& [k, h] : hairs_) out.push_back(h.address);
  return out;
}

const RayTail& ModelStore::hair(const ExternalAddress& a) const {
  auto it = hairs_.find(a.key());
  if (it == hairs_.end()) throw Error("no model hair for " + a.str());
  return it->second;
}

bool ModelStore::valid(const ModelPoint& x) const {
  auto it = hairs_.find(x.address.key());
  if (it == hairs_.end() || it->second.points.empty()) return false;
  return x.t >= it->second.points.back().t && std::isfinite(x.t);
}

cplx ModelStore::position(const ModelPoint& x) const {
  if (!valid(x)) throw Error("model point off the traced range of " + x.address.str());
  return tracer_.point_or_throw(x.address, x.t, hair(x.address).depth).z;
}

void ModelStore::save(const std::filesystem::path& dir) const {
  json m;
  m["map"] = format_map_spec(map_g());
  m["precision"] = "double";
  const auto& c = tracer_.config();
  m["trace"] = {{"start_radius", c.start_radius}, {"samples", c.samples},     {"depth", c.depth},
                {"refine_tol", c.refine_tol},     {"max_gap", c.max_gap},     {"label_cap", c.label_cap},
                {"min_label", c.min_label}};
  json list = json::array();
  int idx = 0;
  for (const auto& [key, h] : hairs_) {
    char name[32];
    std::snprintf(name, sizeof name, "hair_%04d.json", idx++);
    std::string body = ray_tail_to_json(h);
    write_text_file(dir / name, body);
    list.push_back({{"address", key}, {"file", name}, {"sha256", sha256_hex(body)}, {"landed", landed_.at(key)}});
  }
  m["hairs"] = std::move(list);
  write_text_file(dir / "manifest.json", m.dump(1) + "\n");
}

ModelStore ModelStore::load(const std::filesystem::path& dir) {
  json m;
  try {
    m = json::parse(read_text_file(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed manifest: ") + e.what());
  }
  EntireMap g = parse_map_spec(m.at("map").get<std::string>());
  PullbackConfig c;
  const auto& t = m.at("trace");
  c.start_radius = t.at("start_radius");
  c.samples = t.at("samples");
  c.depth = t.at("depth");
  c.refine_tol = t.at("refine_tol");
  c.max_gap = t.at("max_gap");
  c.label_cap = t.at("label_cap");
  c.min_label = t.at("min_label");
  ModelStore s(HairTracer(Alphabet(g, DomainSpec::defaults(g)), c));
  for (const auto& e : m.at("hairs")) {
    std::string file = e.at("file");
    std::string body = read_text_file(dir / file);
    if (sha256_hex(body) != e.at("sha256").get<std::string>()) throw ChecksumMismatch(file);
    RayTail r = ray_tail_from_json(body);
    std::string key = e.at("address");
    s.landed_[key] = e.at("landed");
    s.hairs_[key] = std::move(r);
  }
  return s;
}

ModelPoint model_map(const ModelStore& store, const ModelPoint& x) {
  const auto& tr = store.tracer();
  ExternalAddress sh = x.address.shift().normalized();
  int depth = store.hair(x.address).depth;
  if (!store.contains(sh)) throw RangeExhausted("shifted hair " + sh.str() + " not traced", depth + 1);
  cplx z = store.position(x);
  auto w = try_eval(store.map_g(), z);
  if (!w) throw RangeExhausted("forward image overflows", depth);
  ModelPoint y{sh, tr.label_map(x.t), x.sign};
  cplx p = store.position(y);
  if (std::abs(p - *w) > 1e-6 * std::max(1.0, std::abs(*w)))
    throw RangeExhausted("forward image off the shifted hair", depth + 1);
  return y;
}

cplx project(const ModelStore& store, const ModelPoint& x) { return store.position(x); }

Ordering signed_compare(const Alphabet& a, const SignedAddress& x, const SignedAddress& y) {
  Ordering o = lex_compare(a, x.address, y.address);
  if (o != Ordering::Equal) return o;
  if (x.sign == y.sign) return Ordering::Equal;
  return x.sign == Sign::Minus ? Ordering::Less : Ordering::Greater;
}

bool cyclic_interval_member(const Alphabet& alph, const SignedAddress& a, const SignedAddress& x,
                            const SignedAddress& b) {
  auto less = [&](const SignedAddress& p, const SignedAddress& q) {
    Ordering o = signed_compare(alph, p, q);
    if (o == Ordering::Undetermined) throw Error("undetermined at available depth");
    return o == Ordering::Less;
  };
  if (a == x || x == b || a == b) throw Error("cyclic interval needs pairwise distinct arguments");
  return cyclically_between(a, x, b, less);
}

std::optional<double> crossing_angle(const std::vector<cplx>& poly, double r) {
  if (poly.empty() || std::abs(poly[0]) < r) return std::nullopt;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    double m0 = std::abs(poly[i]), m1 = std::abs(poly[i + 1]);
    if (m1 <= r) {
      double u = m0 > m1 ? (m0 - r) / (m0 - m1) : 0.0;
      return std::arg(poly[i] + u * (poly[i + 1] - poly[i]));
    }
  }
  return std::nullopt;
}

namespace {

bool ccw_between(double a, double b, double c) {
  double db = std::fmod(b - a + 4 * kPi, kTwoPi), dc = std::fmod(c - a + 4 * kPi, kTwoPi);
  return db < dc;
}

}  // namespace

OrderReport order_correspondence_check(const ModelStore& store, const std::vector<const CanonicalRay*>& rays_f,
                                       double radius) {
  OrderReport rep;
  struct Entry {
    ExternalAddress address;
    double g_angle;
    std::optional<double> f_angle;
  };
  std::vector<Entry> entries;
  auto add = [&](const ExternalAddress& a, const CanonicalRay* fr) {
    if (!store.contains(a)) {
      rep.skipped.push_back(a.str() + ": no model hair");
      return;
    }
    auto ga = crossing_angle(store.hair(a).polyline(), radius);
    if (!ga) {
      rep.skipped.push_back(a.str() + ": model hair does not reach the circle");
      return;
    }
    std::optional<double> fa;
    if (fr) {
      fa = crossing_angle(fr->level(fr->top_level()).polyline(), radius);
      if (!fa) {
        rep.skipped.push_back(a.str() + ": ray does not reach the circle");
        return;
      }
    }
    entries.push_back({a, *ga, fa});
  };
  if (rays_f.empty()) {
    for (const auto& a : store.addresses()) add(a, nullptr);
  } else {
    for (const auto* r : rays_f)
      if (r->signed_address.sign == Sign::Plus) add(r->signed_address.address, r);
  }
  const Alphabet& alph = store.tracer().alphabet();
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = i + 1; j < entries.size(); ++j)
      for (std::size_t k = j + 1; k < entries.size(); ++k) {
        const auto &a = entries[i], &b = entries[j], &c = entries[k];
        auto tie = [](double x, double y) { return std::abs(std::remainder(x - y, kTwoPi)) < 1e-12; };
        if (tie(a.g_angle, b.g_angle) || tie(b.g_angle, c.g_angle) || tie(a.g_angle, c.g_angle) ||
            (a.f_angle && (tie(*a.f_angle, *b.f_angle) || tie(*b.f_angle, *c.f_angle) || tie(*a.f_angle, *c.f_angle)))) {
          ++rep.unresolved;
          continue;
        }
        bool lex = cyclic_interval_member(alph, {a.address, Sign::Plus}, {b.address, Sign::Plus},
                                          {c.address, Sign::Plus});
        bool gg = ccw_between(a.g_angle, b.g_angle, c.g_angle);
        bool ff = a.f_angle ? ccw_between(*a.f_angle, *b.f_angle, *c.f_angle) : lex;
        ++rep.triples;
        if ((lex != gg || lex != ff) && rep.pass) {
          rep.pass = false;
          rep.disagreement = "(" + a.address.str() + ", " + b.address.str() + ", " + c.address.str() + ")";
        }
      }
  return rep;
}

bool divergence_criterion(const std::vector<cplx>& points, double threshold) {
  if (points.size() < 20) throw InsufficientEvidence("insufficient evidence: fewer than 20 samples");
  std::size_t n = points.size(), m = (n + 9) / 10;
  double tail_min = INFINITY, prev_min = INFINITY;
  for (std::size_t i = n - m; i < n; ++i) tail_min = std::min(tail_min, std::abs(points[i]));
  for (std::size_t i = n - 2 * m; i < n - m; ++i) prev_min = std::min(prev_min, std::abs(points[i]));
  return tail_min > threshold && tail_min > prev_min;
}

bool divergence_criterion(const ModelStore& store, const std::vector<ModelPoint>& xs, double threshold) {
  if (threshold <= 0) threshold = 10 * store.tracer().alphabet().spec().disc_radius;
  if (xs.size() < 20) throw InsufficientEvidence("insufficient evidence: fewer than 20 samples");
  std::vector<cplx> pts;
  for (const auto& x : xs) pts.push_back(project(store, x));
  return divergence_criterion(pts, threshold);
}

}  // namespace crinifer
