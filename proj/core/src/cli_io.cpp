#include "crinifer/cli_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <set>

#include "crinifer/io.hpp"
#include "json.hpp"

namespace crinifer {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json pullback_json(const PullbackConfig& c) {
  return {{"start_radius", c.start_radius}, {"samples", c.samples},     {"depth", c.depth},
          {"refine_tol", c.refine_tol},     {"max_gap", c.max_gap},     {"label_cap", c.label_cap},
          {"min_label", c.min_label}};
}

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [k, v] : j.items())
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }) == allowed.end())
      throw ConfigError("unknown key '" + k + "' in " + where);
}

PullbackConfig pullback_from(const json& j, PullbackConfig c, const std::string& where) {
  check_keys(j, {"start_radius", "samples", "depth", "refine_tol", "max_gap", "label_cap", "min_label"}, where);
  take(j, "start_radius", c.start_radius);
  take(j, "samples", c.samples);
  take(j, "depth", c.depth);
  take(j, "refine_tol", c.refine_tol);
  take(j, "max_gap", c.max_gap);
  take(j, "label_cap", c.label_cap);
  take(j, "min_label", c.min_label);
  return c;
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

struct Pipeline {
  EntireMap f, g;
  Alphabet af;
  ModelStore store;
  HairTracer tails;
  InitialConfiguration init;
};

InitialConfiguration make_initial(const RunConfig& cfg, const HairTracer& tails, const ModelStore& store) {
  if (cfg.initial == InitialKind::RealAxis) {
    auto init = cosh_real_axis_configuration(tails);
    for (const auto& a : store.addresses())
      if (!init.contains(a)) throw ConfigError("real-axis configuration only carries (R) and L.(R), not " + a.str());
    return init;
  }
  return initial_configuration_from_tails(tails, store.addresses());
}

std::string rel_name(const char* prefix, int idx) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s_%04d.json", prefix, idx);
  return buf;
}

std::vector<const CanonicalRay*> sorted_rays(const RayConfiguration& rc) {
  auto v = rc.all();
  std::sort(v.begin(), v.end(),
            [](const CanonicalRay* a, const CanonicalRay* b) { return a->signed_address.key() < b->signed_address.key(); });
  return v;
}

const char* initial_name(InitialKind k) { return k == InitialKind::RealAxis ? "real-axis" : "tails"; }

}  // namespace

void RenderSpec::validate() const {
  if (!(re_max > re_min) || !(im_max > im_min)) throw ConfigError("empty viewport");
  if (width < 1 || height < 1 || width > 16384 || height > 16384)
    throw ConfigError("resolution must be within 1..16384 px per side");
}

RunConfig::RunConfig() {
  trace.start_radius = 60;
  trace.depth = 20;
  tails.start_radius = 60;
  tails.depth = 6;
  tails.min_label = 2;
  tails.refine_tol = 1e-7;
}

EntireMap RunConfig::model() const {
  switch (target().family) {
    case Family::ScaledExp: return EntireMap::scaled_exp(model_lambda);
    case Family::ScaledSin: return EntireMap::scaled_sin(model_lambda);
    default: return EntireMap::scaled_cosh(model_lambda);
  }
}

RunConfig RunConfig::parse(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    check_keys(j,
               {"map", "model_lambda", "addresses", "generator", "trace", "tails", "initial", "depth", "core_radius",
                "output", "phi", "render", "fiber_points"},
               "config");
    take(j, "map", c.map);
    take(j, "model_lambda", c.model_lambda);
    take(j, "addresses", c.addresses);
    if (j.contains("generator")) {
      const auto& g = j.at("generator");
      check_keys(g, {"period", "symbols"}, "generator");
      AddressGenerator gen;
      take(g, "period", gen.period);
      for (const auto& s : g.at("symbols")) gen.symbols.push_back(Symbol::parse(s.get<std::string>()));
      c.generator = gen;
    }
    if (j.contains("trace")) c.trace = pullback_from(j.at("trace"), c.trace, "trace");
    if (j.contains("tails")) c.tails = pullback_from(j.at("tails"), c.tails, "tails");
    if (j.contains("initial")) {
      std::string k = j.at("initial");
      if (k == "tails") c.initial = InitialKind::Tails;
      else if (k == "real-axis") c.initial = InitialKind::RealAxis;
      else throw ConfigError("initial must be 'tails' or 'real-axis'");
    }
    take(j, "depth", c.depth);
    take(j, "core_radius", c.core_radius);
    take(j, "output", c.output);
    if (j.contains("phi")) {
      const auto& p = j.at("phi");
      check_keys(p, {"stages", "samples", "label_lo", "label_hi"}, "phi");
      take(p, "stages", c.phi.stages);
      take(p, "samples", c.phi.samples);
      take(p, "label_lo", c.phi.label_lo);
      take(p, "label_hi", c.phi.label_hi);
    }
    if (j.contains("render")) {
      const auto& r = j.at("render");
      check_keys(r, {"viewport", "width", "height"}, "render");
      if (r.contains("viewport")) {
        auto v = r.at("viewport").get<std::vector<double>>();
        if (v.size() != 4) throw ConfigError("viewport needs [re_min, re_max, im_min, im_max]");
        c.render.re_min = v[0];
        c.render.re_max = v[1];
        c.render.im_min = v[2];
        c.render.im_max = v[3];
      }
      take(r, "width", c.render.width);
      take(r, "height", c.render.height);
    }
    if (j.contains("fiber_points")) {
      c.fiber_points.clear();
      for (const auto& p : j.at("fiber_points")) c.fiber_points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  parse_map_spec(c.map);
  c.render.validate();
  if (c.depth < 0) throw ConfigError("depth must be >= 0");
  return c;
}

RunConfig RunConfig::load(const fs::path& p) { return parse(read_text_file(p)); }

std::string RunConfig::serialize() const {
  json j;
  j["map"] = map;
  j["model_lambda"] = model_lambda;
  j["addresses"] = addresses;
  if (generator) {
    json syms = json::array();
    for (const auto& s : generator->symbols) syms.push_back(s.str());
    j["generator"] = {{"period", generator->period}, {"symbols", syms}};
  }
  j["trace"] = pullback_json(trace);
  j["tails"] = pullback_json(tails);
  j["initial"] = initial_name(initial);
  j["depth"] = depth;
  j["core_radius"] = core_radius;
  j["output"] = output;
  j["phi"] = {{"stages", phi.stages}, {"samples", phi.samples}, {"label_lo", phi.label_lo}, {"label_hi", phi.label_hi}};
  j["render"] = {{"viewport", {render.re_min, render.re_max, render.im_min, render.im_max}},
                 {"width", render.width},
                 {"height", render.height}};
  json fp = json::array();
  for (cplx z : fiber_points) fp.push_back(cplx_json(z));
  j["fiber_points"] = fp;
  return j.dump(2) + "\n";
}

std::vector<ExternalAddress> RunConfig::address_list() const {
  std::vector<ExternalAddress> out;
  std::set<std::string> seen;
  auto add = [&](const ExternalAddress& a) {
    if (seen.insert(a.key()).second) out.push_back(a.normalized());
  };
  for (const auto& s : addresses) add(ExternalAddress::parse(s));
  if (generator)
    for (const auto& a : periodic_addresses(generator->symbols, generator->period)) add(a);
  EntireMap f = target();
  Alphabet alph(f, DomainSpec::defaults(f));
  for (const auto& a : out)
    for (std::size_t i = 0; i < a.prefix().size() + a.tail().size(); ++i)
      if (!alph.valid_symbol(a.at(i))) throw ConfigError("address " + a.str() + " uses a symbol outside the alphabet");
  std::stable_sort(out.begin(), out.end(), [&](const ExternalAddress& a, const ExternalAddress& b) {
    Ordering o = lex_compare(alph, a, b);
    if (o == Ordering::Undetermined) return a.key() < b.key();
    return o == Ordering::Less;
  });
  return out;
}

std::string canonical_ray_to_json(const CanonicalRay& r) {
  json j;
  j["address"] = r.signed_address.address.str();
  j["sign"] = std::string(1, sign_char(r.signed_address.sign));
  j["depth"] = r.top_level();
  json pts = json::array();
  const auto& top = r.level(r.top_level()).points;
  for (std::size_t i = 0; i < top.size(); ++i) {
    if (i > 0 && top[i].z == top[i - 1].z) continue;
    pts.push_back({top[i].t, top[i].z.real(), top[i].z.imag()});
  }
  j["points"] = std::move(pts);
  json splits = json::array();
  for (const auto& e : r.split_events)
    splits.push_back({{"re", e.point.real()}, {"im", e.point.imag()}, {"level", e.level},
                      {"local_degree", e.local_degree}, {"iterate", e.iterate}});
  j["split_events"] = std::move(splits);
  json tips = json::array();
  for (cplx z : r.tips()) tips.push_back(cplx_json(z));
  j["tips"] = std::move(tips);
  json chain = json::array();
  for (const auto& b : r.chain)
    chain.push_back({b.symbol.str(), b.split_sign ? json(std::string(1, sign_char(*b.split_sign))) : json(nullptr)});
  j["chain"] = std::move(chain);
  return j.dump(1) + "\n";
}

RenderedRay rendered_ray_from_json(const std::string& text) {
  RenderedRay r;
  try {
    json j = json::parse(text);
    r.sign = parse_sign(j.at("sign").get<std::string>());
    r.label = j.at("address").get<std::string>() + sign_char(r.sign);
    for (const auto& p : j.at("points")) r.points.push_back({p.at(1).get<double>(), p.at(2).get<double>()});
    for (const auto& e : j.at("split_events")) r.splits.push_back({e.at("re").get<double>(), e.at("im").get<double>()});
    const auto& tips = j.at("tips");
    if (!tips.empty()) r.endpoint = cplx{tips.back().at(0).get<double>(), tips.back().at(1).get<double>()};
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed canonical ray JSON: ") + e.what());
  }
  return r;
}

std::string phi_report_to_json(const PhiApprox& phi, const Residual& res) {
  json j;
  j["stage"] = phi.stage;
  j["gaps"] = phi.gaps;
  j["fitted_ratio"] = phi.fitted_ratio;
  j["mu_hat"] = phi.mu_hat;
  j["residual"] = res.total();
  j["finite_stage_residual"] = res.finite_stage;
  j["complete"] = phi.complete;
  if (!phi.complete) j["error"] = phi.error;
  json s = json::array();
  for (const auto& x : phi.samples) {
    cplx v = x.values.back();
    s.push_back({{"address", x.point.address.str()},
                 {"sign", std::string(1, sign_char(x.point.sign))},
                 {"t", x.point.t},
                 {"value_re", v.real()},
                 {"value_im", v.imag()}});
  }
  j["samples"] = std::move(s);
  return j.dump(1) + "\n";
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

}  // namespace

std::string render_svg(const std::vector<RenderedRay>& rays, const RenderSpec& spec, bool* empty) {
  spec.validate();
  const double W = spec.width, H = spec.height;
  auto px = [&](cplx z) {
    return std::pair<double, double>{(z.real() - spec.re_min) / (spec.re_max - spec.re_min) * W,
                                     (spec.im_max - z.imag()) / (spec.im_max - spec.im_min) * H};
  };
  auto inside = [&](cplx z, double margin) {
    double mx = margin * (spec.re_max - spec.re_min), my = margin * (spec.im_max - spec.im_min);
    return z.real() >= spec.re_min - mx && z.real() <= spec.re_max + mx && z.imag() >= spec.im_min - my &&
           z.imag() <= spec.im_max + my;
  };
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
         std::to_string(spec.height) + "\">\n";
  out += "<defs><clipPath id=\"view\"><rect x=\"0\" y=\"0\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
         std::to_string(spec.height) + "\"/></clipPath></defs>\n";
  out += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (spec.re_min < 0 && spec.re_max > 0) {
    auto [x, y] = px({0.0, 0.0});
    out += "<line x1=\"" + fmt2(x) + "\" y1=\"0\" x2=\"" + fmt2(x) + "\" y2=\"" + fmt2(H) +
           "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
  }
  if (spec.im_min < 0 && spec.im_max > 0) {
    auto [x, y] = px({0.0, 0.0});
    out += "<line x1=\"0\" y1=\"" + fmt2(y) + "\" x2=\"" + fmt2(W) + "\" y2=\"" + fmt2(y) +
           "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
  }
  bool any = false;
  std::map<std::string, int> colour;
  for (const auto& r : rays) {
    std::string base = r.label.substr(0, r.label.size() - 1);
    if (!colour.count(base)) colour[base] = static_cast<int>(colour.size());
  }
  out += "<g clip-path=\"url(#view)\" fill=\"none\">\n";
  for (const auto& r : rays) {
    const char* col = kPalette[colour[r.label.substr(0, r.label.size() - 1)] % 8];
    std::string style = r.sign == Sign::Plus ? "stroke-width=\"1.6\""
                                             : "stroke-width=\"1.0\" stroke-dasharray=\"4 3\"";
    std::vector<std::vector<cplx>> runs(1);
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      bool in = inside(r.points[i], 0.1) || (i > 0 && inside(r.points[i - 1], 0.1)) ||
                (i + 1 < r.points.size() && inside(r.points[i + 1], 0.1));
      if (in) {
        runs.back().push_back(r.points[i]);
      } else if (!runs.back().empty()) {
        runs.emplace_back();
      }
    }
    for (const auto& run : runs) {
      if (run.size() < 2) continue;
      std::string pts;
      std::pair<double, double> last{NAN, NAN};
      for (std::size_t i = 0; i < run.size(); ++i) {
        auto p = px(run[i]);
        if (i > 0 && i + 1 < run.size() && std::hypot(p.first - last.first, p.second - last.second) < 0.5) continue;
        pts += fmt2(p.first) + "," + fmt2(p.second) + " ";
        last = p;
      }
      pts.pop_back();
      out += "<polyline stroke=\"" + std::string(col) + "\" " + style + " points=\"" + pts + "\"/>\n";
      for (cplx z : run) any = any || inside(z, 0.0);
    }
  }
  out += "</g>\n<g clip-path=\"url(#view)\">\n";
  std::set<std::pair<std::string, std::string>> drawn;
  for (const auto& r : rays) {
    for (cplx s : r.splits) {
      if (!inside(s, 0.0)) continue;
      auto [x, y] = px(s);
      if (!drawn.insert({fmt2(x), fmt2(y)}).second) continue;
      out += "<circle cx=\"" + fmt2(x) + "\" cy=\"" + fmt2(y) + "\" r=\"4\" fill=\"none\" stroke=\"black\"/>\n";
      any = true;
    }
  }
  for (const auto& r : rays) {
    if (!r.endpoint || !inside(*r.endpoint, 0.0)) continue;
    auto [x, y] = px(*r.endpoint);
    const char* col = kPalette[colour[r.label.substr(0, r.label.size() - 1)] % 8];
    out += "<rect x=\"" + fmt2(x - 3) + "\" y=\"" + fmt2(y - 3) + "\" width=\"6\" height=\"6\" fill=\"" + col +
           "\"/>\n";
    any = true;
  }
  out += "</g>\n<g font-family=\"monospace\" font-size=\"11\">\n";
  int row = 0;
  for (const auto& r : rays) {
    const char* col = kPalette[colour[r.label.substr(0, r.label.size() - 1)] % 8];
    double y = 14 + 14 * row++;
    std::string dash = r.sign == Sign::Plus ? "" : " stroke-dasharray=\"4 3\"";
    out += "<line x1=\"6\" y1=\"" + fmt2(y - 4) + "\" x2=\"26\" y2=\"" + fmt2(y - 4) + "\" stroke=\"" + col +
           "\" stroke-width=\"1.6\"" + dash + "/>\n";
    out += "<text x=\"30\" y=\"" + fmt2(y) + "\">" + r.label + "</text>\n";
  }
  out += "</g>\n</svg>\n";
  if (empty) *empty = !any;
  return out;
}

void verify_manifest(const fs::path& dir) {
  fs::path mp = dir / "manifest.json";
  if (!fs::exists(mp)) throw IoError("no traces in " + dir.string() + "; run `crinifer trace --config <file>` first");
  json m;
  try {
    m = json::parse(read_text_file(mp));
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed manifest: ") + e.what());
  }
  for (const auto& e : m.at("files")) {
    std::string path = e.at("path");
    if (!fs::exists(dir / path)) throw IoError("missing trace file " + path + "; rerun `crinifer trace`");
    if (sha256_hex(read_text_file(dir / path)) != e.at("sha256").get<std::string>()) throw ChecksumMismatch(path);
  }
}

namespace {

struct Built {
  std::unique_ptr<ModelStore> store;
  std::unique_ptr<HairTracer> tails;
  std::unique_ptr<RayConfiguration> rays;
  std::vector<std::string> failures;
};

Built build(const RunConfig& cfg, int depth, std::ostream& log) {
  Built b;
  EntireMap f = cfg.target(), g = cfg.model();
  auto addrs = cfg.address_list();
  if (addrs.empty()) throw ConfigError("no addresses configured");
  b.store = std::make_unique<ModelStore>(g, cfg.trace, addrs);
  Alphabet af(f, DomainSpec::defaults(f));
  b.tails = std::make_unique<HairTracer>(af, cfg.tails);
  auto init = make_initial(cfg, *b.tails, *b.store);
  try {
    b.rays = std::make_unique<RayConfiguration>(af, init);
    b.rays->extend_to(depth);
  } catch (const Error& e) {
    log << "full configuration failed (" << e.what() << "); extending addresses one by one\n";
    InitialConfiguration kept;
    kept.label_map = init.label_map;
    kept.label_inverse = init.label_inverse;
    for (const auto& a : b.store->addresses()) {
      InitialConfiguration one;
      one.label_map = init.label_map;
      one.label_inverse = init.label_inverse;
      ExternalAddress x = a;
      while (!one.contains(x)) {
        one.rays[x.key()] = init.at(x);
        x = x.shift().normalized();
      }
      try {
        RayConfiguration rc(af, one);
        rc.extend_to(depth);
        for (const auto& [k, r] : one.rays) kept.rays[k] = r;
      } catch (const Error& e2) {
        b.failures.push_back(a.str() + ": " + e2.what());
      }
    }
    if (kept.rays.empty()) throw Error("every address failed to trace");
    b.rays = std::make_unique<RayConfiguration>(af, kept);
    b.rays->extend_to(depth);
  }
  return b;
}

}  // namespace

TraceResult cmd_trace(const RunConfig& cfg, std::ostream& log) {
  TraceResult res;
  fs::path out = cfg.output;
  Built b = build(cfg, cfg.depth, log);
  res.failures = b.failures;
  fs::remove_all(out / "model");
  fs::remove_all(out / "rays");
  b.store->save(out / "model");
  json files = json::array();
  int hi = 0;
  for (const auto& [key, h] : b.store->hairs()) {
    std::string rel = "model/" + rel_name("hair", hi++);
    files.push_back({{"path", rel}, {"kind", "hair"}, {"address", key}, {"sha256", sha256_hex(read_text_file(out / rel))}});
    res.files.push_back(rel);
  }
  files.push_back({{"path", "model/manifest.json"}, {"kind", "model-manifest"},
                   {"sha256", sha256_hex(read_text_file(out / "model/manifest.json"))}});
  int ri = 0;
  for (const auto* r : sorted_rays(*b.rays)) {
    std::string rel = "rays/" + rel_name("ray", ri++);
    std::string body = canonical_ray_to_json(*r);
    write_text_file(out / rel, body);
    files.push_back({{"path", rel},
                     {"kind", "ray"},
                     {"address", r->signed_address.address.str()},
                     {"sign", std::string(1, sign_char(r->signed_address.sign))},
                     {"sha256", sha256_hex(body)}});
    res.files.push_back(rel);
  }
  json m;
  m["map"] = format_map_spec(cfg.target());
  m["model"] = format_map_spec(cfg.model());
  m["precision"] = "double";
  m["depth"] = cfg.depth;
  m["initial"] = initial_name(cfg.initial);
  m["trace"] = pullback_json(cfg.trace);
  m["tails"] = pullback_json(cfg.tails);
  m["files"] = std::move(files);
  m["failures"] = res.failures;
  write_text_file(out / "manifest.json", m.dump(1) + "\n");
  log << "traced " << b.store->hairs().size() << " model hairs and " << ri << " signed canonical rays to depth "
      << cfg.depth << " in " << out.string() << "\n";
  for (const auto& f : res.failures) log << "failed: " << f << "\n";
  return res;
}

PhiApprox cmd_phi(const RunConfig& cfg, std::ostream& log) {
  fs::path out = cfg.output;
  verify_manifest(out);
  const int N = cfg.phi.stages;
  if (N > cfg.depth) throw ConfigError("phi stages exceed the traced depth; raise depth and rerun `crinifer trace`");
  Built b = build(cfg, cfg.depth, log);
  json m = json::parse(read_text_file(out / "manifest.json"));
  std::map<std::string, std::string> stored;
  for (const auto& e : m.at("files"))
    if (e.at("kind") == "ray") stored[e.at("address").get<std::string>() + e.at("sign").get<std::string>()] = e.at("path");
  for (const auto* r : b.rays->all()) {
    auto it = stored.find(r->signed_address.str());
    if (it == stored.end() || read_text_file(out / it->second) != canonical_ray_to_json(*r))
      throw IoError("trace files do not match the config; rerun `crinifer trace`");
  }
  ModelStore store = ModelStore::load(out / "model");
  auto init = make_initial(cfg, *b.tails, store);
  ThetaMap theta = build_theta(cfg.target(), store, *b.tails, init);
  MetricSurrogate metric(cfg.core_radius);
  auto samples = cauchy_samples(store, cfg.address_list(), cfg.phi.samples, N, cfg.phi.label_lo, cfg.phi.label_hi);
  PhiApprox phi = cauchy_report(*b.rays, theta, store, samples, N, metric);
  Residual res = semiconjugacy_residual(phi);
  write_text_file(out / "phi.json", phi_report_to_json(phi, res));
  char line[128];
  log << "stage  gap\n";
  for (std::size_t n = 0; n < phi.gaps.size(); ++n) {
    std::snprintf(line, sizeof line, "%5zu  %.6e\n", n, phi.gaps[n]);
    log << line;
  }
  std::snprintf(line, sizeof line, "fitted ratio %.6f  mu %.6e  residual %.6e (finite stage %.3e)\n",
                phi.fitted_ratio, phi.mu_hat, res.total(), res.finite_stage);
  log << line;
  if (!phi.complete) log << "incomplete: " << phi.error << "\n";
  return phi;
}

fs::path cmd_render(const RunConfig& cfg, std::ostream& log) {
  fs::path out = cfg.output;
  verify_manifest(out);
  json m = json::parse(read_text_file(out / "manifest.json"));
  std::vector<RenderedRay> rays;
  for (const auto& e : m.at("files"))
    if (e.at("kind") == "ray") rays.push_back(rendered_ray_from_json(read_text_file(out / e.at("path").get<std::string>())));
  bool empty = false;
  std::string svg = render_svg(rays, cfg.render, &empty);
  fs::path p = out / "render.svg";
  write_text_file(p, svg);
  if (empty) log << "warning: no ray meets the viewport\n";
  log << "wrote " << p.string() << "\n";
  return p;
}

bool cmd_check(const RunConfig& cfg, std::ostream& log) {
  bool all = true;
  auto line = [&](const std::string& name, bool ok, const std::string& detail) {
    log << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    all = all && ok;
  };
  EntireMap f = cfg.target(), g = cfg.model();
  auto sep = separation_check(f, 0.3, 6);
  line("separation", sep.pass, "min ratio " + std::to_string(sep.ratio));
  auto dt = disjoint_type_check(g, 100, 1e-9);
  line("disjoint-type", dt.pass,
       dt.fixed_point ? "fixed point " + std::to_string(dt.fixed_point->real()) + " multiplier " +
                            std::to_string(std::abs(dt.multiplier))
                      : dt.reason);
  int depth = std::min(cfg.depth, 5);
  Built b = build(cfg, depth, log);
  auto oc = order_correspondence_check(*b.store, sorted_rays(*b.rays), 50.0);
  line("order-correspondence", oc.pass,
       std::to_string(oc.triples) + " triples" + (oc.pass ? "" : ", disagreement " + oc.disagreement));
  for (cplx z : cfg.fiber_points) {
    auto fc = fiber_count_check(f, *b.rays, z, depth);
    char buf[64];
    std::snprintf(buf, sizeof buf, "fiber at %g%+gi", z.real(), z.imag());
    line(buf, fc.pass,
         "count " + std::to_string(fc.count) + " bound " + std::to_string(fc.bound) +
             (fc.undetermined ? " (formula undetermined)" : ", formula " + std::to_string(fc.formula)) +
             (fc.message.empty() ? "" : " " + fc.message));
  }
  return all;
}

}  // namespace crinifer
