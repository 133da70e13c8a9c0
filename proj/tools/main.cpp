#include <iostream>

#include "CLI11.hpp"
#include "crinifer/cli_io.hpp"

using namespace crinifer;

int main(int argc, char** argv) {
  CLI::App app{"crinifer: dynamic rays, signed addresses and pullback semiconjugacies"};
  app.require_subcommand(1);

  std::string config_path, map, addresses, out;
  double model_lambda = 0.0;
  int depth = -1, stages = -1;
  std::vector<double> viewport;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--map", map, "target map spec, e.g. cosh");
    sub->add_option("--model-lambda", model_lambda, "scale of the disjoint-type model");
    sub->add_option("--addresses", addresses, "comma-separated address literals");
    sub->add_option("--depth", depth, "canonical-ray levels");
    sub->add_option("--out", out, "output directory");
  };
  auto* trace = app.add_subcommand("trace", "trace model hairs and signed canonical rays");
  auto* phi = app.add_subcommand("phi", "pullback semiconjugacy stages and Cauchy report");
  auto* render = app.add_subcommand("render", "SVG of traced canonical rays");
  auto* check = app.add_subcommand("check", "separation, disjoint type, order and fiber checks");
  for (auto* s : {trace, phi, render, check}) common(s);
  phi->add_option("--stages", stages, "number of stages N");
  render->add_option("--viewport", viewport, "re_min re_max im_min im_max")->expected(4);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    if (!map.empty()) cfg.map = map;
    if (model_lambda != 0.0) cfg.model_lambda = model_lambda;
    if (!addresses.empty()) {
      cfg.addresses.clear();
      std::size_t pos = 0;
      while (pos <= addresses.size()) {
        std::size_t comma = addresses.find(',', pos);
        if (comma == std::string::npos) comma = addresses.size();
        if (comma > pos) cfg.addresses.push_back(addresses.substr(pos, comma - pos));
        pos = comma + 1;
      }
    }
    if (depth >= 0) cfg.depth = depth;
    if (!out.empty()) cfg.output = out;
    if (stages >= 0) cfg.phi.stages = stages;
    if (!viewport.empty()) {
      cfg.render.re_min = viewport[0];
      cfg.render.re_max = viewport[1];
      cfg.render.im_min = viewport[2];
      cfg.render.im_max = viewport[3];
      cfg.render.validate();
    }
    if (app.got_subcommand(trace)) {
      auto res = cmd_trace(cfg, std::cout);
      return res.files.empty() ? 1 : 0;
    }
    if (app.got_subcommand(phi)) {
      auto rep = cmd_phi(cfg, std::cout);
      return rep.complete ? 0 : 1;
    }
    if (app.got_subcommand(render)) {
      cmd_render(cfg, std::cout);
      return 0;
    }
    return cmd_check(cfg, std::cout) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
