#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hmcf/config.hpp"
#include "hmcf/exec.hpp"
#include "hmcf/experiments.hpp"

namespace {

struct SubArgs {
  std::string config_path;
  std::vector<std::string> overrides;
};

int run(const std::string& experiment, const SubArgs& args, bool serial) {
  if (serial) hmcf::set_exec_mode(hmcf::ExecMode::Serial);

  hmcf::SimConfig cfg;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) {
      std::fprintf(stderr, "error: cannot open config '%s'\n", args.config_path.c_str());
      return 64;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    hmcf::ConfigParse parsed = hmcf::parse_config(buf.str());
    if (!parsed.errors.empty()) {
      for (const auto& e : parsed.errors) {
        std::fprintf(stderr, "config error (line %d): %s\n", e.line, e.message.c_str());
      }
      return 64;
    }
    cfg = *parsed.config;
  }
  if (!cfg.experiment.empty() && cfg.experiment != experiment) {
    std::fprintf(stderr, "config error: experiment '%s' does not match subcommand '%s'\n",
                 cfg.experiment.c_str(), experiment.c_str());
    return 64;
  }
  cfg.experiment = experiment;

  hmcf::ConfigParse final_cfg = hmcf::apply_overrides(cfg, args.overrides);
  if (!final_cfg.errors.empty()) {
    for (const auto& e : final_cfg.errors) {
      std::fprintf(stderr, "config error: %s\n", e.message.c_str());
    }
    return 64;
  }

  try {
    const hmcf::ExperimentResult res = hmcf::run_experiment(*final_cfg.config);
    std::printf("%s\n", res.summary.c_str());
    return res.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hmcf: hyperbolic mean curvature flow laboratory"};
  app.require_subcommand(1);
  bool serial = false;
  app.add_flag("--serial", serial, "run pointwise kernels serially (no OpenMP)");

  const std::vector<std::string> names = {"simulate", "oracle", "verify", "minkowski",
                                          "stability"};
  const std::vector<std::string> descriptions = {
      "advance the flow from configured initial data",
      "radial collapse oracle (adaptive ODE + quadrature)",
      "discrete residuals of the derived evolution identities",
      "extremal-surface system and its zero-velocity limit",
      "graph perturbation scaling experiments",
  };
  std::vector<SubArgs> args(names.size());
  for (std::size_t k = 0; k < names.size(); ++k) {
    CLI::App* sub = app.add_subcommand(names[k], descriptions[k]);
    sub->add_option("--config", args[k].config_path, "config file (key = value lines)");
    sub->add_option("--set", args[k].overrides, "override, key=value (repeatable)")
        ->take_all();
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t k = 0; k < names.size(); ++k) {
    if (app.get_subcommand(names[k])->parsed()) {
      return run(names[k], args[k], serial);
    }
  }
  std::fprintf(stderr, "error: no subcommand\n");
  return 64;
}
