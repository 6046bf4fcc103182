#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hmcf {

// Validated experiment configuration. Defaults are chosen so that a minimal
// config (possibly empty plus a subcommand) runs the unit circle.
struct SimConfig {
  std::string experiment;  // simulate | oracle | verify | minkowski | stability
  std::string geometry = "circle";
  int n1 = 64;
  int n2 = 0;  // 0: per-geometry default (matched spacing where applicable)
  double radius = 1.0;
  double ellipse_a = 1.5;
  double ellipse_b = 1.0;
  double alpha_max = 0.7853981633974483;  // pi/4
  double length = 1.0;
  double torus_major = 2.0;
  double torus_minor = 0.5;
  double r0 = 1.0;
  double r1 = 0.0;
  double c = 1.0;
  double velocity = 0.0;  // radial initial velocity for simulate
  double epsilon = 0.1;
  std::vector<double> eps_list = {0.02, 0.01, 0.005};
  double horizon = 1.0;
  std::string profile = "sine_mixed";
  int mode_k = 1;
  double cfl_safety = 0.25;
  double det_floor = 1e-10;
  double h_max = 1e6;
  double ode_tol = 1e-10;
  double light_eps = 1e-6;
  double t_end = 2.0;
  int snapshot_every = 10;
  std::string output_dir = "out";
  int precision = 17;
  double fixed_dt = 0.0;  // 0: CFL-controlled
  bool deturck = false;
  std::vector<int> levels;  // verify refinement levels; empty: per-context default
  double t_star = 0.25;     // verify: simulated-flow evaluation time
};

struct ConfigError {
  int line = 0;  // 0 when not tied to a line (override or cross-field error)
  std::string message;
};

struct ConfigParse {
  std::optional<SimConfig> config;  // set only when errors is empty
  std::vector<ConfigError> errors;
};

// Strict key = value parser: '#' comments, [section] headers (organizational
// only), unknown keys rejected, every error collected with its line number.
ConfigParse parse_config(const std::string& text);

// Applies repeatable "key=value" overrides with the same validation.
ConfigParse apply_overrides(SimConfig base, const std::vector<std::string>& overrides);

// Cross-field checks (geometry/experiment consistency); returns all errors.
std::vector<ConfigError> validate_config(const SimConfig& cfg);

}  // namespace hmcf
