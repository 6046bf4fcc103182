#pragma once

#include <string>
#include <vector>

#include "hmcf/grid.hpp"
#include "hmcf/immersion.hpp"

namespace hmcf {

// Graph displacement Y over a periodic domain; components (y^1[, y^2], height)
// live in Vec3 with the height in the last used slot.
struct GraphState {
  Grid grid;              // graph domain, dim 1 or 2
  std::vector<Vec3> y;
  std::vector<Vec3> y_t;
  std::vector<Vec3> prev;
  std::vector<Vec3> rhs_prev;
  bool have_prev = false;
  double t = 0.0;
  double dt_prev = 0.0;
  long step = 0;
};

// Exact graph metric delta_ij + d_i y^j + d_j y^i + sum_p d_i y^p d_j y^p,
// with the same central differences as the general-immersion metric path.
std::vector<Sym2> graph_metric(const Grid& grid, const std::vector<Vec3>& y);

// Exact inverse of the graph metric and its first-order truncation
// delta^ij - d_i y^j - d_j y^i - y_ij (remainder O(|grad y|^2)).
std::vector<Sym2> graph_inverse_exact(const Grid& grid, const std::vector<Sym2>& metric,
                                      double det_floor = 1e-10);
std::vector<Sym2> graph_inverse_truncated(const Grid& grid, const std::vector<Vec3>& y);

// g^ij d^2_ij Y with the exact inverse metric; `linear` forces g = delta
// (the flat-wave oracle on the same grid).
std::vector<Vec3> graph_rhs(const Grid& grid, const std::vector<Vec3>& y, bool linear = false);

enum class GraphStepStatus { Ok, RegimeExceeded, Degenerate, NonFinite };

struct GraphOptions {
  double cfl_safety = 0.25;
  double det_floor = 1e-10;
  double grad_limit = 0.5;  // small-gradient regime guard on |dY|_inf
  bool linear = false;
  double fixed_dt = 0.0;    // > 0 freezes the step
};

GraphState make_graph_state(const Grid& grid, std::vector<Vec3> y0, std::vector<Vec3> v0);

GraphStepStatus graph_step(GraphState& gs, const GraphOptions& opts, double dt_cap = 1e300);

// Runs to the horizon (final step clipped); returns the terminal status.
GraphStepStatus graph_run(GraphState& gs, double horizon, const GraphOptions& opts);

// Perturbation profiles (positions and velocities per grid point).
// sine_height: pure height mode sin(k x); sine_mixed adds a tangential
// component (the mixed profile has a genuine quadratic response, pure height
// is odd in eps); bump: smooth periodic height bump.
struct GraphProfile {
  std::vector<Vec3> shape;
  std::vector<Vec3> velocity;
};
GraphProfile make_profile(const Grid& grid, const std::string& name, int mode_k = 1);

struct EpsScalingRow {
  double eps = 0.0;
  double sup_norm = 0.0;    // max |Y| over the run
  double deviation = -1.0;  // vs the previous eps in the list, scaled; -1 for the first
  std::string verdict;      // ok | excluded_regime | blowup
};

struct EpsScalingReport {
  std::vector<EpsScalingRow> rows;
  std::vector<double> pair_orders;  // log2 of consecutive deviation ratios
  double empirical_eps0 = 0.0;      // largest eps that ran clean to the horizon
};

// For each eps runs the graph flow to the horizon with a common frozen dt and
// measures the deviation from linear scaling between consecutive eps values:
// || Y_eps(T) - (eps/eps') Y_eps'(T) ||_inf.
EpsScalingReport epsilon_scaling(const Grid& grid, const GraphProfile& profile,
                                 const std::vector<double>& eps_list, double horizon,
                                 const GraphOptions& opts = {});

}  // namespace hmcf
