#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hmcf/geometry.hpp"
#include "hmcf/immersion.hpp"

namespace hmcf {

enum class FlowEventKind { Finished, Collapse, BlowUp };

struct FlowEvent {
  FlowEventKind kind = FlowEventKind::Finished;
  double t = 0.0;
  long step = 0;
  double detail = 0.0;  // min det(g) at collapse, max |H| at blow-up
};

enum class RhsModel {
  MeanCurvature,  // X_tt = H n
  Extremal        // timelike extremal-surface acceleration (see minkowski.hpp)
};

// Ghost-layer policy for non-periodic (band) axes. RadialExtension rebuilds
// the pad layers as r_hat * unit_direction with r_hat the mean interior
// radius; exact for the radial solution families the bands are used for, and
// it preserves discrete rotational symmetry to roundoff.
enum class BandFillMode { None, RadialExtension };

struct FlowOptions {
  double cfl_safety = 0.25;
  double det_floor = 1e-10;
  double h_max = 1e6;
  double eps_light = 1e-6;           // extremal subluminal guard
  RhsModel model = RhsModel::MeanCurvature;
  std::optional<double> fixed_dt;    // overrides the CFL choice when set
  bool debug_gauss = false;          // return Delta_g X and assert it matches H n
  double debug_gauss_tol = 1e-2;
  BandFillMode band_fill = BandFillMode::None;
  bool deturck = false;              // co-integrate the diffeomorphism system
};

// Diffeomorphism evolution state, stored as the displacement d = y - x
// (periodic even when y itself winds around the parameter torus).
struct DeTurckState {
  std::vector<Vec3> d;       // displacement components live in (x[, y])
  std::vector<Vec3> d_t;
  std::vector<Vec3> d_prev;
  // Christoffel field of the initial metric, frozen at t = 0.
  std::array<std::vector<Sym2>, 2> background_christoffel;
};

struct FlowState {
  Immersion im;                      // X^n
  std::vector<Vec3> velocity;        // scheme-consistent estimate at t^n
  std::vector<Vec3> prev_points;     // X^{n-1}
  std::vector<Vec3> rhs_prev;        // F at the previous level (velocity refresh)
  bool have_prev = false;
  double t = 0.0;
  double dt_prev = 0.0;
  long step = 0;
  std::vector<Vec3> band_unit;       // unit directions for RadialExtension fills
  std::optional<DeTurckState> deturck;
};

FlowState make_flow_state(Immersion x0, std::vector<Vec3> velocity0,
                          const FlowOptions& opts = {});

// H n per point (or Delta_g X under the debug flag, asserted against H n).
std::vector<Vec3> flow_rhs(const GeometryCache& cache, const FlowOptions& opts = {});

// CFL bound: safety * min over interior points and axes of dx_i / sqrt(g^ii).
double cfl_dt(const GeometryCache& cache, double safety = 0.25);

// Acceleration of the coupled diffeomorphism system for the current cache.
std::vector<Vec3> deturck_rhs(const DeTurckState& ds, const GeometryCache& cache);

// Scratch reused across steps; exposes the cache of the current level so
// drivers can log diagnostics without rebuilding it.
struct StepScratch {
  GeometryCache cache;
  std::vector<Vec3> rhs;
  bool cache_valid = false;
  double dt_taken = 0.0;
};

// One three-level step. The first call bootstraps
// X^1 = X^0 + dt V^0 + dt^2/2 F(X^0); later calls use the nonuniform central
// update and refresh the velocity to its scheme-consistent value
// (X^n - X^{n-1})/dt + dt/2 F(X^n). Returns a terminal event instead of
// advancing when collapse or blow-up is detected. `dt_cap` clips the step
// (used to land exactly on a target time).
std::optional<FlowEvent> flow_step(FlowState& fs, const FlowOptions& opts, StepScratch& scratch,
                                   double dt_cap = 1e300);

struct SnapshotStats {
  double t = 0.0;
  long step = 0;
  double r_mean = 0.0, r_min = 0.0, r_max = 0.0;
  double det_g_min = 0.0;
  double h_abs_max = 0.0;
  double kinetic = 0.0;       // mean |V|^2 / 2
  double area = 0.0;          // sum sqrt(det g) dx [dy]
  double gauss_residual = 0.0;
  double deturck_max = 0.0;   // max |y - id| when the coupled mode is on
};

using SnapshotSink = std::function<void(const FlowState&, const GeometryCache&)>;

struct RunResult {
  FlowEvent event;
  std::vector<SnapshotStats> stats;
};

// Steps to t_end (final step clipped to land exactly) or to a terminal event.
// Stats rows are recorded every `snapshot_every` steps plus at both ends.
RunResult flow_run(FlowState& fs, double t_end, const FlowOptions& opts, int snapshot_every = 10,
                   const SnapshotSink& sink = {});

// Integrates k steps at frozen dt, negates the velocity, integrates k steps
// back, and returns ||X_final - X_0||_inf (time-symmetry diagnostic).
double reverse_check(const FlowState& fs0, int k, FlowOptions opts);

// Radius statistics about the centroid (collapse diagnostics).
void radius_stats(const Immersion& im, double& r_mean, double& r_min, double& r_max);

}  // namespace hmcf
