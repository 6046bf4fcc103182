#pragma once

#include <optional>
#include <span>
#include <vector>

namespace hmcf {

// State of the reduced radial flow r_tt = -c/r.
struct RadialState {
  double r = 1.0;
  double r_t = 0.0;
  double t = 0.0;
  double c = 1.0;
};

double radial_rhs(const RadialState& s);

// First integral r_t^2 + 2c ln(r/r0) - r1^2; identically zero along exact
// trajectories with the given initial data.
double first_integral(const RadialState& s, double r0, double r1);

enum class RadialEventKind { ReachedTEnd, Collapse };

struct RadialOptions {
  double tol = 1e-10;           // mixed relative tolerance of the embedded pair
  double r_stop_rel = 1e-6;     // collapse threshold r < r_stop_rel * r0
  long max_steps = 2000000;
};

struct RadialResult {
  std::vector<RadialState> trajectory;  // accepted steps, including the endpoint
  RadialEventKind event = RadialEventKind::ReachedTEnd;
  double t_collapse = 0.0;              // valid when event == Collapse
  std::optional<double> t_peak;         // r_t sign change (+ to -), if any
  std::optional<double> r_peak;
  double max_first_integral_drift = 0.0;
  int r_t_sign_changes = 0;
};

// Adaptive Dormand-Prince 5(4) with PI step control and event location by
// bisection on the cubic Hermite continuous extension. A step-size underflow
// near r = 0 is converted into a Collapse event with the bracketed time.
RadialResult integrate_radial(RadialState s0, double t_end, const RadialOptions& opts = {});

// (r, r_t) at the requested times, each reached by an exact clipped
// integration (accuracy is the integrator tolerance, no dense-output loss).
std::vector<RadialState> sample_radial(RadialState s0, std::span<const double> times,
                                       const RadialOptions& opts = {});

// Collapse time by adaptive quadrature of dr / sqrt(r1^2 + 2c ln(r0/r)) over
// the monotone branches, with the substitution u = sqrt(ln(r_ref / r))
// removing the endpoint singularity. For r1 > 0 the rise to
// r_max = r0 exp(r1^2/(2c)) and the fall from it are integrated separately.
double collapse_time_quadrature(double r0, double r1, double c, double tol = 1e-12);

enum class RadialPhase { MonotoneCollapse, ExpandThenCollapse };

struct RadialClassification {
  RadialPhase phase = RadialPhase::MonotoneCollapse;
  double r_max = 0.0;  // r0 for the monotone case
  double t_max = 0.0;  // 0 for the monotone case
};

RadialClassification classify_radial_phase(double r0, double r1, double c = 1.0);

}  // namespace hmcf
