#pragma once

#include <vector>

#include "hmcf/flow.hpp"
#include "hmcf/geometry.hpp"

namespace hmcf {

// Blocks of the induced Lorentzian metric of the graph (t, X(t,x)):
// g00 = -1 + |X_t|^2, g0i = <X_t, dX/dx^i>, spatial block = the Riemannian
// cache metric.
struct LorentzCache {
  std::vector<double> g00;
  std::array<std::vector<double>, 2> g0i;
  std::vector<double> speed_sq;
};

LorentzCache build_lorentz_cache(const GeometryCache& cache, const std::vector<Vec3>& velocity,
                                 double eps_light = 1e-6);

// Explicit acceleration of the timelike extremal-surface system:
//   X_tt = (1 - |X_t|^2) H n - g^kl <d_l X_t, X_t> d_k X,
// obtained by eliminating <X_tt, X_t> from the coupled constraint (the
// constraint expresses that inner product through first derivatives). With
// X_t == 0 this reduces bitwise to the mean-curvature right-hand side.
std::vector<Vec3> extremal_rhs(const GeometryCache& cache, const std::vector<Vec3>& velocity,
                               double eps_light = 1e-6);

// Residual of the eliminated constraint, evaluated with the computed
// acceleration: <A, X_t> - (|X_t|^2 - 1) g^ij <d_i X_t, d_j X>.
std::vector<double> gauge_residual(const GeometryCache& cache, const std::vector<Vec3>& velocity,
                                   const std::vector<Vec3>& accel);

// Centered time derivative of det(g) between consecutive snapshots.
struct DetDriftRow {
  double t = 0.0;
  double max_drift = 0.0;
  double mean_drift = 0.0;
};
std::vector<DetDriftRow> det_drift(const std::vector<double>& times,
                                   const std::vector<std::vector<double>>& det_g_snapshots,
                                   const Grid& grid);

// Side-by-side integration of the mean-curvature and extremal systems from
// the same shape with velocities eps * V1.
struct LimitCurvePoint {
  double eps = 0.0;
  double t = 0.0;
  double discrepancy = 0.0;
};
struct LimitComparison {
  std::vector<LimitCurvePoint> curve;
  std::vector<double> max_discrepancy;  // per eps, same order as eps_list
  double exponent = 0.0;                // log-log slope of max discrepancy vs eps
};
LimitComparison limit_comparison(const Immersion& x0, const std::vector<Vec3>& v1,
                                 const std::vector<double>& eps_list, double horizon,
                                 FlowOptions opts = {});

}  // namespace hmcf
