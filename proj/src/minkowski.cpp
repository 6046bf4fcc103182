#include "hmcf/minkowski.hpp"

#include <algorithm>
#include <cmath>

#include "hmcf/errors.hpp"
#include "hmcf/exec.hpp"

namespace hmcf {

LorentzCache build_lorentz_cache(const GeometryCache& cache, const std::vector<Vec3>& velocity,
                                 double eps_light) {
  const Grid& g = cache.grid;
  LorentzCache lc;
  lc.g00.resize(g.size());
  lc.speed_sq.resize(g.size());
  for (int a = 0; a < cache.dim; ++a) lc.g0i[a].resize(g.size());
  parallel_for(g.size(), [&](std::ptrdiff_t p) {
    const double s = dot(velocity[p], velocity[p]);
    lc.speed_sq[p] = s;
    lc.g00[p] = -1.0 + s;
    for (int a = 0; a < cache.dim; ++a) lc.g0i[a][p] = dot(velocity[p], cache.tangent[a][p]);
  });
  for (int p = 0; p < g.size(); ++p) {
    if (!(lc.speed_sq[p] < 1.0 - eps_light)) throw LightConeViolation(p, lc.speed_sq[p]);
  }
  return lc;
}

std::vector<Vec3> extremal_rhs(const GeometryCache& cache, const std::vector<Vec3>& velocity,
                               double eps_light) {
  const Grid& g = cache.grid;
  const int n = cache.dim;
  for (int p = 0; p < g.size(); ++p) {
    const double s = dot(velocity[p], velocity[p]);
    if (!(s < 1.0 - eps_light)) throw LightConeViolation(p, s);
  }
  std::vector<Vec3> out(g.size());
  parallel_for(g.count[0], [&](std::ptrdiff_t iw) {
    const int i = static_cast<int>(iw);
    for (int j = 0; j < g.count[1]; ++j) {
      const int p = g.idx(i, j);
      const Vec3& v = velocity[p];
      const double speed_sq = dot(v, v);
      Vec3 dv[2];
      dv[0] = d1_field(g, velocity, i, j, 0);
      if (n > 1) dv[1] = d1_field(g, velocity, i, j, 1);
      Vec3 acc = cache.normal[p] * cache.mean_curvature[p] * (1.0 - speed_sq);
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          acc -= cache.tangent[k][p] * (cache.inv_metric[p].at(k, l) * dot(dv[l], v));
        }
      }
      out[p] = acc;
    }
  });
  return out;
}

std::vector<double> gauge_residual(const GeometryCache& cache, const std::vector<Vec3>& velocity,
                                   const std::vector<Vec3>& accel) {
  const Grid& g = cache.grid;
  const int n = cache.dim;
  std::vector<double> out(g.size());
  parallel_for(g.count[0], [&](std::ptrdiff_t iw) {
    const int i = static_cast<int>(iw);
    for (int j = 0; j < g.count[1]; ++j) {
      const int p = g.idx(i, j);
      Vec3 dv[2];
      dv[0] = d1_field(g, velocity, i, j, 0);
      if (n > 1) dv[1] = d1_field(g, velocity, i, j, 1);
      double mixed = 0.0;
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          mixed += cache.inv_metric[p].at(a, b) * dot(dv[a], cache.tangent[b][p]);
        }
      }
      const double speed_sq = dot(velocity[p], velocity[p]);
      out[p] = dot(accel[p], velocity[p]) - (speed_sq - 1.0) * mixed;
    }
  });
  return out;
}

std::vector<DetDriftRow> det_drift(const std::vector<double>& times,
                                   const std::vector<std::vector<double>>& det_g_snapshots,
                                   const Grid& grid) {
  if (times.size() != det_g_snapshots.size() || times.size() < 3) {
    throw DomainError("det_drift needs >= 3 aligned snapshots");
  }
  std::vector<DetDriftRow> rows;
  for (std::size_t k = 1; k + 1 < times.size(); ++k) {
    const double dt2 = times[k + 1] - times[k - 1];
    DetDriftRow row;
    row.t = times[k];
    double sum = 0.0;
    long count = 0;
    for_each_interior(grid, [&](int p, int, int) {
      const double d = (det_g_snapshots[k + 1][p] - det_g_snapshots[k - 1][p]) / dt2;
      row.max_drift = std::max(row.max_drift, std::fabs(d));
      sum += std::fabs(d);
      ++count;
    });
    row.mean_drift = sum / static_cast<double>(count);
    rows.push_back(row);
  }
  return rows;
}

LimitComparison limit_comparison(const Immersion& x0, const std::vector<Vec3>& v1,
                                 const std::vector<double>& eps_list, double horizon,
                                 FlowOptions opts) {
  if (v1.size() != x0.points.size()) throw DomainError("velocity profile does not match grid");
  LimitComparison out;

  // common frozen dt so the two systems and all eps share one time grid
  if (!opts.fixed_dt) {
    GeometryCache c0 = build_cache(x0, CacheOptions{opts.det_floor, 1e-12, true});
    opts.fixed_dt = cfl_dt(c0, opts.cfl_safety);
  }
  const double dt = *opts.fixed_dt;
  const long steps = std::max<long>(1, static_cast<long>(std::ceil(horizon / dt - 1e-9)));

  for (double eps : eps_list) {
    std::vector<Vec3> v0(v1.size());
    for (std::size_t p = 0; p < v1.size(); ++p) v0[p] = v1[p] * eps;

    FlowOptions hmcf_opts = opts;
    hmcf_opts.model = RhsModel::MeanCurvature;
    FlowOptions ext_opts = opts;
    ext_opts.model = RhsModel::Extremal;

    FlowState a = make_flow_state(x0, v0, hmcf_opts);
    FlowState b = make_flow_state(x0, v0, ext_opts);
    StepScratch sa, sb;
    double max_disc = 0.0;
    for (long s = 0; s < steps; ++s) {
      const double cap = horizon - a.t;
      if (flow_step(a, hmcf_opts, sa, cap).has_value() ||
          flow_step(b, ext_opts, sb, cap).has_value()) {
        throw DomainError("limit comparison hit a terminal event");
      }
      double disc = 0.0;
      for (std::size_t p = 0; p < a.im.points.size(); ++p) {
        disc = std::max(disc, max_abs(a.im.points[p] - b.im.points[p]));
      }
      max_disc = std::max(max_disc, disc);
      out.curve.push_back({eps, a.t, disc});
    }
    out.max_discrepancy.push_back(max_disc);
  }

  // least-squares slope of log(max discrepancy) vs log(eps), positive eps only
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (eps_list[k] <= 0.0 || out.max_discrepancy[k] <= 0.0) continue;
    const double lx = std::log(eps_list[k]);
    const double ly = std::log(out.max_discrepancy[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  out.exponent = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
  return out;
}

}  // namespace hmcf
