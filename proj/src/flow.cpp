#include "hmcf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hmcf/errors.hpp"
#include "hmcf/exec.hpp"
#include "hmcf/minkowski.hpp"

namespace hmcf {

namespace {

bool has_band(const Grid& g) { return !g.periodic[0] || (g.dim > 1 && !g.periodic[1]); }

// Delta_g X from the cache's own derivative fields (identical stencils to the
// rest of the cache, so the Gauss cross-check isolates the operator algebra).
std::vector<Vec3> laplace_position(const GeometryCache& c) {
  const int n = c.dim;
  std::vector<Vec3> out(c.grid.size());
  parallel_for(c.grid.size(), [&](std::ptrdiff_t p) {
    Vec3 acc{};
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Vec3 term = c.second_deriv(static_cast<int>(p), i, j);
        for (int k = 0; k < n; ++k) term -= c.tangent[k][p] * c.christoffel[k][p].at(i, j);
        acc += term * c.inv_metric[p].at(i, j);
      }
    }
    out[p] = acc;
  });
  return out;
}

void fill_band_layers(const Grid& g, std::vector<Vec3>& points, std::vector<Vec3>& velocity,
                      const std::vector<Vec3>& unit) {
  // mean radius / radial speed over the interior, fixed-order sums
  double r_sum = 0.0, v_sum = 0.0;
  long count = 0;
  for_each_interior(g, [&](int p, int, int) {
    r_sum += norm(points[p]);
    v_sum += dot(velocity[p], unit[p]);
    ++count;
  });
  const double r_hat = r_sum / static_cast<double>(count);
  const double v_hat = v_sum / static_cast<double>(count);
  for (int i = 0; i < g.count[0]; ++i) {
    for (int j = 0; j < g.count[1]; ++j) {
      if (g.is_interior(i, j)) continue;
      const int p = g.idx(i, j);
      points[p] = unit[p] * r_hat;
      velocity[p] = unit[p] * v_hat;
    }
  }
}

std::vector<Vec3> evaluate_rhs(FlowState& fs, const GeometryCache& cache,
                               const FlowOptions& opts) {
  if (opts.model == RhsModel::MeanCurvature) {
    std::vector<Vec3> f = flow_rhs(cache, opts);
    if (fs.have_prev) {
      // scheme-consistent velocity at the current level
      const double dtp = fs.dt_prev;
      parallel_for(cache.grid.size(), [&](std::ptrdiff_t p) {
        fs.velocity[p] = (fs.im.points[p] - fs.prev_points[p]) * (1.0 / dtp) + f[p] * (0.5 * dtp);
      });
    }
    return f;
  }
  // Extremal model: the acceleration depends on the velocity, so refresh the
  // velocity with the lagged acceleration and re-evaluate once.
  if (fs.have_prev) {
    const double dtp = fs.dt_prev;
    std::vector<Vec3> v_est(cache.grid.size());
    parallel_for(cache.grid.size(), [&](std::ptrdiff_t p) {
      v_est[p] =
          (fs.im.points[p] - fs.prev_points[p]) * (1.0 / dtp) + fs.rhs_prev[p] * (0.5 * dtp);
    });
    std::vector<Vec3> f = extremal_rhs(cache, v_est, opts.eps_light);
    parallel_for(cache.grid.size(), [&](std::ptrdiff_t p) {
      fs.velocity[p] = (fs.im.points[p] - fs.prev_points[p]) * (1.0 / dtp) + f[p] * (0.5 * dtp);
    });
    return extremal_rhs(cache, fs.velocity, opts.eps_light);
  }
  return extremal_rhs(cache, fs.velocity, opts.eps_light);
}

void advance_three_level(const Grid& g, const std::vector<Vec3>& prev,
                         const std::vector<Vec3>& curr, const std::vector<Vec3>& vel,
                         const std::vector<Vec3>& acc, bool have_prev, double dt, double dt_prev,
                         std::vector<Vec3>& out) {
  out.resize(curr.size());
  if (!have_prev) {
    parallel_for(g.size(), [&](std::ptrdiff_t p) {
      out[p] = curr[p] + vel[p] * dt + acc[p] * (0.5 * dt * dt);
    });
    return;
  }
  const double ratio = dt / dt_prev;
  const double w = 0.5 * dt * (dt + dt_prev);
  parallel_for(g.size(), [&](std::ptrdiff_t p) {
    out[p] = curr[p] + (curr[p] - prev[p]) * ratio + acc[p] * w;
  });
}

SnapshotStats make_stats(const FlowState& fs, const GeometryCache& cache,
                         const FlowOptions& opts) {
  SnapshotStats s;
  s.t = fs.t;
  s.step = fs.step;
  radius_stats(fs.im, s.r_mean, s.r_min, s.r_max);

  const Grid& g = fs.im.grid;
  double det_min = std::numeric_limits<double>::infinity();
  double h_max = 0.0;
  double kin = 0.0, area = 0.0;
  double cell = g.spacing[0] * (g.dim > 1 ? g.spacing[1] : 1.0);
  for_each_interior(g, [&](int p, int, int) {
    det_min = std::min(det_min, cache.det_g[p]);
    h_max = std::max(h_max, std::fabs(cache.mean_curvature[p]));
    const double mu = std::sqrt(cache.det_g[p]) * cell;
    kin += 0.5 * dot(fs.velocity[p], fs.velocity[p]) * mu;
    area += mu;
  });
  s.det_g_min = det_min;
  s.h_abs_max = h_max;
  s.kinetic = kin;
  s.area = area;

  std::vector<Vec3> lap = laplace_position(cache);
  double gr = 0.0;
  for_each_interior(g, [&](int p, int, int) {
    gr = std::max(gr, max_abs(lap[p] - cache.normal[p] * cache.mean_curvature[p]));
  });
  s.gauss_residual = gr;
  if (opts.deturck && fs.deturck.has_value()) {
    s.deturck_max = max_norm_interior(g, fs.deturck->d);
  }
  return s;
}

}  // namespace

void radius_stats(const Immersion& im, double& r_mean, double& r_min, double& r_max) {
  const Vec3 c = centroid(im);
  double sum = 0.0;
  r_min = std::numeric_limits<double>::infinity();
  r_max = 0.0;
  long count = 0;
  for_each_interior(im.grid, [&](int p, int, int) {
    const double r = norm(im.points[p] - c);
    sum += r;
    r_min = std::min(r_min, r);
    r_max = std::max(r_max, r);
    ++count;
  });
  r_mean = sum / static_cast<double>(count);
}

FlowState make_flow_state(Immersion x0, std::vector<Vec3> velocity0, const FlowOptions& opts) {
  if (velocity0.size() != x0.points.size()) {
    throw DomainError("velocity grid does not match immersion grid");
  }
  FlowState fs;
  fs.im = std::move(x0);
  fs.velocity = std::move(velocity0);
  if (opts.band_fill == BandFillMode::RadialExtension) {
    if (!has_band(fs.im.grid)) throw DomainError("radial band fill requires a band axis");
    fs.band_unit.resize(fs.im.points.size());
    for (std::size_t p = 0; p < fs.im.points.size(); ++p) {
      const double r = norm(fs.im.points[p]);
      if (r <= 0.0) throw DomainError("radial band fill requires points away from the origin");
      fs.band_unit[p] = fs.im.points[p] * (1.0 / r);
    }
    fill_band_layers(fs.im.grid, fs.im.points, fs.velocity, fs.band_unit);
  }
  if (opts.deturck) {
    DeTurckState ds;
    ds.d.assign(fs.im.points.size(), Vec3{});
    ds.d_t.assign(fs.im.points.size(), Vec3{});
    GeometryCache c0 = build_cache(fs.im, CacheOptions{opts.det_floor, 1e-12, true});
    ds.background_christoffel = c0.christoffel;
    fs.deturck = std::move(ds);
  }
  return fs;
}

std::vector<Vec3> flow_rhs(const GeometryCache& cache, const FlowOptions& opts) {
  std::vector<Vec3> hn(cache.grid.size());
  parallel_for(cache.grid.size(), [&](std::ptrdiff_t p) {
    hn[p] = cache.normal[p] * cache.mean_curvature[p];
  });
  if (!opts.debug_gauss) return hn;
  std::vector<Vec3> lap = laplace_position(cache);
  double diff = 0.0;
  for_each_interior(cache.grid, [&](int p, int, int) {
    diff = std::max(diff, max_abs(lap[p] - hn[p]));
  });
  if (diff > opts.debug_gauss_tol) {
    throw DomainError("Gauss cross-check failed: |Delta_g X - H n| = " + std::to_string(diff));
  }
  return lap;
}

double cfl_dt(const GeometryCache& cache, double safety) {
  const Grid& g = cache.grid;
  double dt = std::numeric_limits<double>::infinity();
  for_each_interior(g, [&](int p, int, int) {
    for (int a = 0; a < g.dim; ++a) {
      const double gaa = cache.inv_metric[p].at(a, a);
      if (gaa > 0.0) dt = std::min(dt, g.spacing[a] / std::sqrt(gaa));
    }
  });
  if (!std::isfinite(dt)) throw MetricDegenerate(0, 0.0);
  return safety * dt;
}

std::vector<Vec3> deturck_rhs(const DeTurckState& ds, const GeometryCache& cache) {
  const Grid& g = cache.grid;
  const int n = cache.dim;

  // bilinear periodic interpolation of the current Christoffel field at y(x)
  auto gamma_at = [&](double u, double v, int k, int i, int j) {
    double fi = (u - g.origin[0]) / g.spacing[0];
    double fj = g.dim > 1 ? (v - g.origin[1]) / g.spacing[1] : 0.0;
    int i0 = static_cast<int>(std::floor(fi));
    int j0 = static_cast<int>(std::floor(fj));
    const double wi = fi - i0;
    const double wj = fj - j0;
    auto wrap = [](int idx, int count) {
      idx %= count;
      if (idx < 0) idx += count;
      return idx;
    };
    const int i1 = wrap(i0 + 1, g.count[0]);
    i0 = wrap(i0, g.count[0]);
    int j1 = j0;
    if (g.dim > 1) {
      j1 = wrap(j0 + 1, g.count[1]);
      j0 = wrap(j0, g.count[1]);
    } else {
      j0 = j1 = 0;
    }
    const double g00v = cache.christoffel[k][g.idx(i0, j0)].at(i, j);
    const double g10v = cache.christoffel[k][g.idx(i1, j0)].at(i, j);
    const double g01v = cache.christoffel[k][g.idx(i0, j1)].at(i, j);
    const double g11v = cache.christoffel[k][g.idx(i1, j1)].at(i, j);
    return (1.0 - wi) * (1.0 - wj) * g00v + wi * (1.0 - wj) * g10v + (1.0 - wi) * wj * g01v +
           wi * wj * g11v;
  };

  std::vector<Vec3> out(g.size());
  std::vector<char> bad(g.size(), 0);
  parallel_for(g.count[0], [&](std::ptrdiff_t iw) {
    const int i = static_cast<int>(iw);
    for (int j = 0; j < g.count[1]; ++j) {
      const int p = g.idx(i, j);
      // dy^a/dx^b = delta + dd, d2y^a = d2d
      double dy[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
      Vec3 dd1[2], dd2[2][2];
      dd1[0] = d1_field(g, ds.d, i, j, 0);
      dd2[0][0] = d2_field(g, ds.d, i, j, 0);
      if (n > 1) {
        dd1[1] = d1_field(g, ds.d, i, j, 1);
        dd2[1][1] = d2_field(g, ds.d, i, j, 1);
        dd2[0][1] = dd2[1][0] = d2_field_mixed(g, ds.d, i, j);
      }
      auto comp = [](const Vec3& w, int a) { return a == 0 ? w.x : w.y; };
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) dy[a][b] = (a == b ? 1.0 : 0.0) + comp(dd1[b], a);
      }
      const double jac = n == 1 ? dy[0][0] : dy[0][0] * dy[1][1] - dy[0][1] * dy[1][0];
      if (!(jac > 0.0)) {
        bad[p] = 1;
        continue;
      }
      const double yu = g.coord(0, i) + ds.d[p].x;
      const double yv = (n > 1 ? g.coord(1, j) : 0.0) + ds.d[p].y;

      Vec3 acc{};
      for (int jj = 0; jj < n; ++jj) {
        for (int ll = 0; ll < n; ++ll) {
          const double gjl = cache.inv_metric[p].at(jj, ll);
          for (int a = 0; a < n; ++a) {
            double term = comp(dd2[jj][ll], a);
            for (int be = 0; be < n; ++be) {
              for (int ga = 0; ga < n; ++ga) {
                term += dy[be][jj] * dy[ga][ll] * gamma_at(yu, yv, a, be, ga);
              }
            }
            for (int k = 0; k < n; ++k) {
              term -= dy[a][k] * ds.background_christoffel[k][p].at(jj, ll);
            }
            if (a == 0)
              acc.x += gjl * term;
            else
              acc.y += gjl * term;
          }
        }
      }
      out[p] = acc;
    }
  });
  for (int p = 0; p < g.size(); ++p) {
    if (bad[p]) throw DiffeoDegenerate(p);
  }
  return out;
}

std::optional<FlowEvent> flow_step(FlowState& fs, const FlowOptions& opts, StepScratch& scratch,
                                   double dt_cap) {
  if (opts.band_fill == BandFillMode::RadialExtension) {
    fill_band_layers(fs.im.grid, fs.im.points, fs.velocity, fs.band_unit);
  }

  try {
    scratch.cache = build_cache(fs.im, CacheOptions{opts.det_floor, 1e-12, true});
  } catch (const MetricDegenerate& e) {
    scratch.cache_valid = false;
    return FlowEvent{FlowEventKind::Collapse, fs.t, fs.step, e.det};
  }
  scratch.cache_valid = true;

  double h_abs = 0.0;
  for_each_interior(fs.im.grid, [&](int p, int, int) {
    h_abs = std::max(h_abs, std::fabs(scratch.cache.mean_curvature[p]));
  });
  if (h_abs >= opts.h_max) {
    return FlowEvent{FlowEventKind::BlowUp, fs.t, fs.step, h_abs};
  }

  scratch.rhs = evaluate_rhs(fs, scratch.cache, opts);

  double dt = opts.fixed_dt ? *opts.fixed_dt : cfl_dt(scratch.cache, opts.cfl_safety);
  dt = std::min(dt, dt_cap);
  if (!(dt > 0.0)) throw DomainError("non-positive time step");
  scratch.dt_taken = dt;

  std::vector<Vec3> next;
  advance_three_level(fs.im.grid, fs.prev_points, fs.im.points, fs.velocity, scratch.rhs,
                      fs.have_prev, dt, fs.dt_prev, next);

  if (fs.deturck.has_value()) {
    DeTurckState& ds = *fs.deturck;
    std::vector<Vec3> dacc = deturck_rhs(ds, scratch.cache);
    if (fs.have_prev) {
      const double dtp = fs.dt_prev;
      parallel_for(fs.im.grid.size(), [&](std::ptrdiff_t p) {
        ds.d_t[p] = (ds.d[p] - ds.d_prev[p]) * (1.0 / dtp) + dacc[p] * (0.5 * dtp);
      });
    }
    std::vector<Vec3> dnext;
    advance_three_level(fs.im.grid, ds.d_prev, ds.d, ds.d_t, dacc, fs.have_prev, dt, fs.dt_prev,
                        dnext);
    ds.d_prev = std::move(ds.d);
    ds.d = std::move(dnext);
  }

  for (std::size_t p = 0; p < next.size(); ++p) {
    if (!finite(next[p])) {
      throw NonFiniteField("flow produced a non-finite position at point " + std::to_string(p));
    }
  }

  fs.prev_points = std::move(fs.im.points);
  fs.im.points = std::move(next);
  if (opts.band_fill == BandFillMode::RadialExtension) {
    fill_band_layers(fs.im.grid, fs.im.points, fs.velocity, fs.band_unit);
  }
  fs.rhs_prev = scratch.rhs;
  fs.have_prev = true;
  fs.dt_prev = dt;
  fs.t += dt;
  fs.step += 1;
  return std::nullopt;
}

namespace {

// Refresh the velocity to its scheme-consistent value at the current level.
void finalize_velocity(FlowState& fs, const FlowOptions& opts) {
  if (!fs.have_prev) return;
  GeometryCache cache = build_cache(fs.im, CacheOptions{opts.det_floor, 1e-12, true});
  std::vector<Vec3> f = opts.model == RhsModel::MeanCurvature
                            ? flow_rhs(cache, FlowOptions{})
                            : extremal_rhs(cache, fs.velocity, opts.eps_light);
  if (opts.model == RhsModel::Extremal) {
    std::vector<Vec3> v(fs.im.grid.size());
    const double dtp = fs.dt_prev;
    parallel_for(fs.im.grid.size(), [&](std::ptrdiff_t p) {
      v[p] = (fs.im.points[p] - fs.prev_points[p]) * (1.0 / dtp) + f[p] * (0.5 * dtp);
    });
    f = extremal_rhs(cache, v, opts.eps_light);
  }
  const double dtp = fs.dt_prev;
  parallel_for(fs.im.grid.size(), [&](std::ptrdiff_t p) {
    fs.velocity[p] = (fs.im.points[p] - fs.prev_points[p]) * (1.0 / dtp) + f[p] * (0.5 * dtp);
  });
}

}  // namespace

RunResult flow_run(FlowState& fs, double t_end, const FlowOptions& opts, int snapshot_every,
                   const SnapshotSink& sink) {
  RunResult res;
  StepScratch scratch;
  const double t_eps = 1e-12 * std::max(1.0, std::fabs(t_end));
  const int every = std::max(1, snapshot_every);
  while (fs.t < t_end - t_eps) {
    const bool want_snapshot = fs.step % every == 0;
    FlowState pre;
    if (want_snapshot) pre = fs;  // state at level fs.step, matching scratch.cache below

    std::optional<FlowEvent> ev = flow_step(fs, opts, scratch, t_end - fs.t);
    if (ev.has_value()) {
      res.event = *ev;
      return res;
    }
    if (want_snapshot && scratch.cache_valid) {
      res.stats.push_back(make_stats(pre, scratch.cache, opts));
      if (sink) sink(pre, scratch.cache);
    }
  }
  finalize_velocity(fs, opts);
  GeometryCache final_cache = build_cache(fs.im, CacheOptions{opts.det_floor, 1e-12, true});
  res.stats.push_back(make_stats(fs, final_cache, opts));
  if (sink) sink(fs, final_cache);
  res.event = FlowEvent{FlowEventKind::Finished, fs.t, fs.step, 0.0};
  return res;
}

double reverse_check(const FlowState& fs0, int k, FlowOptions opts) {
  if (k <= 0) return 0.0;
  FlowState fs = fs0;
  StepScratch scratch;
  if (!opts.fixed_dt) {
    GeometryCache c0 = build_cache(fs.im, CacheOptions{opts.det_floor, 1e-12, true});
    opts.fixed_dt = cfl_dt(c0, opts.cfl_safety);
  }
  const std::vector<Vec3> x0 = fs.im.points;
  for (int s = 0; s < k; ++s) {
    if (flow_step(fs, opts, scratch).has_value()) {
      throw DomainError("reverse_check hit a terminal event on the forward leg");
    }
  }
  finalize_velocity(fs, opts);
  for (Vec3& v : fs.velocity) v = -v;
  fs.have_prev = false;
  fs.dt_prev = 0.0;
  fs.rhs_prev.clear();
  for (int s = 0; s < k; ++s) {
    if (flow_step(fs, opts, scratch).has_value()) {
      throw DomainError("reverse_check hit a terminal event on the backward leg");
    }
  }
  double diff = 0.0;
  for (std::size_t p = 0; p < x0.size(); ++p) {
    diff = std::max(diff, max_abs(fs.im.points[p] - x0[p]));
  }
  return diff;
}

}  // namespace hmcf
