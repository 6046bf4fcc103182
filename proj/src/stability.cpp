#include "hmcf/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hmcf/errors.hpp"
#include "hmcf/exec.hpp"

namespace hmcf {

namespace {

inline double comp(const Vec3& v, int a) { return a == 0 ? v.x : (a == 1 ? v.y : v.z); }

// dY/dx^i per point; Y is plainly periodic (the deck shift belongs to the
// base plane X0, not the displacement).
void displacement_gradients(const Grid& g, const std::vector<Vec3>& y, int i, int j, Vec3 dy[2]) {
  dy[0] = d1_field(g, y, i, j, 0);
  if (g.dim > 1) dy[1] = d1_field(g, y, i, j, 1);
}

}  // namespace

std::vector<Sym2> graph_metric(const Grid& g, const std::vector<Vec3>& y) {
  const int n = g.dim;
  const int ncomp = n + 1;
  std::vector<Sym2> out(g.size());
  parallel_for(g.count[0], [&](std::ptrdiff_t iw) {
    const int i = static_cast<int>(iw);
    for (int j = 0; j < g.count[1]; ++j) {
      const int p = g.idx(i, j);
      Vec3 dy[2];
      displacement_gradients(g, y, i, j, dy);
      Sym2 m;
      for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
          double v = (a == b ? 1.0 : 0.0) + comp(dy[a], b) + comp(dy[b], a);
          for (int q = 0; q < ncomp; ++q) v += comp(dy[a], q) * comp(dy[b], q);
          m.set(a, b, v);
        }
      }
      out[p] = m;
    }
  });
  return out;
}

std::vector<Sym2> graph_inverse_exact(const Grid& g, const std::vector<Sym2>& metric,
                                      double det_floor) {
  const int n = g.dim;
  std::vector<Sym2> out(g.size());
  for (int p = 0; p < g.size(); ++p) {
    const Sym2& m = metric[p];
    const double det = n == 1 ? m.xx : m.xx * m.yy - m.xy * m.xy;
    if (!(det > det_floor)) throw MetricDegenerate(p, det);
    if (n == 1) {
      out[p] = Sym2{1.0 / m.xx, 0.0, 0.0};
    } else {
      out[p] = Sym2{m.yy / det, -m.xy / det, m.xx / det};
    }
  }
  return out;
}

std::vector<Sym2> graph_inverse_truncated(const Grid& g, const std::vector<Vec3>& y) {
  const int n = g.dim;
  const int ncomp = n + 1;
  std::vector<Sym2> out(g.size());
  parallel_for(g.count[0], [&](std::ptrdiff_t iw) {
    const int i = static_cast<int>(iw);
    for (int j = 0; j < g.count[1]; ++j) {
      const int p = g.idx(i, j);
      Vec3 dy[2];
      displacement_gradients(g, y, i, j, dy);
      Sym2 m;
      for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
          double v = (a == b ? 1.0 : 0.0) - comp(dy[a], b) - comp(dy[b], a);
          for (int q = 0; q < ncomp; ++q) v -= comp(dy[a], q) * comp(dy[b], q);
          m.set(a, b, v);
        }
      }
      out[p] = m;
    }
  });
  return out;
}

std::vector<Vec3> graph_rhs(const Grid& g, const std::vector<Vec3>& y, bool linear) {
  const int n = g.dim;
  std::vector<Sym2> gi;
  if (!linear) gi = graph_inverse_exact(g, graph_metric(g, y));
  std::vector<Vec3> out(g.size());
  parallel_for(g.count[0], [&](std::ptrdiff_t iw) {
    const int i = static_cast<int>(iw);
    for (int j = 0; j < g.count[1]; ++j) {
      const int p = g.idx(i, j);
      Vec3 dd[3];
      dd[0] = d2_field(g, y, i, j, 0);
      if (n > 1) {
        dd[1] = d2_field_mixed(g, y, i, j);
        dd[2] = d2_field(g, y, i, j, 1);
      }
      auto second = [&](int a, int b) -> const Vec3& {
        if (a == 0 && b == 0) return dd[0];
        if (a == 1 && b == 1) return dd[2];
        return dd[1];
      };
      Vec3 acc{};
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          const double w = linear ? (a == b ? 1.0 : 0.0) : gi[p].at(a, b);
          acc += second(a, b) * w;
        }
      }
      out[p] = acc;
    }
  });
  return out;
}

GraphState make_graph_state(const Grid& grid, std::vector<Vec3> y0, std::vector<Vec3> v0) {
  if (y0.size() != static_cast<std::size_t>(grid.size()) || v0.size() != y0.size()) {
    throw DomainError("graph state fields do not match the grid");
  }
  GraphState gs;
  gs.grid = grid;
  gs.y = std::move(y0);
  gs.y_t = std::move(v0);
  return gs;
}

namespace {

double graph_grad_max(const Grid& g, const std::vector<Vec3>& y) {
  double m = 0.0;
  for (int i = 0; i < g.count[0]; ++i) {
    for (int j = 0; j < g.count[1]; ++j) {
      Vec3 dy[2];
      displacement_gradients(g, y, i, j, dy);
      for (int a = 0; a < g.dim; ++a) m = std::max(m, max_abs(dy[a]));
    }
  }
  return m;
}

double graph_cfl(const Grid& g, const std::vector<Sym2>& gi, double safety) {
  double dt = 1e300;
  for (int p = 0; p < g.size(); ++p) {
    for (int a = 0; a < g.dim; ++a) {
      const double gaa = gi[p].at(a, a);
      if (gaa > 0.0) dt = std::min(dt, g.spacing[a] / std::sqrt(gaa));
    }
  }
  return safety * dt;
}

}  // namespace

GraphStepStatus graph_step(GraphState& gs, const GraphOptions& opts, double dt_cap) {
  const Grid& g = gs.grid;
  if (graph_grad_max(g, gs.y) >= opts.grad_limit) return GraphStepStatus::RegimeExceeded;

  std::vector<Sym2> gi;
  if (!opts.linear) {
    try {
      gi = graph_inverse_exact(g, graph_metric(g, gs.y), opts.det_floor);
    } catch (const MetricDegenerate&) {
      return GraphStepStatus::Degenerate;
    }
  }
  std::vector<Vec3> f = graph_rhs(g, gs.y, opts.linear);

  if (gs.have_prev) {
    const double dtp = gs.dt_prev;
    parallel_for(g.size(), [&](std::ptrdiff_t p) {
      gs.y_t[p] = (gs.y[p] - gs.prev[p]) * (1.0 / dtp) + f[p] * (0.5 * dtp);
    });
  }

  double dt = opts.fixed_dt > 0.0
                  ? opts.fixed_dt
                  : (opts.linear ? 0.25 * std::min(g.spacing[0], g.dim > 1 ? g.spacing[1] : 1e300)
                                 : graph_cfl(g, gi, opts.cfl_safety));
  dt = std::min(dt, dt_cap);

  std::vector<Vec3> next(g.size());
  if (!gs.have_prev) {
    parallel_for(g.size(), [&](std::ptrdiff_t p) {
      next[p] = gs.y[p] + gs.y_t[p] * dt + f[p] * (0.5 * dt * dt);
    });
  } else {
    const double ratio = dt / gs.dt_prev;
    const double w = 0.5 * dt * (dt + gs.dt_prev);
    parallel_for(g.size(), [&](std::ptrdiff_t p) {
      next[p] = gs.y[p] + (gs.y[p] - gs.prev[p]) * ratio + f[p] * w;
    });
  }
  for (const Vec3& v : next) {
    if (!finite(v)) return GraphStepStatus::NonFinite;
  }
  gs.prev = std::move(gs.y);
  gs.y = std::move(next);
  gs.rhs_prev = std::move(f);
  gs.have_prev = true;
  gs.dt_prev = dt;
  gs.t += dt;
  gs.step += 1;
  return GraphStepStatus::Ok;
}

GraphStepStatus graph_run(GraphState& gs, double horizon, const GraphOptions& opts) {
  const double t_eps = 1e-12 * std::max(1.0, horizon);
  while (gs.t < horizon - t_eps) {
    const GraphStepStatus st = graph_step(gs, opts, horizon - gs.t);
    if (st != GraphStepStatus::Ok) return st;
  }
  return GraphStepStatus::Ok;
}

GraphProfile make_profile(const Grid& g, const std::string& name, int mode_k) {
  GraphProfile out;
  out.shape.resize(g.size());
  out.velocity.assign(g.size(), Vec3{});
  const int n = g.dim;
  const double k = static_cast<double>(mode_k);
  for (int i = 0; i < g.count[0]; ++i) {
    for (int j = 0; j < g.count[1]; ++j) {
      const int p = g.idx(i, j);
      const double u = g.coord(0, i);
      const double v = g.dim > 1 ? g.coord(1, j) : 0.0;
      Vec3 s{};
      if (name == "sine_height") {
        const double height = n == 1 ? std::sin(k * u) : std::sin(k * u) * std::sin(k * v);
        if (n == 1)
          s.y = height;
        else
          s.z = height;
      } else if (name == "sine_mixed") {
        // tangential plus height content; quadratic response is genuinely present
        if (n == 1) {
          s.x = 0.7 * std::sin(k * u);
          s.y = std::sin(k * u);
        } else {
          s.x = 0.7 * std::sin(k * u) * std::cos(k * v);
          s.y = 0.5 * std::cos(k * u) * std::sin(k * v);
          s.z = std::sin(k * u) * std::sin(k * v);
        }
      } else if (name == "bump") {
        const double du = std::cos(u) - 1.0;  // smooth, periodic, localized near u = 0
        const double dv = g.dim > 1 ? std::cos(v) - 1.0 : 0.0;
        const double height = std::exp(2.0 * (du + dv));
        if (n == 1)
          s.y = height;
        else
          s.z = height;
      } else {
        throw DomainError("unknown profile: " + name);
      }
      out.shape[p] = s;
    }
  }
  return out;
}

EpsScalingReport epsilon_scaling(const Grid& grid, const GraphProfile& profile,
                                 const std::vector<double>& eps_list, double horizon,
                                 const GraphOptions& opts) {
  if (profile.shape.size() != static_cast<std::size_t>(grid.size())) {
    throw DomainError("profile does not match grid");
  }
  EpsScalingReport rep;

  // common frozen dt across the sweep (flat-metric CFL with margin)
  GraphOptions run_opts = opts;
  if (run_opts.fixed_dt <= 0.0) {
    double dx = grid.spacing[0];
    if (grid.dim > 1) dx = std::min(dx, grid.spacing[1]);
    run_opts.fixed_dt = 0.2 * dx;
  }

  std::vector<std::vector<Vec3>> finals;
  std::vector<bool> clean;
  for (double eps : eps_list) {
    std::vector<Vec3> y0(grid.size()), v0(grid.size());
    for (int p = 0; p < grid.size(); ++p) {
      y0[p] = profile.shape[p] * eps;
      v0[p] = profile.velocity[p] * eps;
    }
    GraphState gs = make_graph_state(grid, std::move(y0), std::move(v0));
    double sup = 0.0;
    GraphStepStatus st = GraphStepStatus::Ok;
    const double t_eps = 1e-12 * std::max(1.0, horizon);
    while (gs.t < horizon - t_eps) {
      st = graph_step(gs, run_opts, horizon - gs.t);
      if (st != GraphStepStatus::Ok) break;
      sup = std::max(sup, max_norm_interior(grid, gs.y));
    }
    EpsScalingRow row;
    row.eps = eps;
    row.sup_norm = sup;
    row.verdict = st == GraphStepStatus::Ok
                      ? "ok"
                      : (st == GraphStepStatus::RegimeExceeded ? "excluded_regime" : "blowup");
    rep.rows.push_back(row);
    finals.push_back(st == GraphStepStatus::Ok ? gs.y : std::vector<Vec3>{});
    clean.push_back(st == GraphStepStatus::Ok);
    if (st == GraphStepStatus::Ok && eps > rep.empirical_eps0) rep.empirical_eps0 = eps;
  }

  // deviation from linear scaling between consecutive clean runs
  for (std::size_t k = 1; k < eps_list.size(); ++k) {
    if (!clean[k - 1] || !clean[k]) continue;
    const double ratio = eps_list[k - 1] / eps_list[k];
    double dev = 0.0;
    for (int p = 0; p < grid.size(); ++p) {
      dev = std::max(dev, max_abs(finals[k - 1][p] - finals[k][p] * ratio));
    }
    rep.rows[k - 1].deviation = dev;
  }
  for (std::size_t k = 0; k + 2 < eps_list.size(); ++k) {
    const double d1 = rep.rows[k].deviation;
    const double d2 = rep.rows[k + 1].deviation;
    if (d1 > 0.0 && d2 > 0.0) {
      const double lr = std::log(eps_list[k] / eps_list[k + 1]);
      rep.pair_orders.push_back(std::log(d1 / d2) / lr);
    }
  }
  return rep;
}

}  // namespace hmcf
