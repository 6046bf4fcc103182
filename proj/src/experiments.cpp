#include "hmcf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "hmcf/csv_io.hpp"
#include "hmcf/errors.hpp"
#include "hmcf/flow.hpp"
#include "hmcf/identities.hpp"
#include "hmcf/minkowski.hpp"
#include "hmcf/radial.hpp"
#include "hmcf/stability.hpp"

namespace hmcf {

namespace {

namespace fs = std::filesystem;

int default_n2(const SimConfig& cfg) {
  if (cfg.n2 > 0) return cfg.n2;
  if (cfg.geometry == "sphere_band") return 4 * cfg.n1;  // matched beta spacing
  if (cfg.geometry == "cylinder") {
    return std::max(8,
                    static_cast<int>(std::lround(cfg.n1 * cfg.length / (2.0 * std::numbers::pi))));
  }
  if (cfg.geometry == "torus_band") return cfg.n1;
  return cfg.n1;
}

FlowOptions flow_options(const SimConfig& cfg) {
  FlowOptions opts;
  opts.cfl_safety = cfg.cfl_safety;
  opts.det_floor = cfg.det_floor;
  opts.h_max = cfg.h_max;
  opts.eps_light = cfg.light_eps;
  if (cfg.fixed_dt > 0.0) opts.fixed_dt = cfg.fixed_dt;
  opts.deturck = cfg.deturck;
  if (cfg.geometry == "sphere_band") opts.band_fill = BandFillMode::RadialExtension;
  return opts;
}

}  // namespace

Immersion build_geometry(const SimConfig& cfg) {
  const int n2 = default_n2(cfg);
  if (cfg.geometry == "circle") return make_circle(cfg.radius, cfg.n1);
  if (cfg.geometry == "ellipse") return make_ellipse(cfg.ellipse_a, cfg.ellipse_b, cfg.n1);
  if (cfg.geometry == "sphere_band") {
    return make_sphere_band(cfg.radius, cfg.alpha_max, cfg.n1, n2);
  }
  if (cfg.geometry == "cylinder") return make_cylinder(cfg.radius, cfg.length, cfg.n1, n2);
  if (cfg.geometry == "torus_band") {
    return make_torus(cfg.torus_major, cfg.torus_minor, cfg.n1, n2);
  }
  if (cfg.geometry == "flat_band") {
    if (cfg.n2 > 0) return make_flat_sheet(cfg.length, cfg.length, cfg.n1, cfg.n2);
    return make_flat_curve(cfg.length, cfg.n1);
  }
  throw DomainError("geometry '" + cfg.geometry + "' has no immersion builder");
}

std::vector<Vec3> radial_velocity_field(const Immersion& im, double magnitude) {
  std::vector<Vec3> v(im.points.size(), Vec3{});
  if (magnitude == 0.0) return v;
  const Vec3 c = centroid(im);
  for (std::size_t p = 0; p < im.points.size(); ++p) {
    const Vec3 d = im.points[p] - c;
    const double r = norm(d);
    if (r <= 0.0) throw DomainError("radial velocity undefined at the centroid");
    v[p] = d * (magnitude / r);
  }
  return v;
}

ExperimentResult run_simulate(const SimConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  Immersion x0 = build_geometry(cfg);
  const FlowOptions opts = flow_options(cfg);
  FlowState state = make_flow_state(x0, radial_velocity_field(x0, cfg.velocity), opts);
  write_mesh_snapshot(dir / "mesh_initial.txt", state.im);

  RunResult rr = flow_run(state, cfg.t_end, opts, cfg.snapshot_every);

  CsvWriter csv(dir / "trajectory.csv", "t,quantity,value", cfg.precision);
  for (const SnapshotStats& s : rr.stats) {
    const std::string t = format_double(s.t, cfg.precision);
    auto put = [&](const char* q, double v) {
      csv.row({t, q, format_double(v, cfg.precision)});
    };
    put("r_mean", s.r_mean);
    put("r_min", s.r_min);
    put("r_max", s.r_max);
    put("spread_rel", s.r_mean > 0.0 ? (s.r_max - s.r_min) / s.r_mean : 0.0);
    put("det_g_min", s.det_g_min);
    put("h_abs_max", s.h_abs_max);
    put("kinetic", s.kinetic);
    put("area", s.area);
    put("energy", s.kinetic + s.area);
    put("gauss_residual", s.gauss_residual);
    if (cfg.deturck) put("deturck_max", s.deturck_max);
  }
  write_mesh_snapshot(dir / "mesh_final.txt", state.im);

  ExperimentResult res;
  switch (rr.event.kind) {
    case FlowEventKind::Finished:
      res.exit_code = 0;
      res.summary = "finished at t = " + format_double(rr.event.t, 9);
      break;
    case FlowEventKind::Collapse:
      res.exit_code = 2;
      res.summary = "collapse detected at t = " + format_double(rr.event.t, 9);
      break;
    case FlowEventKind::BlowUp:
      res.exit_code = 3;
      res.summary = "curvature blow-up at t = " + format_double(rr.event.t, 9);
      break;
  }
  return res;
}

ExperimentResult run_oracle(const SimConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  RadialOptions ropts;
  ropts.tol = cfg.ode_tol;
  const RadialResult rr = integrate_radial({cfg.r0, cfg.r1, 0.0, cfg.c}, cfg.t_end, ropts);
  const double t0_quad = collapse_time_quadrature(cfg.r0, cfg.r1, cfg.c);
  const RadialClassification cls = classify_radial_phase(cfg.r0, cfg.r1, cfg.c);

  CsvWriter traj(dir / "trajectory.csv", "t,quantity,value", cfg.precision);
  for (const RadialState& s : rr.trajectory) {
    traj.row({format_double(s.t, cfg.precision), "r", format_double(s.r, cfg.precision)});
    traj.row({format_double(s.t, cfg.precision), "r_t", format_double(s.r_t, cfg.precision)});
  }

  CsvWriter summary(dir / "summary.csv", "key,value", cfg.precision);
  summary.row({"t0_quadrature", format_double(t0_quad, cfg.precision)});
  const bool collapsed = rr.event == RadialEventKind::Collapse;
  summary.row({"t0_ode", collapsed ? format_double(rr.t_collapse, cfg.precision) : "n/a"});
  summary.row({"classification", cls.phase == RadialPhase::MonotoneCollapse
                                     ? "monotone_collapse"
                                     : "expand_then_collapse"});
  summary.row({"r_max", format_double(cls.r_max, cfg.precision)});
  summary.row({"t_max", format_double(cls.t_max, cfg.precision)});
  summary.row({"r_t_sign_changes", std::to_string(rr.r_t_sign_changes)});
  summary.row({"first_integral_max_drift", format_double(rr.max_first_integral_drift, 6)});

  ExperimentResult res;
  res.exit_code = collapsed ? 2 : 0;
  res.summary = collapsed ? "collapse at t0 = " + format_double(rr.t_collapse, 9)
                          : "reached t_end without collapse";
  return res;
}

ExperimentResult run_verify(const SimConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  ResidualStudy study;
  if (cfg.geometry == "sphere_band") {
    study.context = ResidualContext::AnalyticSphere;
    study.levels = cfg.levels.empty() ? std::vector<int>{17, 33, 65} : cfg.levels;
  } else if (cfg.geometry == "cylinder") {
    study.context = ResidualContext::AnalyticCylinder;
    study.levels = cfg.levels.empty() ? std::vector<int>{16, 32, 64} : cfg.levels;
  } else if (cfg.geometry == "ellipse") {
    study.context = ResidualContext::SimulatedEllipse;
    study.levels = cfg.levels.empty() ? std::vector<int>{48, 96, 192} : cfg.levels;
  } else if (cfg.geometry == "torus_band") {
    study.context = ResidualContext::SimulatedTorus;
    study.levels = cfg.levels.empty() ? std::vector<int>{16, 32, 64} : cfg.levels;
  } else {
    throw DomainError("verify requires sphere_band, cylinder, ellipse or torus_band");
  }
  study.r0 = cfg.r0;
  study.t_star = cfg.t_star;
  study.ellipse_a = cfg.ellipse_a;
  study.ellipse_b = cfg.ellipse_b;

  const ResidualReport report = run_residual_study(study);

  CsvWriter csv(dir / "residuals.csv", "identity_id,context,N,dx,dt,residual,order",
                cfg.precision);
  const bool with_orders = study.levels.size() >= 3;  // orders need three levels
  for (IdentityId id : kAllIdentities) {
    const std::vector<double> ords = report.orders(id, study.context);
    int idx = 0;
    for (const ResidualRow& r : report.rows) {
      if (r.id != id || r.context != study.context) continue;
      csv.row({identity_token(id), context_token(study.context), std::to_string(r.level),
               format_double(r.dx, cfg.precision), format_double(r.dt, cfg.precision),
               format_double(r.residual, cfg.precision),
               (idx == 0 || !with_orders) ? "" : format_double(ords[idx - 1], 6)});
      ++idx;
    }
  }
  ExperimentResult res;
  res.summary = "residual study written to " + (dir / "residuals.csv").string();
  return res;
}

ExperimentResult run_minkowski(const SimConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  Immersion x0 = build_geometry(cfg);
  // inward unit radial profile; flat bands take a transverse sine mode instead
  std::vector<Vec3> v1;
  if (cfg.geometry == "flat_band") {
    v1.resize(x0.points.size());
    for (int i = 0; i < x0.grid.count[0]; ++i) {
      for (int j = 0; j < x0.grid.count[1]; ++j) {
        const double s = std::sin(2.0 * std::numbers::pi * i / x0.grid.count[0]);
        v1[x0.grid.idx(i, j)] = x0.ambient == 3 ? Vec3{0.0, 0.0, s} : Vec3{0.0, s, 0.0};
      }
    }
  } else {
    v1 = radial_velocity_field(x0, -1.0);
  }

  FlowOptions opts = flow_options(cfg);

  // right-hand-side gap over the eps family
  GeometryCache cache = build_cache(x0);
  std::vector<Vec3> hmcf = flow_rhs(cache);
  std::vector<double> rhs_gap;
  for (double eps : cfg.eps_list) {
    std::vector<Vec3> vel(v1.size());
    for (std::size_t p = 0; p < v1.size(); ++p) vel[p] = v1[p] * eps;
    std::vector<Vec3> ext = extremal_rhs(cache, vel, cfg.light_eps);
    double gap = 0.0;
    for_each_interior(x0.grid, [&](int p, int, int) {
      gap = std::max(gap, max_abs(ext[p] - hmcf[p]));
    });
    rhs_gap.push_back(gap);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 0; k < cfg.eps_list.size(); ++k) {
    if (cfg.eps_list[k] <= 0.0 || rhs_gap[k] <= 0.0) continue;
    const double lx = std::log(cfg.eps_list[k]), ly = std::log(rhs_gap[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  const double rhs_exponent = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;

  // zero-velocity coincidence
  std::vector<Vec3> zero_vel(v1.size(), Vec3{});
  std::vector<Vec3> ext0 = extremal_rhs(cache, zero_vel, cfg.light_eps);
  double coincidence = 0.0, scale = 0.0;
  for_each_interior(x0.grid, [&](int p, int, int) {
    coincidence = std::max(coincidence, max_abs(ext0[p] - hmcf[p]));
    scale = std::max(scale, max_abs(hmcf[p]));
  });
  const double rel_coincidence = scale > 0.0 ? coincidence / scale : coincidence;

  // trajectory-level comparison
  const LimitComparison lc = limit_comparison(x0, v1, cfg.eps_list, cfg.horizon, opts);

  CsvWriter csv(dir / "minkowski.csv", "eps,t,discrepancy,exponent", cfg.precision);
  for (const LimitCurvePoint& pt : lc.curve) {
    csv.row({format_double(pt.eps, cfg.precision), format_double(pt.t, cfg.precision),
             format_double(pt.discrepancy, cfg.precision), format_double(lc.exponent, 6)});
  }

  CsvWriter summary(dir / "summary.csv", "key,value", cfg.precision);
  summary.row({"rhs_exponent", format_double(rhs_exponent, 6)});
  for (std::size_t k = 0; k < cfg.eps_list.size(); ++k) {
    summary.row({"rhs_gap_eps_" + format_double(cfg.eps_list[k], 6),
                 format_double(rhs_gap[k], cfg.precision)});
  }
  summary.row({"zero_velocity_coincidence_rel", format_double(rel_coincidence, 6)});
  summary.row({"trajectory_exponent", format_double(lc.exponent, 6)});

  ExperimentResult res;
  res.summary = "rhs exponent " + format_double(rhs_exponent, 4) + ", trajectory exponent " +
                format_double(lc.exponent, 4);
  return res;
}

ExperimentResult run_stability(const SimConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);

  const int dim = cfg.n2 > 0 ? 2 : 1;
  const Grid grid = grid_graph_domain(dim, cfg.n1, cfg.n2 > 0 ? cfg.n2 : cfg.n1);
  const GraphProfile profile = make_profile(grid, cfg.profile, cfg.mode_k);
  GraphOptions gopts;
  gopts.cfl_safety = cfg.cfl_safety;
  gopts.det_floor = cfg.det_floor;
  if (cfg.fixed_dt > 0.0) gopts.fixed_dt = cfg.fixed_dt;

  const EpsScalingReport rep = epsilon_scaling(grid, profile, cfg.eps_list, cfg.horizon, gopts);

  CsvWriter csv(dir / "stability.csv", "eps,t,sup_norm,deviation,verdict", cfg.precision);
  for (const EpsScalingRow& r : rep.rows) {
    csv.row({format_double(r.eps, cfg.precision), format_double(cfg.horizon, cfg.precision),
             format_double(r.sup_norm, cfg.precision),
             r.deviation >= 0.0 ? format_double(r.deviation, cfg.precision) : "",
             r.verdict});
  }
  CsvWriter summary(dir / "summary.csv", "key,value", cfg.precision);
  for (std::size_t k = 0; k < rep.pair_orders.size(); ++k) {
    summary.row({"pair_order_" + std::to_string(k), format_double(rep.pair_orders[k], 6)});
  }
  summary.row({"empirical_eps0", format_double(rep.empirical_eps0, cfg.precision)});

  ExperimentResult res;
  res.summary = rep.pair_orders.empty()
                    ? "scaling sweep written"
                    : "leading pair order " + format_double(rep.pair_orders.front(), 4);
  return res;
}

ExperimentResult run_experiment(const SimConfig& cfg) {
  if (cfg.experiment == "simulate") return run_simulate(cfg);
  if (cfg.experiment == "oracle") return run_oracle(cfg);
  if (cfg.experiment == "verify") return run_verify(cfg);
  if (cfg.experiment == "minkowski") return run_minkowski(cfg);
  if (cfg.experiment == "stability") return run_stability(cfg);
  throw DomainError("unknown experiment '" + cfg.experiment + "'");
}

}  // namespace hmcf
