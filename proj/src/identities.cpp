#include "hmcf/identities.hpp"

#include <cmath>

#include "hmcf/errors.hpp"
#include "hmcf/exec.hpp"
#include "hmcf/flow.hpp"
#include "hmcf/radial.hpp"

namespace hmcf {

const char* identity_token(IdentityId id) {
  switch (id) {
    case IdentityId::SimonsH: return "simons_h";
    case IdentityId::SimonsA2: return "simons_a2";
    case IdentityId::MetricTt: return "metric_tt";
    case IdentityId::NormalTt: return "normal_tt";
    case IdentityId::SecondFormTt: return "second_form_tt";
    case IdentityId::MeanCurvatureTt: return "mean_curvature_tt";
    case IdentityId::A2Tt: return "a2_tt";
  }
  return "?";
}

const char* context_token(ResidualContext ctx) {
  switch (ctx) {
    case ResidualContext::AnalyticSphere: return "analytic_sphere";
    case ResidualContext::AnalyticCylinder: return "analytic_cylinder";
    case ResidualContext::SimulatedEllipse: return "simulated_ellipse";
    case ResidualContext::SimulatedCylinder: return "simulated_cylinder";
    case ResidualContext::SimulatedTorus: return "simulated_torus";
  }
  return "?";
}

namespace {

void check_triple(const SnapshotTriple& s) {
  if (s.prev == nullptr || s.mid == nullptr || s.next == nullptr || !(s.dt > 0.0)) {
    throw DomainError("snapshot triple incomplete");
  }
}

// Mixed time-space derivative d^2 X / dt dx^i by centered time differencing
// of the tangent fields.
inline Vec3 time_deriv_tangent(const SnapshotTriple& s, int p, int i) {
  return (s.next->tangent[i][p] - s.prev->tangent[i][p]) * (1.0 / (2.0 * s.dt));
}

inline Sym2 d_dt(const std::vector<Sym2>& plus, const std::vector<Sym2>& minus, int p, double dt) {
  return (plus[p] - minus[p]) * (1.0 / (2.0 * dt));
}

}  // namespace

std::vector<Sym2> residual_simons(const GeometryCache& c) {
  const int n = c.dim;
  std::vector<Sym2> lap = tensor_laplacian_h(c);
  std::vector<Sym2> hess = covariant_hessian(c, c.mean_curvature);
  std::vector<Sym2> out(c.grid.size());
  parallel_for(c.grid.size(), [&](std::ptrdiff_t p) {
    const Sym2& gi = c.inv_metric[p];
    const Sym2& h = c.second_form[p];
    Sym2 r;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double hgh = 0.0;
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m) hgh += h.at(i, l) * gi.at(l, m) * h.at(m, j);
        const double rhs = hess[p].at(i, j) + c.mean_curvature[p] * hgh -
                           c.norm_a_sq[p] * h.at(i, j);
        r.set(i, j, lap[p].at(i, j) - rhs);
      }
    }
    out[p] = r;
  });
  return out;
}

std::vector<double> residual_simons_a2(const GeometryCache& c) {
  const int n = c.dim;
  std::vector<double> lap = laplace_beltrami_scalar(c, c.norm_a_sq);
  std::vector<Sym2> hess = covariant_hessian(c, c.mean_curvature);
  std::vector<double> out(c.grid.size());
  parallel_for(c.grid.size(), [&](std::ptrdiff_t p) {
    const Sym2& gi = c.inv_metric[p];
    const Sym2& h = c.second_form[p];
    double hhess = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            hhess += gi.at(i, k) * gi.at(j, l) * h.at(k, l) * hess[p].at(i, j);
    const double rhs = 2.0 * hhess + 2.0 * c.grad_a_sq[p] +
                       2.0 * c.mean_curvature[p] * c.trace_a3[p] -
                       2.0 * c.norm_a_sq[p] * c.norm_a_sq[p];
    out[p] = lap[p] - rhs;
  });
  return out;
}

std::vector<Sym2> residual_metric_tt(const SnapshotTriple& s) {
  check_triple(s);
  const GeometryCache& c = *s.mid;
  const int n = c.dim;
  const double idt2 = 1.0 / (s.dt * s.dt);
  std::vector<Sym2> out(c.grid.size());
  parallel_for(c.grid.size(), [&](std::ptrdiff_t p) {
    Vec3 v[2];
    for (int i = 0; i < n; ++i) v[i] = time_deriv_tangent(s, static_cast<int>(p), i);
    Sym2 r;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double lhs = (s.next->metric[p].at(i, j) - 2.0 * c.metric[p].at(i, j) +
                            s.prev->metric[p].at(i, j)) *
                           idt2;
        const double rhs = -2.0 * c.mean_curvature[p] * c.second_form[p].at(i, j) +
                           2.0 * dot(v[i], v[j]);
        r.set(i, j, lhs - rhs);
      }
    }
    out[p] = r;
  });
  return out;
}

std::vector<Vec3> residual_normal_tt(const SnapshotTriple& s) {
  check_triple(s);
  const GeometryCache& c = *s.mid;
  const Grid& g = c.grid;
  const int n = c.dim;
  const double idt2 = 1.0 / (s.dt * s.dt);
  std::vector<Vec3> out(g.size());
  parallel_for(g.count[0], [&](std::ptrdiff_t iw) {
    const int i = static_cast<int>(iw);
    for (int j = 0; j < g.count[1]; ++j) {
      const int p = g.idx(i, j);
      const Vec3 lhs = (s.next->normal[p] - c.normal[p] * 2.0 + s.prev->normal[p]) * idt2;
      Vec3 v[2];
      double dH[2] = {0.0, 0.0};
      for (int a = 0; a < n; ++a) {
        v[a] = time_deriv_tangent(s, p, a);
        dH[a] = d1_field(g, c.mean_curvature, i, j, a);
      }
      const Sym2& gi = c.inv_metric[p];
      Vec3 rhs{};
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          rhs -= c.tangent[b][p] * (gi.at(a, b) * dH[a]);
          const double nv = dot(c.normal[p], v[a]);
          Vec3 bracket = -v[b];
          for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
              bracket += c.tangent[k][p] * (gi.at(k, l) *
                                            (2.0 * dot(c.tangent[b][p], v[l]) +
                                             dot(c.tangent[l][p], v[b])));
            }
          }
          rhs += bracket * (gi.at(a, b) * nv);
        }
      }
      out[p] = lhs - rhs;
    }
  });
  return out;
}

std::vector<Sym2> residual_second_form_tt(const SnapshotTriple& s) {
  check_triple(s);
  const GeometryCache& c = *s.mid;
  const int n = c.dim;
  const double idt2 = 1.0 / (s.dt * s.dt);
  std::vector<Sym2> lap = tensor_laplacian_h(c);
  std::vector<Sym2> out(c.grid.size());
  parallel_for(c.grid.size(), [&](std::ptrdiff_t p) {
    const Sym2& gi = c.inv_metric[p];
    const Sym2& h = c.second_form[p];
    Vec3 v[2];
    double nv[2] = {0.0, 0.0};
    for (int a = 0; a < n; ++a) {
      v[a] = time_deriv_tangent(s, static_cast<int>(p), a);
      nv[a] = dot(c.normal[p], v[a]);
    }
    double nvnv = 0.0;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) nvnv += gi.at(k, l) * nv[k] * nv[l];
    Sym2 r;
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double lhs = (s.next->second_form[p].at(i, j) - 2.0 * h.at(i, j) +
                            s.prev->second_form[p].at(i, j)) *
                           idt2;
        double hgh = 0.0;
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m) hgh += h.at(i, l) * h.at(m, j) * gi.at(l, m);
        double gamma_term = 0.0;
        for (int k = 0; k < n; ++k) {
          const double dgam =
              (s.next->christoffel[k][p].at(i, j) - s.prev->christoffel[k][p].at(i, j)) /
              (2.0 * s.dt);
          gamma_term += dgam * nv[k];
        }
        const double rhs = lap[p].at(i, j) - 2.0 * c.mean_curvature[p] * hgh +
                           c.norm_a_sq[p] * h.at(i, j) + nvnv * h.at(i, j) - 2.0 * gamma_term;
        r.set(i, j, lhs - rhs);
      }
    }
    out[p] = r;
  });
  return out;
}

std::vector<double> residual_mean_curvature_tt(const SnapshotTriple& s) {
  check_triple(s);
  const GeometryCache& c = *s.mid;
  const int n = c.dim;
  const double idt2 = 1.0 / (s.dt * s.dt);
  std::vector<double> lapH = laplace_beltrami_scalar(c, c.mean_curvature);
  std::vector<double> out(c.grid.size());
  parallel_for(c.grid.size(), [&](std::ptrdiff_t p) {
    const Sym2& gi = c.inv_metric[p];
    const Sym2& h = c.second_form[p];
    const double lhs =
        (s.next->mean_curvature[p] - 2.0 * c.mean_curvature[p] + s.prev->mean_curvature[p]) * idt2;
    Vec3 v[2];
    double nv[2] = {0.0, 0.0};
    for (int a = 0; a < n; ++a) {
      v[a] = time_deriv_tangent(s, static_cast<int>(p), a);
      nv[a] = dot(c.normal[p], v[a]);
    }
    const Sym2 dg = d_dt(s.next->metric, s.prev->metric, static_cast<int>(p), s.dt);
    const Sym2 dh = d_dt(s.next->second_form, s.prev->second_form, static_cast<int>(p), s.dt);

    double hvv = 0.0;  // g^ik g^jl h_ij <V_k, V_l>
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            hvv += gi.at(i, k) * gi.at(j, l) * h.at(i, j) * dot(v[k], v[l]);

    double nvnv = 0.0;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) nvnv += gi.at(k, l) * nv[k] * nv[l];

    double gamma_term = 0.0;  // g^ij dGamma^k_ij nv_k
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          const double dgam =
              (s.next->christoffel[k][p].at(i, j) - s.prev->christoffel[k][p].at(i, j)) /
              (2.0 * s.dt);
          gamma_term += gi.at(i, j) * dgam * nv[k];
        }

    double hdgdg = 0.0;  // g^ik g^jp g^lq h_ij dg_pq dg_kl
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            for (int pp = 0; pp < n; ++pp)
              for (int q = 0; q < n; ++q)
                hdgdg += gi.at(i, k) * gi.at(j, pp) * gi.at(l, q) * h.at(i, j) * dg.at(pp, q) *
                         dg.at(k, l);

    double dgdh = 0.0;  // g^ik g^jl dg_kl dh_ij
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            dgdh += gi.at(i, k) * gi.at(j, l) * dg.at(k, l) * dh.at(i, j);

    const double rhs = lapH[p] + c.mean_curvature[p] * c.norm_a_sq[p] - 2.0 * hvv +
                       c.mean_curvature[p] * nvnv - 2.0 * gamma_term + 2.0 * hdgdg - 2.0 * dgdh;
    out[p] = lhs - rhs;
  });
  return out;
}

std::vector<double> residual_a2_tt(const SnapshotTriple& s) {
  check_triple(s);
  const GeometryCache& c = *s.mid;
  const int n = c.dim;
  const double idt2 = 1.0 / (s.dt * s.dt);
  std::vector<double> lapA2 = laplace_beltrami_scalar(c, c.norm_a_sq);
  std::vector<double> out(c.grid.size());
  parallel_for(c.grid.size(), [&](std::ptrdiff_t p) {
    const Sym2& gi = c.inv_metric[p];
    const Sym2& h = c.second_form[p];
    const double lhs = (s.next->norm_a_sq[p] - 2.0 * c.norm_a_sq[p] + s.prev->norm_a_sq[p]) * idt2;
    Vec3 v[2];
    double nv[2] = {0.0, 0.0};
    for (int a = 0; a < n; ++a) {
      v[a] = time_deriv_tangent(s, static_cast<int>(p), a);
      nv[a] = dot(c.normal[p], v[a]);
    }
    const Sym2 dg = d_dt(s.next->metric, s.prev->metric, static_cast<int>(p), s.dt);
    const Sym2 dh = d_dt(s.next->second_form, s.prev->second_form, static_cast<int>(p), s.dt);

    double nvnv = 0.0;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) nvnv += gi.at(k, l) * nv[k] * nv[l];

    double dhdh = 0.0;  // g^ij g^kl dh_ik dh_jl
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            dhdh += gi.at(i, j) * gi.at(k, l) * dh.at(i, k) * dh.at(j, l);

    double hdgdh = 0.0;  // g^im g^jn g^kl h_jl dg_mn dh_ik
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m)
              for (int nn = 0; nn < n; ++nn)
                hdgdh += gi.at(i, m) * gi.at(j, nn) * gi.at(k, l) * h.at(j, l) * dg.at(m, nn) *
                         dh.at(i, k);

    double hhvv = 0.0;  // g^im g^jn g^kl h_ik h_jl <V_m, V_n>
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m)
              for (int nn = 0; nn < n; ++nn)
                hhvv += gi.at(i, m) * gi.at(j, nn) * gi.at(k, l) * h.at(i, k) * h.at(j, l) *
                        dot(v[m], v[nn]);

    double dgdg_mixed = 0.0;  // g^im dg_pq dg_mn h_ik h_jl (2 g^jp g^nq g^kl + g^jn g^kp g^lq)
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < n; ++m)
        for (int pp = 0; pp < n; ++pp)
          for (int q = 0; q < n; ++q)
            for (int nn = 0; nn < n; ++nn)
              for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j)
                  for (int l = 0; l < n; ++l) {
                    const double pre =
                        gi.at(i, m) * dg.at(pp, q) * dg.at(m, nn) * h.at(i, k) * h.at(j, l);
                    dgdg_mixed += pre * (2.0 * gi.at(j, pp) * gi.at(nn, q) * gi.at(k, l) +
                                         gi.at(j, nn) * gi.at(k, pp) * gi.at(l, q));
                  }

    double hgamma = 0.0;  // g^ij g^kl h_jl dGamma^p_ik nv_p
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            for (int pp = 0; pp < n; ++pp) {
              const double dgam =
                  (s.next->christoffel[pp][p].at(i, k) - s.prev->christoffel[pp][p].at(i, k)) /
                  (2.0 * s.dt);
              hgamma += gi.at(i, j) * gi.at(k, l) * h.at(j, l) * dgam * nv[pp];
            }

    const double rhs = lapA2[p] - 2.0 * c.grad_a_sq[p] +
                       2.0 * c.norm_a_sq[p] * c.norm_a_sq[p] + 2.0 * c.norm_a_sq[p] * nvnv +
                       2.0 * dhdh - 8.0 * hdgdh - 4.0 * hhvv + 2.0 * dgdg_mixed - 4.0 * hgamma;
    out[p] = lhs - rhs;
  });
  return out;
}

double residual_norm(IdentityId id, const SnapshotTriple& s) {
  check_triple(s);
  const Grid& g = s.mid->grid;
  switch (id) {
    case IdentityId::SimonsH: return max_norm_interior(g, residual_simons(*s.mid));
    case IdentityId::SimonsA2: return max_norm_interior(g, residual_simons_a2(*s.mid));
    case IdentityId::MetricTt: return max_norm_interior(g, residual_metric_tt(s));
    case IdentityId::NormalTt: return max_norm_interior(g, residual_normal_tt(s));
    case IdentityId::SecondFormTt: return max_norm_interior(g, residual_second_form_tt(s));
    case IdentityId::MeanCurvatureTt: return max_norm_interior(g, residual_mean_curvature_tt(s));
    case IdentityId::A2Tt: return max_norm_interior(g, residual_a2_tt(s));
  }
  throw DomainError("unknown identity");
}

std::vector<double> ResidualReport::orders(IdentityId id, ResidualContext ctx) const {
  std::vector<const ResidualRow*> seq;
  for (const ResidualRow& r : rows) {
    if (r.id == id && r.context == ctx) seq.push_back(&r);
  }
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
    const double num = std::log(seq[k]->residual / seq[k + 1]->residual);
    const double den = std::log(seq[k]->dx / seq[k + 1]->dx);
    out.push_back(num / den);
  }
  return out;
}

namespace {

struct TripleData {
  GeometryCache prev, mid, next;
  double dt = 0.0;
};

TripleData analytic_triple(ResidualContext ctx, int n_level, double r0, double t_frac,
                           double dt_snap) {
  const double c_coeff = ctx == ResidualContext::AnalyticSphere ? 2.0 : 1.0;
  const double t0 = collapse_time_quadrature(r0, 0.0, c_coeff);
  const double t_star = t_frac * t0;
  const std::array<double, 3> times = {t_star - dt_snap, t_star, t_star + dt_snap};
  std::vector<RadialState> samples =
      sample_radial({r0, 0.0, 0.0, c_coeff}, std::span<const double>(times));

  TripleData out;
  out.dt = dt_snap;
  for (int k = 0; k < 3; ++k) {
    const double r = samples[k].r;
    GeometryCache cache;
    if (ctx == ResidualContext::AnalyticSphere) {
      SphereFamily fam(r);
      Grid grid = grid_sphere_band(n_level, 2 * n_level, std::acos(-1.0) / 4.0);
      cache = build_cache(make_immersion(grid, fam), CacheOptions{}, &fam);
    } else {
      CylinderFamily fam(r);
      Grid grid = grid_cylinder(n_level, 16, 1.0);
      cache = build_cache(make_immersion(grid, fam), CacheOptions{}, &fam);
    }
    if (k == 0)
      out.prev = std::move(cache);
    else if (k == 1)
      out.mid = std::move(cache);
    else
      out.next = std::move(cache);
  }
  return out;
}

TripleData simulated_triple(const ResidualStudy& cfg, int n_level) {
  const int scale = n_level / cfg.levels.front();
  const long steps_to_star = static_cast<long>(cfg.base_steps) * scale;
  const double dt = cfg.t_star / static_cast<double>(steps_to_star);
  // fixed stride in steps, so the snapshot spacing refines with dt
  const long stride = cfg.stride;

  Immersion im0 = cfg.context == ResidualContext::SimulatedEllipse
                      ? make_ellipse(cfg.ellipse_a, cfg.ellipse_b, n_level)
                      : (cfg.context == ResidualContext::SimulatedTorus
                             ? make_torus(cfg.torus_major, cfg.torus_minor, n_level, n_level)
                             : make_cylinder(1.0, cfg.cylinder_len, n_level, cfg.cylinder_axial));
  std::vector<Vec3> v0(im0.points.size(), Vec3{});
  FlowOptions opts;
  opts.fixed_dt = dt;
  FlowState fs = make_flow_state(im0, v0, opts);
  StepScratch scratch;

  TripleData out;
  out.dt = dt * static_cast<double>(stride);
  const long capture[3] = {steps_to_star - stride, steps_to_star, steps_to_star + stride};
  for (long s = 1; s <= capture[2]; ++s) {
    if (flow_step(fs, opts, scratch).has_value()) {
      throw DomainError("simulated residual flow terminated early");
    }
    if (s == capture[0]) out.prev = build_cache(fs.im);
    if (s == capture[1]) out.mid = build_cache(fs.im);
    if (s == capture[2]) out.next = build_cache(fs.im);
  }
  return out;
}

}  // namespace

ResidualReport run_residual_study(const ResidualStudy& cfg) {
  ResidualReport report;
  const bool analytic = cfg.context == ResidualContext::AnalyticSphere ||
                        cfg.context == ResidualContext::AnalyticCylinder;
  double dt_snap = 0.0;
  if (analytic) {
    const double c_coeff = cfg.context == ResidualContext::AnalyticSphere ? 2.0 : 1.0;
    dt_snap = cfg.coarse_dt_frac * collapse_time_quadrature(cfg.r0, 0.0, c_coeff);
  }
  for (std::size_t lev = 0; lev < cfg.levels.size(); ++lev) {
    const int n_level = cfg.levels[lev];
    TripleData data;
    if (analytic) {
      const double dt_level = dt_snap / static_cast<double>(1 << lev);
      data = analytic_triple(cfg.context, n_level, cfg.r0, cfg.t_frac, dt_level);
    } else {
      data = simulated_triple(cfg, n_level);
    }
    SnapshotTriple triple{&data.prev, &data.mid, &data.next, data.dt};
    for (IdentityId id : kAllIdentities) {
      ResidualRow row;
      row.id = id;
      row.context = cfg.context;
      row.level = n_level;
      row.dx = data.mid.grid.spacing[0];
      row.dt = data.dt;
      row.residual = residual_norm(id, triple);
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace hmcf
