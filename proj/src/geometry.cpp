#include "hmcf/geometry.hpp"

#include <cmath>
#include <string>

#include "hmcf/errors.hpp"
#include "hmcf/exec.hpp"

namespace hmcf {

namespace {

void fill_derivatives(const Immersion& im, const AnalyticFamily* exact, GeometryCache& c) {
  const Grid& g = im.grid;
  const int n = g.dim;
  c.tangent[0].resize(g.size());
  if (n > 1) c.tangent[1].resize(g.size());
  c.dd00.resize(g.size());
  if (n > 1) {
    c.dd01.resize(g.size());
    c.dd11.resize(g.size());
  }
  parallel_for(g.count[0], [&](std::ptrdiff_t i) {
    for (int j = 0; j < g.count[1]; ++j) {
      const int p = g.idx(static_cast<int>(i), j);
      if (exact != nullptr) {
        const double u = g.coord(0, static_cast<int>(i));
        const double v = g.coord(1, j);
        c.tangent[0][p] = exact->d1(u, v, 0);
        c.dd00[p] = exact->d2(u, v, 0, 0);
        if (n > 1) {
          c.tangent[1][p] = exact->d1(u, v, 1);
          c.dd01[p] = exact->d2(u, v, 0, 1);
          c.dd11[p] = exact->d2(u, v, 1, 1);
        }
      } else {
        c.tangent[0][p] = d1_position(g, im.points, static_cast<int>(i), j, 0);
        c.dd00[p] = d2_position(g, im.points, static_cast<int>(i), j, 0);
        if (n > 1) {
          c.tangent[1][p] = d1_position(g, im.points, static_cast<int>(i), j, 1);
          c.dd01[p] = d2_position_mixed(g, im.points, static_cast<int>(i), j);
          c.dd11[p] = d2_position(g, im.points, static_cast<int>(i), j, 1);
        }
      }
    }
  });
}

void fill_metric(GeometryCache& c) {
  const int n = c.dim;
  c.metric.resize(c.grid.size());
  parallel_for(c.grid.size(), [&](std::ptrdiff_t p) {
    Sym2 m;
    m.xx = dot(c.tangent[0][p], c.tangent[0][p]);
    if (n > 1) {
      m.xy = dot(c.tangent[0][p], c.tangent[1][p]);
      m.yy = dot(c.tangent[1][p], c.tangent[1][p]);
    }
    c.metric[p] = m;
  });
}

void fill_inverse(GeometryCache& c, double det_floor) {
  const int n = c.dim;
  c.inv_metric.resize(c.grid.size());
  c.det_g.resize(c.grid.size());
  parallel_for(c.grid.size(), [&](std::ptrdiff_t p) {
    const Sym2& m = c.metric[p];
    if (n == 1) {
      c.det_g[p] = m.xx;
      c.inv_metric[p] = Sym2{m.xx > 0.0 ? 1.0 / m.xx : 0.0, 0.0, 0.0};
    } else {
      const double det = m.xx * m.yy - m.xy * m.xy;
      c.det_g[p] = det;
      if (det > 0.0) {
        c.inv_metric[p] = Sym2{m.yy / det, -m.xy / det, m.xx / det};
      }
    }
  });
  for (int p = 0; p < c.grid.size(); ++p) {
    if (!(c.det_g[p] > det_floor)) throw MetricDegenerate(p, c.det_g[p]);
  }
}

// Raw normals plus a single deterministic orientation flip: the inner normal
// must point toward the enclosed region, decided at the point farthest from
// the centroid (per-point flipping is discontinuous on tori).
void fill_normal(const Immersion& im, GeometryCache& c, double frame_tol) {
  const Grid& g = im.grid;
  const int n = g.dim;
  c.normal.resize(g.size());
  std::vector<char> degenerate(g.size(), 0);
  parallel_for(g.size(), [&](std::ptrdiff_t p) {
    if (n == 1) {
      const Vec3& t = c.tangent[0][p];
      const double len = norm(t);
      if (len <= frame_tol) {
        degenerate[p] = 1;
        return;
      }
      c.normal[p] = Vec3{-t.y / len, t.x / len, 0.0};
    } else {
      const Vec3 cr = cross(c.tangent[0][p], c.tangent[1][p]);
      const double len = norm(cr);
      if (len <= frame_tol * norm(c.tangent[0][p]) * norm(c.tangent[1][p]) || len == 0.0) {
        degenerate[p] = 1;
        return;
      }
      c.normal[p] = cr * (1.0 / len);
    }
  });
  for (int p = 0; p < g.size(); ++p) {
    if (degenerate[p]) throw DegenerateFrame(p);
  }

  const Vec3 cen = centroid(im);
  int far_point = 0;
  double far_dist = -1.0;
  for (int p = 0; p < g.size(); ++p) {
    const double d = dot(im.points[p] - cen, im.points[p] - cen);
    if (d > far_dist) {
      far_dist = d;
      far_point = p;
    }
  }
  if (dot(c.normal[far_point], im.points[far_point] - cen) > 0.0) {
    parallel_for(g.size(), [&](std::ptrdiff_t p) { c.normal[p] = -c.normal[p]; });
  }
}

void fill_second_form(GeometryCache& c) {
  const int n = c.dim;
  c.second_form.resize(c.grid.size());
  parallel_for(c.grid.size(), [&](std::ptrdiff_t p) {
    Sym2 h;
    h.xx = dot(c.normal[p], c.dd00[p]);
    if (n > 1) {
      h.xy = dot(c.normal[p], c.dd01[p]);
      h.yy = dot(c.normal[p], c.dd11[p]);
    }
    c.second_form[p] = h;
  });
}

void fill_mean_curvature(GeometryCache& c) {
  const int n = c.dim;
  c.mean_curvature.resize(c.grid.size());
  parallel_for(c.grid.size(), [&](std::ptrdiff_t p) {
    double h = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        h += c.inv_metric[p].at(i, j) * c.second_form[p].at(i, j);
      }
    }
    c.mean_curvature[p] = h;
  });
}

void fill_christoffel(GeometryCache& c) {
  const int n = c.dim;
  for (int k = 0; k < n; ++k) c.christoffel[k].resize(c.grid.size());
  parallel_for(c.grid.size(), [&](std::ptrdiff_t p) {
    for (int k = 0; k < n; ++k) {
      Sym2 gam;
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          double v = 0.0;
          for (int l = 0; l < n; ++l) {
            v += c.inv_metric[p].at(k, l) * dot(c.second_deriv(p, i, j), c.tangent[l][p]);
          }
          gam.set(i, j, v);
        }
      }
      c.christoffel[k][p] = gam;
    }
  });
}

void fill_contractions(GeometryCache& c) {
  const int n = c.dim;
  c.norm_a_sq.resize(c.grid.size());
  c.trace_a3.resize(c.grid.size());
  parallel_for(c.grid.size(), [&](std::ptrdiff_t p) {
    const Sym2& gi = c.inv_metric[p];
    const Sym2& h = c.second_form[p];
    double a2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) a2 += gi.at(i, j) * gi.at(k, l) * h.at(i, k) * h.at(j, l);
    double a3 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m)
              for (int q = 0; q < n; ++q)
                a3 += gi.at(i, j) * gi.at(k, l) * gi.at(m, q) * h.at(i, k) * h.at(l, m) *
                      h.at(q, j);
    c.norm_a_sq[p] = a2;
    c.trace_a3[p] = a3;
  });
}

void validate_cache(const GeometryCache& c) {
  auto check = [&](const auto& field, const char* name) {
    for (std::size_t p = 0; p < field.size(); ++p) {
      if (!finite(field[p])) {
        throw NonFiniteField(std::string(name) + " not finite at point " + std::to_string(p));
      }
    }
  };
  check(c.metric, "metric");
  check(c.inv_metric, "inverse metric");
  check(c.normal, "normal");
  check(c.second_form, "second fundamental form");
  check(c.mean_curvature, "mean curvature");
  check(c.norm_a_sq, "|A|^2");
  check(c.grad_a_sq, "|grad A|^2");
}

}  // namespace

void compute_grad_a(GeometryCache& c) {
  const Grid& g = c.grid;
  const int n = c.dim;
  for (int k = 0; k < n; ++k) c.grad_a[k].resize(g.size());
  c.grad_a_sq.resize(g.size());
  parallel_for(g.count[0], [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < g.count[1]; ++j) {
      const int p = g.idx(i, j);
      Sym2 dh[2];
      dh[0] = d1_field(g, c.second_form, i, j, 0);
      if (n > 1) dh[1] = d1_field(g, c.second_form, i, j, 1);
      for (int k = 0; k < n; ++k) {
        Sym2 t;
        for (int a = 0; a < n; ++a) {
          for (int b = a; b < n; ++b) {
            double v = dh[k].at(a, b);
            for (int l = 0; l < n; ++l) {
              v -= c.christoffel[l][p].at(k, a) * c.second_form[p].at(l, b);
              v -= c.christoffel[l][p].at(k, b) * c.second_form[p].at(a, l);
            }
            t.set(a, b, v);
          }
        }
        c.grad_a[k][p] = t;
      }
      const Sym2& gi = c.inv_metric[p];
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        for (int q = 0; q < n; ++q)
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              for (int d = 0; d < n; ++d)
                for (int e = 0; e < n; ++e)
                  s += gi.at(k, q) * gi.at(a, b) * gi.at(d, e) * c.grad_a[k][p].at(a, d) *
                       c.grad_a[q][p].at(b, e);
      c.grad_a_sq[p] = s;
    }
  });
}

GeometryCache build_cache(const Immersion& im, const CacheOptions& opts,
                          const AnalyticFamily* exact) {
  if (opts.validate) {
    for (std::size_t p = 0; p < im.points.size(); ++p) {
      if (!finite(im.points[p])) {
        throw NonFiniteField("immersion point " + std::to_string(p) + " not finite");
      }
    }
  }
  GeometryCache c;
  c.grid = im.grid;
  c.dim = im.grid.dim;
  fill_derivatives(im, exact, c);
  fill_metric(c);
  fill_inverse(c, opts.det_floor);
  fill_normal(im, c, opts.frame_tol);
  fill_second_form(c);
  fill_mean_curvature(c);
  fill_christoffel(c);
  fill_contractions(c);
  compute_grad_a(c);
  if (opts.validate) validate_cache(c);
  return c;
}

std::vector<Sym2> compute_metric(const Immersion& im) {
  GeometryCache c;
  c.grid = im.grid;
  c.dim = im.grid.dim;
  fill_derivatives(im, nullptr, c);
  fill_metric(c);
  for (std::size_t p = 0; p < c.metric.size(); ++p) {
    if (!finite(c.metric[p])) throw NonFiniteField("metric not finite at point " + std::to_string(p));
  }
  return c.metric;
}

InverseMetric compute_inverse_metric(const Grid& grid, int dim, const std::vector<Sym2>& metric,
                                     double det_floor) {
  GeometryCache c;
  c.grid = grid;
  c.dim = dim;
  c.metric = metric;
  fill_inverse(c, det_floor);
  return {std::move(c.inv_metric), std::move(c.det_g)};
}

std::vector<Vec3> compute_normal(const Immersion& im, double frame_tol) {
  GeometryCache c;
  c.grid = im.grid;
  c.dim = im.grid.dim;
  fill_derivatives(im, nullptr, c);
  fill_normal(im, c, frame_tol);
  return std::move(c.normal);
}

std::vector<Sym2> compute_second_form(const Immersion& im, const std::vector<Vec3>& normal) {
  GeometryCache c;
  c.grid = im.grid;
  c.dim = im.grid.dim;
  fill_derivatives(im, nullptr, c);
  c.normal = normal;
  fill_second_form(c);
  return std::move(c.second_form);
}

std::vector<double> compute_mean_curvature(const Grid& grid, int dim,
                                           const std::vector<Sym2>& inv_metric,
                                           const std::vector<Sym2>& second_form) {
  GeometryCache c;
  c.grid = grid;
  c.dim = dim;
  c.inv_metric = inv_metric;
  c.second_form = second_form;
  fill_mean_curvature(c);
  return std::move(c.mean_curvature);
}

std::array<std::vector<Sym2>, 2> compute_christoffel(const Immersion& im,
                                                     const std::vector<Sym2>& inv_metric) {
  GeometryCache c;
  c.grid = im.grid;
  c.dim = im.grid.dim;
  fill_derivatives(im, nullptr, c);
  c.inv_metric = inv_metric;
  fill_christoffel(c);
  return std::move(c.christoffel);
}

std::vector<Vec3> laplace_beltrami(const GeometryCache& c, const std::vector<Vec3>& field,
                                   FieldKind kind) {
  const Grid& g = c.grid;
  const int n = c.dim;
  const bool pos = kind == FieldKind::Position;
  std::vector<Vec3> out(g.size());
  parallel_for(g.count[0], [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < g.count[1]; ++j) {
      const int p = g.idx(i, j);
      Vec3 d1[2], d2[3];
      d1[0] = pos ? d1_position(g, field, i, j, 0) : d1_field(g, field, i, j, 0);
      d2[0] = pos ? d2_position(g, field, i, j, 0) : d2_field(g, field, i, j, 0);
      if (n > 1) {
        d1[1] = pos ? d1_position(g, field, i, j, 1) : d1_field(g, field, i, j, 1);
        d2[1] = pos ? d2_position_mixed(g, field, i, j) : d2_field_mixed(g, field, i, j);
        d2[2] = pos ? d2_position(g, field, i, j, 1) : d2_field(g, field, i, j, 1);
      }
      auto dd = [&](int a, int b) -> const Vec3& {
        if (a == 0 && b == 0) return d2[0];
        if (a == 1 && b == 1) return d2[2];
        return d2[1];
      };
      Vec3 acc{};
      for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
          Vec3 term = dd(a, b);
          for (int k = 0; k < n; ++k) term -= d1[k] * c.christoffel[k][p].at(a, b);
          acc += term * c.inv_metric[p].at(a, b);
        }
      }
      out[p] = acc;
    }
  });
  return out;
}

std::vector<Sym2> covariant_hessian(const GeometryCache& c, const std::vector<double>& f) {
  const Grid& g = c.grid;
  const int n = c.dim;
  std::vector<Sym2> out(g.size());
  parallel_for(g.count[0], [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < g.count[1]; ++j) {
      const int p = g.idx(i, j);
      double d1[2] = {0.0, 0.0};
      d1[0] = d1_field(g, f, i, j, 0);
      if (n > 1) d1[1] = d1_field(g, f, i, j, 1);
      double dd[2][2];
      dd[0][0] = d2_field(g, f, i, j, 0);
      if (n > 1) {
        dd[1][1] = d2_field(g, f, i, j, 1);
        dd[0][1] = dd[1][0] = d2_field_mixed(g, f, i, j);
      }
      Sym2 hess;
      for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
          double v = dd[a][b];
          for (int k = 0; k < n; ++k) v -= c.christoffel[k][p].at(a, b) * d1[k];
          hess.set(a, b, v);
        }
      }
      out[p] = hess;
    }
  });
  return out;
}

std::vector<double> laplace_beltrami_scalar(const GeometryCache& c, const std::vector<double>& f) {
  std::vector<Sym2> hess = covariant_hessian(c, f);
  std::vector<double> out(c.grid.size());
  const int n = c.dim;
  parallel_for(c.grid.size(), [&](std::ptrdiff_t p) {
    double v = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) v += c.inv_metric[p].at(a, b) * hess[p].at(a, b);
    out[p] = v;
  });
  return out;
}

std::vector<Sym2> tensor_laplacian_h(const GeometryCache& c) {
  const Grid& g = c.grid;
  const int n = c.dim;
  std::vector<Sym2> out(g.size());
  parallel_for(g.count[0], [&](std::ptrdiff_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < g.count[1]; ++j) {
      const int p = g.idx(i, j);
      // dT[k][l](a,b) = d_k (nabla_l h)_ab from stencils of the stored field
      Sym2 dT[2][2];
      for (int l = 0; l < n; ++l) {
        dT[0][l] = d1_field(g, c.grad_a[l], i, j, 0);
        if (n > 1) dT[1][l] = d1_field(g, c.grad_a[l], i, j, 1);
      }
      Sym2 lap;
      for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
          double v = 0.0;
          for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
              double t = dT[k][l].at(a, b);
              for (int m = 0; m < n; ++m) {
                t -= c.christoffel[m][p].at(k, l) * c.grad_a[m][p].at(a, b);
                t -= c.christoffel[m][p].at(k, a) * c.grad_a[l][p].at(m, b);
                t -= c.christoffel[m][p].at(k, b) * c.grad_a[l][p].at(a, m);
              }
              v += c.inv_metric[p].at(k, l) * t;
            }
          }
          lap.set(a, b, v);
        }
      }
      out[p] = lap;
    }
  });
  return out;
}

}  // namespace hmcf
