#pragma once

#include <array>
#include <vector>

#include "hmcf/immersion.hpp"

namespace hmcf {

struct CacheOptions {
  double det_floor = 1e-10;
  double frame_tol = 1e-12;  // |t1 x t2| / (|t1||t2|) below this is a degenerate frame
  bool validate = true;
};

// All pointwise differential-geometric fields of one immersion. Immutable
// after construction; safe to share across threads.
struct GeometryCache {
  Grid grid;
  int dim = 1;

  std::array<std::vector<Vec3>, 2> tangent;       // dX/dx^i
  std::vector<Vec3> dd00, dd01, dd11;             // d^2 X / dx^i dx^j
  std::vector<Sym2> metric;
  std::vector<Sym2> inv_metric;
  std::vector<double> det_g;
  std::vector<Vec3> normal;                       // unit inner normal
  std::vector<Sym2> second_form;
  std::vector<double> mean_curvature;
  std::array<std::vector<Sym2>, 2> christoffel;   // [k](i,j)
  std::array<std::vector<Sym2>, 2> grad_a;        // nabla_k h_ij, [k](i,j)
  std::vector<double> norm_a_sq;                  // |A|^2
  std::vector<double> trace_a3;                   // tr(A^3)
  std::vector<double> grad_a_sq;                  // |nabla A|^2

  const Vec3& second_deriv(int p, int i, int j) const {
    if (i == 0 && j == 0) return dd00[p];
    if (i == 1 && j == 1) return dd11[p];
    return dd01[p];
  }
};

// Full cache build. When `exact` is given, tangents and second derivatives
// come from the closed form instead of stencils (everything downstream is the
// same algebra either way).
GeometryCache build_cache(const Immersion& im, const CacheOptions& opts = {},
                          const AnalyticFamily* exact = nullptr);

// Individually exposed operations (each is a thin wrapper over the cache
// kernels so it can be tested against the per-operation contracts).
std::vector<Sym2> compute_metric(const Immersion& im);
struct InverseMetric {
  std::vector<Sym2> inv;
  std::vector<double> det;
};
InverseMetric compute_inverse_metric(const Grid& grid, int dim, const std::vector<Sym2>& metric,
                                     double det_floor = 1e-10);
std::vector<Vec3> compute_normal(const Immersion& im, double frame_tol = 1e-12);
std::vector<Sym2> compute_second_form(const Immersion& im, const std::vector<Vec3>& normal);
std::vector<double> compute_mean_curvature(const Grid& grid, int dim,
                                           const std::vector<Sym2>& inv_metric,
                                           const std::vector<Sym2>& second_form);
std::array<std::vector<Sym2>, 2> compute_christoffel(const Immersion& im,
                                                     const std::vector<Sym2>& inv_metric);

// Laplace-Beltrami of an R^{n+1}-valued field on the immersion's grid:
// g^ij (d^2 F - Gamma^k_ij dF). Position fields pick up the deck shift when
// the grid wraps (cylinders, flat bands); plainly periodic fields do not.
enum class FieldKind { Periodic, Position };
std::vector<Vec3> laplace_beltrami(const GeometryCache& cache, const std::vector<Vec3>& field,
                                   FieldKind kind = FieldKind::Periodic);

// Covariant derivative of the second fundamental form plus |nabla A|^2;
// filled into the cache by build_cache, exposed for direct testing.
void compute_grad_a(GeometryCache& cache);

// Scalar covariant Hessian nabla_i nabla_j f from stencils of a scalar field.
std::vector<Sym2> covariant_hessian(const GeometryCache& cache, const std::vector<double>& f);

// Scalar Laplace-Beltrami g^ij nabla_i nabla_j f.
std::vector<double> laplace_beltrami_scalar(const GeometryCache& cache,
                                            const std::vector<double>& f);

// Tensor Laplacian g^kl (nabla_k nabla_l h)_ij of the second fundamental form.
std::vector<Sym2> tensor_laplacian_h(const GeometryCache& cache);

}  // namespace hmcf
