#pragma once

#include <array>
#include <vector>

#include "hmcf/vec.hpp"

namespace hmcf {

// Uniform structured parameter grid, 1D or 2D, row-major storage.
//
// Axes are either periodic (closed curve / torus direction, optionally with a
// deck shift added to positions on wrap-around, e.g. the axial direction of a
// cylinder or a flat band) or non-periodic bands. Band axes carry `pad`
// boundary layers that are excluded from norms and measurements; derivative
// stencils fall back to one-sided second-order forms at band edges.
struct Grid {
  int dim = 1;  // number of parameter axes (1 or 2)
  std::array<int, 2> count = {1, 1};
  std::array<double, 2> spacing = {0.0, 0.0};
  std::array<double, 2> origin = {0.0, 0.0};
  std::array<bool, 2> periodic = {true, true};
  std::array<Vec3, 2> wrap_shift = {Vec3{}, Vec3{}};  // added to X when wrapping upward
  std::array<int, 2> pad = {0, 0};

  int size() const { return count[0] * count[1]; }
  int idx(int i, int j) const { return i * count[1] + j; }
  double coord(int axis, int index) const { return origin[axis] + spacing[axis] * index; }
  bool is_interior(int i, int j) const {
    if (i < pad[0] || i >= count[0] - pad[0]) return false;
    if (dim > 1 && (j < pad[1] || j >= count[1] - pad[1])) return false;
    return true;
  }
};

// One-dimensional difference stencil at a node (offsets relative to the node).
struct Stencil1 {
  int n = 0;
  std::array<int, 4> off{};
  std::array<double, 4> w{};
};

// Second-order first/second derivative stencils; central where neighbors
// exist, one-sided at the edges of non-periodic axes.
Stencil1 d1_stencil(const Grid& g, int axis, int index);
Stencil1 d2_stencil(const Grid& g, int axis, int index);

// Position read with periodic wrap; deck shift applied on wrap-around.
// `i`/`j` may exceed the index range by less than one full period.
Vec3 sample_position(const Grid& g, const std::vector<Vec3>& x, int i, int j);

// Plain periodic read for fields that are genuinely periodic (tensors,
// scalars, velocities).
template <class T>
const T& sample(const Grid& g, const std::vector<T>& f, int i, int j) {
  if (g.periodic[0]) {
    if (i < 0) i += g.count[0];
    if (i >= g.count[0]) i -= g.count[0];
  }
  if (g.dim > 1 && g.periodic[1]) {
    if (j < 0) j += g.count[1];
    if (j >= g.count[1]) j -= g.count[1];
  }
  return f[g.idx(i, j)];
}

Vec3 d1_position(const Grid& g, const std::vector<Vec3>& x, int i, int j, int axis);
Vec3 d2_position(const Grid& g, const std::vector<Vec3>& x, int i, int j, int axis);
Vec3 d2_position_mixed(const Grid& g, const std::vector<Vec3>& x, int i, int j);

template <class T>
T d1_field(const Grid& g, const std::vector<T>& f, int i, int j, int axis) {
  const Stencil1 s = d1_stencil(g, axis, axis == 0 ? i : j);
  T out{};
  for (int k = 0; k < s.n; ++k) {
    const int ii = axis == 0 ? i + s.off[k] : i;
    const int jj = axis == 1 ? j + s.off[k] : j;
    out += sample(g, f, ii, jj) * s.w[k];
  }
  return out;
}

template <class T>
T d2_field(const Grid& g, const std::vector<T>& f, int i, int j, int axis) {
  const Stencil1 s = d2_stencil(g, axis, axis == 0 ? i : j);
  T out{};
  for (int k = 0; k < s.n; ++k) {
    const int ii = axis == 0 ? i + s.off[k] : i;
    const int jj = axis == 1 ? j + s.off[k] : j;
    out += sample(g, f, ii, jj) * s.w[k];
  }
  return out;
}

template <class T>
T d2_field_mixed(const Grid& g, const std::vector<T>& f, int i, int j) {
  const Stencil1 si = d1_stencil(g, 0, i);
  const Stencil1 sj = d1_stencil(g, 1, j);
  T out{};
  for (int a = 0; a < si.n; ++a) {
    for (int b = 0; b < sj.n; ++b) {
      out += sample(g, f, i + si.off[a], j + sj.off[b]) * (si.w[a] * sj.w[b]);
    }
  }
  return out;
}

// Fixed-order max norm over interior points (band padding excluded).
template <class T>
double max_norm_interior(const Grid& g, const std::vector<T>& f) {
  double m = 0.0;
  for (int i = 0; i < g.count[0]; ++i) {
    for (int j = 0; j < g.count[1]; ++j) {
      if (!g.is_interior(i, j)) continue;
      const double v = max_abs(f[g.idx(i, j)]);
      if (v > m) m = v;
    }
  }
  return m;
}

template <class F>
void for_each_interior(const Grid& g, F&& fn) {
  for (int i = 0; i < g.count[0]; ++i) {
    for (int j = 0; j < g.count[1]; ++j) {
      if (g.is_interior(i, j)) fn(g.idx(i, j), i, j);
    }
  }
}

}  // namespace hmcf
