#include "hmcf/grid.hpp"

namespace hmcf {

namespace {

// Interior nodes of a band axis this close to the edge switch to shifted
// one-sided stencils so every stored node has a finite derivative value.
bool needs_forward(const Grid& g, int axis, int index, int reach) {
  return !g.periodic[axis] && index < reach;
}
bool needs_backward(const Grid& g, int axis, int index, int reach) {
  return !g.periodic[axis] && index > g.count[axis] - 1 - reach;
}

}  // namespace

Stencil1 d1_stencil(const Grid& g, int axis, int index) {
  const double h = g.spacing[axis];
  Stencil1 s;
  if (needs_forward(g, axis, index, 1)) {
    s.n = 3;
    s.off = {0, 1, 2, 0};
    s.w = {-1.5 / h, 2.0 / h, -0.5 / h, 0.0};
  } else if (needs_backward(g, axis, index, 1)) {
    s.n = 3;
    s.off = {0, -1, -2, 0};
    s.w = {1.5 / h, -2.0 / h, 0.5 / h, 0.0};
  } else {
    s.n = 2;
    s.off = {-1, 1, 0, 0};
    s.w = {-0.5 / h, 0.5 / h, 0.0, 0.0};
  }
  return s;
}

Stencil1 d2_stencil(const Grid& g, int axis, int index) {
  const double h2 = g.spacing[axis] * g.spacing[axis];
  Stencil1 s;
  if (needs_forward(g, axis, index, 1)) {
    s.n = 4;
    s.off = {0, 1, 2, 3};
    s.w = {2.0 / h2, -5.0 / h2, 4.0 / h2, -1.0 / h2};
  } else if (needs_backward(g, axis, index, 1)) {
    s.n = 4;
    s.off = {0, -1, -2, -3};
    s.w = {2.0 / h2, -5.0 / h2, 4.0 / h2, -1.0 / h2};
  } else {
    s.n = 3;
    s.off = {-1, 0, 1, 0};
    s.w = {1.0 / h2, -2.0 / h2, 1.0 / h2, 0.0};
  }
  return s;
}

Vec3 sample_position(const Grid& g, const std::vector<Vec3>& x, int i, int j) {
  Vec3 shift{};
  if (i < 0) {
    i += g.count[0];
    shift -= g.wrap_shift[0];
  } else if (i >= g.count[0]) {
    i -= g.count[0];
    shift += g.wrap_shift[0];
  }
  if (g.dim > 1) {
    if (j < 0) {
      j += g.count[1];
      shift -= g.wrap_shift[1];
    } else if (j >= g.count[1]) {
      j -= g.count[1];
      shift += g.wrap_shift[1];
    }
  }
  return x[g.idx(i, j)] + shift;
}

Vec3 d1_position(const Grid& g, const std::vector<Vec3>& x, int i, int j, int axis) {
  const Stencil1 s = d1_stencil(g, axis, axis == 0 ? i : j);
  Vec3 out{};
  for (int k = 0; k < s.n; ++k) {
    const int ii = axis == 0 ? i + s.off[k] : i;
    const int jj = axis == 1 ? j + s.off[k] : j;
    out += sample_position(g, x, ii, jj) * s.w[k];
  }
  return out;
}

Vec3 d2_position(const Grid& g, const std::vector<Vec3>& x, int i, int j, int axis) {
  const Stencil1 s = d2_stencil(g, axis, axis == 0 ? i : j);
  Vec3 out{};
  for (int k = 0; k < s.n; ++k) {
    const int ii = axis == 0 ? i + s.off[k] : i;
    const int jj = axis == 1 ? j + s.off[k] : j;
    out += sample_position(g, x, ii, jj) * s.w[k];
  }
  return out;
}

Vec3 d2_position_mixed(const Grid& g, const std::vector<Vec3>& x, int i, int j) {
  const Stencil1 si = d1_stencil(g, 0, i);
  const Stencil1 sj = d1_stencil(g, 1, j);
  Vec3 out{};
  for (int a = 0; a < si.n; ++a) {
    for (int b = 0; b < sj.n; ++b) {
      out += sample_position(g, x, i + si.off[a], j + sj.off[b]) * (si.w[a] * sj.w[b]);
    }
  }
  return out;
}

}  // namespace hmcf
