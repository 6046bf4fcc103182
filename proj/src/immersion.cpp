#include "hmcf/immersion.hpp"

#include <cmath>
#include <numbers>

#include "hmcf/errors.hpp"

namespace hmcf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_counts(const Grid& g) {
  for (int a = 0; a < g.dim; ++a) {
    if (g.count[a] < 8) {
      throw DomainError("grid axis " + std::to_string(a) + " must have >= 8 points, got " +
                        std::to_string(g.count[a]));
    }
  }
}
}  // namespace

Vec3 CircleFamily::position(double u, double) const { return {r_ * std::cos(u), r_ * std::sin(u), 0.0}; }
Vec3 CircleFamily::d1(double u, double, int) const { return {-r_ * std::sin(u), r_ * std::cos(u), 0.0}; }
Vec3 CircleFamily::d2(double u, double, int, int) const {
  return {-r_ * std::cos(u), -r_ * std::sin(u), 0.0};
}

Vec3 EllipseFamily::position(double u, double) const { return {a_ * std::cos(u), b_ * std::sin(u), 0.0}; }
Vec3 EllipseFamily::d1(double u, double, int) const { return {-a_ * std::sin(u), b_ * std::cos(u), 0.0}; }
Vec3 EllipseFamily::d2(double u, double, int, int) const {
  return {-a_ * std::cos(u), -b_ * std::sin(u), 0.0};
}

Vec3 SphereFamily::position(double a, double b) const {
  return {r_ * std::cos(a) * std::cos(b), r_ * std::cos(a) * std::sin(b), r_ * std::sin(a)};
}
Vec3 SphereFamily::d1(double a, double b, int axis) const {
  if (axis == 0) {
    return {-r_ * std::sin(a) * std::cos(b), -r_ * std::sin(a) * std::sin(b), r_ * std::cos(a)};
  }
  return {-r_ * std::cos(a) * std::sin(b), r_ * std::cos(a) * std::cos(b), 0.0};
}
Vec3 SphereFamily::d2(double a, double b, int i, int j) const {
  if (i == 0 && j == 0) {
    return {-r_ * std::cos(a) * std::cos(b), -r_ * std::cos(a) * std::sin(b), -r_ * std::sin(a)};
  }
  if (i == 1 && j == 1) {
    return {-r_ * std::cos(a) * std::cos(b), -r_ * std::cos(a) * std::sin(b), 0.0};
  }
  return {r_ * std::sin(a) * std::sin(b), -r_ * std::sin(a) * std::cos(b), 0.0};
}

Vec3 CylinderFamily::position(double a, double rho) const {
  return {r_ * std::cos(a), r_ * std::sin(a), rho};
}
Vec3 CylinderFamily::d1(double a, double, int axis) const {
  if (axis == 0) return {-r_ * std::sin(a), r_ * std::cos(a), 0.0};
  return {0.0, 0.0, 1.0};
}
Vec3 CylinderFamily::d2(double a, double, int i, int j) const {
  if (i == 0 && j == 0) return {-r_ * std::cos(a), -r_ * std::sin(a), 0.0};
  return {0.0, 0.0, 0.0};
}

Vec3 TorusFamily::position(double th, double ph) const {
  const double w = R_ + a_ * std::cos(ph);
  return {w * std::cos(th), w * std::sin(th), a_ * std::sin(ph)};
}
Vec3 TorusFamily::d1(double th, double ph, int axis) const {
  const double w = R_ + a_ * std::cos(ph);
  if (axis == 0) return {-w * std::sin(th), w * std::cos(th), 0.0};
  return {-a_ * std::sin(ph) * std::cos(th), -a_ * std::sin(ph) * std::sin(th), a_ * std::cos(ph)};
}
Vec3 TorusFamily::d2(double th, double ph, int i, int j) const {
  const double w = R_ + a_ * std::cos(ph);
  if (i == 0 && j == 0) return {-w * std::cos(th), -w * std::sin(th), 0.0};
  if (i == 1 && j == 1) {
    return {-a_ * std::cos(ph) * std::cos(th), -a_ * std::cos(ph) * std::sin(th),
            -a_ * std::sin(ph)};
  }
  return {a_ * std::sin(ph) * std::sin(th), -a_ * std::sin(ph) * std::cos(th), 0.0};
}

Grid grid_closed_curve(int n) {
  Grid g;
  g.dim = 1;
  g.count = {n, 1};
  g.spacing = {kTwoPi / n, 0.0};
  g.origin = {0.0, 0.0};
  g.periodic = {true, true};
  check_counts(g);
  return g;
}

Grid grid_flat_curve(int n, double length) {
  Grid g = grid_closed_curve(n);
  g.spacing = {length / n, 0.0};
  g.wrap_shift[0] = {length, 0.0, 0.0};
  return g;
}

Grid grid_sphere_band(int n_alpha, int n_beta, double alpha_max) {
  Grid g;
  g.dim = 2;
  g.count = {n_alpha, n_beta};
  g.spacing = {2.0 * alpha_max / (n_alpha - 1), kTwoPi / n_beta};
  g.origin = {-alpha_max, 0.0};
  g.periodic = {false, true};
  g.pad = {2, 0};
  check_counts(g);
  return g;
}

Grid grid_cylinder(int n_alpha, int n_axial, double length) {
  Grid g;
  g.dim = 2;
  g.count = {n_alpha, n_axial};
  g.spacing = {kTwoPi / n_alpha, length / n_axial};
  g.origin = {0.0, 0.0};
  g.periodic = {true, true};
  g.wrap_shift[1] = {0.0, 0.0, length};
  check_counts(g);
  return g;
}

Grid grid_torus(int n_theta, int n_phi) {
  Grid g;
  g.dim = 2;
  g.count = {n_theta, n_phi};
  g.spacing = {kTwoPi / n_theta, kTwoPi / n_phi};
  g.origin = {0.0, 0.0};
  g.periodic = {true, true};
  check_counts(g);
  return g;
}

Grid grid_flat_sheet(int n1, int n2, double l1, double l2) {
  Grid g;
  g.dim = 2;
  g.count = {n1, n2};
  g.spacing = {l1 / n1, l2 / n2};
  g.origin = {0.0, 0.0};
  g.periodic = {true, true};
  g.wrap_shift[0] = {l1, 0.0, 0.0};
  g.wrap_shift[1] = {0.0, l2, 0.0};
  check_counts(g);
  return g;
}

Grid grid_graph_domain(int dim, int n1, int n2) {
  if (dim == 1) {
    Grid g = grid_flat_curve(n1, kTwoPi);
    return g;
  }
  Grid g = grid_flat_sheet(n1, n2, kTwoPi, kTwoPi);
  return g;
}

Immersion make_immersion(const Grid& grid, const AnalyticFamily& family) {
  check_counts(grid);
  Immersion im;
  im.grid = grid;
  im.ambient = family.ambient();
  im.points.resize(grid.size());
  for (int i = 0; i < grid.count[0]; ++i) {
    for (int j = 0; j < grid.count[1]; ++j) {
      const Vec3 p = family.position(grid.coord(0, i), grid.coord(1, j));
      if (!finite(p)) throw NonFiniteField("immersion sample not finite");
      im.points[grid.idx(i, j)] = p;
    }
  }
  return im;
}

Immersion make_circle(double r, int n) { return make_immersion(grid_closed_curve(n), CircleFamily(r)); }

Immersion make_ellipse(double a, double b, int n) {
  return make_immersion(grid_closed_curve(n), EllipseFamily(a, b));
}

Immersion make_flat_curve(double length, int n) {
  Grid g = grid_flat_curve(n, length);
  Immersion im;
  im.grid = g;
  im.ambient = 2;
  im.points.resize(g.size());
  for (int i = 0; i < n; ++i) im.points[i] = {g.coord(0, i), 0.0, 0.0};
  return im;
}

Immersion make_sphere_band(double r, double alpha_max, int n_alpha, int n_beta) {
  return make_immersion(grid_sphere_band(n_alpha, n_beta, alpha_max), SphereFamily(r));
}

Immersion make_cylinder(double r, double length, int n_alpha, int n_axial) {
  return make_immersion(grid_cylinder(n_alpha, n_axial, length), CylinderFamily(r));
}

Immersion make_torus(double major, double minor, int n_theta, int n_phi) {
  return make_immersion(grid_torus(n_theta, n_phi), TorusFamily(major, minor));
}

Immersion make_flat_sheet(double l1, double l2, int n1, int n2) {
  Grid g = grid_flat_sheet(n1, n2, l1, l2);
  Immersion im;
  im.grid = g;
  im.ambient = 3;
  im.points.resize(g.size());
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      im.points[g.idx(i, j)] = {g.coord(0, i), g.coord(1, j), 0.0};
    }
  }
  return im;
}

Immersion make_graph_immersion(const Grid& grid, const std::vector<Vec3>& y) {
  Immersion im;
  im.grid = grid;
  im.ambient = grid.dim + 1;
  im.points.resize(grid.size());
  for (int i = 0; i < grid.count[0]; ++i) {
    for (int j = 0; j < grid.count[1]; ++j) {
      const int p = grid.idx(i, j);
      Vec3 base{grid.coord(0, i), 0.0, 0.0};
      if (grid.dim == 1) {
        // displacement components (y^1, y^2) live in (x, y)
        im.points[p] = base + y[p];
      } else {
        base.y = grid.coord(1, j);
        im.points[p] = base + y[p];
      }
    }
  }
  return im;
}

Vec3 centroid(const Immersion& im) {
  Vec3 c{};
  for (const Vec3& p : im.points) c += p;
  return c * (1.0 / static_cast<double>(im.points.size()));
}

}  // namespace hmcf
