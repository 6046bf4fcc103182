#pragma once

#include <memory>
#include <vector>

#include "hmcf/grid.hpp"
#include "hmcf/vec.hpp"

namespace hmcf {

// One time level of an immersed hypersurface X: grid -> R^{n+1}.
struct Immersion {
  Grid grid;
  int ambient = 2;  // 2 for curves, 3 for surfaces
  std::vector<Vec3> points;

  int dim_domain() const { return grid.dim; }
};

// Closed-form immersion family with exact parameter derivatives. Used to
// build exact geometry caches and to seed grids; `u` is the first parameter
// axis, `v` the second (ignored for curves).
class AnalyticFamily {
 public:
  virtual ~AnalyticFamily() = default;
  virtual int ambient() const = 0;
  virtual Vec3 position(double u, double v) const = 0;
  virtual Vec3 d1(double u, double v, int axis) const = 0;
  virtual Vec3 d2(double u, double v, int a, int b) const = 0;
};

class CircleFamily : public AnalyticFamily {
 public:
  explicit CircleFamily(double r) : r_(r) {}
  int ambient() const override { return 2; }
  Vec3 position(double u, double) const override;
  Vec3 d1(double u, double, int) const override;
  Vec3 d2(double u, double, int, int) const override;

 private:
  double r_;
};

class EllipseFamily : public AnalyticFamily {
 public:
  EllipseFamily(double a, double b) : a_(a), b_(b) {}
  int ambient() const override { return 2; }
  Vec3 position(double u, double) const override;
  Vec3 d1(double u, double, int) const override;
  Vec3 d2(double u, double, int, int) const override;

 private:
  double a_, b_;
};

// Chart (alpha, beta) -> r (cos a cos b, cos a sin b, sin a); poles excluded
// by restricting alpha to a band.
class SphereFamily : public AnalyticFamily {
 public:
  explicit SphereFamily(double r) : r_(r) {}
  int ambient() const override { return 3; }
  Vec3 position(double a, double b) const override;
  Vec3 d1(double a, double b, int axis) const override;
  Vec3 d2(double a, double b, int i, int j) const override;

 private:
  double r_;
};

// (alpha, rho) -> (r cos a, r sin a, rho).
class CylinderFamily : public AnalyticFamily {
 public:
  explicit CylinderFamily(double r) : r_(r) {}
  int ambient() const override { return 3; }
  Vec3 position(double a, double rho) const override;
  Vec3 d1(double a, double rho, int axis) const override;
  Vec3 d2(double a, double rho, int i, int j) const override;

 private:
  double r_;
};

// (theta, phi) -> ((R + a cos phi) cos theta, (R + a cos phi) sin theta, a sin phi).
class TorusFamily : public AnalyticFamily {
 public:
  TorusFamily(double major, double minor) : R_(major), a_(minor) {}
  int ambient() const override { return 3; }
  Vec3 position(double th, double ph) const override;
  Vec3 d1(double th, double ph, int axis) const override;
  Vec3 d2(double th, double ph, int i, int j) const override;

 private:
  double R_, a_;
};

// Grid builders. Counts must be >= 8 per axis.
Grid grid_closed_curve(int n);                                  // theta in [0, 2pi)
Grid grid_flat_curve(int n, double length);                     // x in [0, L), deck shift (L,0)
Grid grid_sphere_band(int n_alpha, int n_beta, double alpha_max);
Grid grid_cylinder(int n_alpha, int n_axial, double length);    // axial deck shift (0,0,L)
Grid grid_torus(int n_theta, int n_phi);
Grid grid_flat_sheet(int n1, int n2, double l1, double l2);     // 2D plane, two deck shifts
Grid grid_graph_domain(int dim, int n1, int n2);                // [0,2pi)^dim, shifts for X0 + Y

// Samples a family on a grid. Validates finiteness and grid invariants.
Immersion make_immersion(const Grid& grid, const AnalyticFamily& family);

Immersion make_circle(double r, int n);
Immersion make_ellipse(double a, double b, int n);
Immersion make_flat_curve(double length, int n);
Immersion make_sphere_band(double r, double alpha_max, int n_alpha, int n_beta);
Immersion make_cylinder(double r, double length, int n_alpha, int n_axial);
Immersion make_torus(double major, double minor, int n_theta, int n_phi);
Immersion make_flat_sheet(double l1, double l2, int n1, int n2);

// X0 + Y for a displacement field on a graph domain grid.
Immersion make_graph_immersion(const Grid& grid, const std::vector<Vec3>& y);

Vec3 centroid(const Immersion& im);

}  // namespace hmcf
