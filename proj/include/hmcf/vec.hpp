#pragma once

#include <cmath>

namespace hmcf {

// Ambient vector in R^2 or R^3; planar immersions keep z == 0.
struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double max_abs(const Vec3& a) {
  double m = std::fabs(a.x);
  if (std::fabs(a.y) > m) m = std::fabs(a.y);
  if (std::fabs(a.z) > m) m = std::fabs(a.z);
  return m;
}
inline bool finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

// Symmetric n x n tensor, n <= 2. For n == 1 only xx is meaningful.
struct Sym2 {
  double xx = 0.0, xy = 0.0, yy = 0.0;

  double at(int i, int j) const {
    if (i == 0 && j == 0) return xx;
    if (i == 1 && j == 1) return yy;
    return xy;
  }
  void set(int i, int j, double v) {
    if (i == 0 && j == 0)
      xx = v;
    else if (i == 1 && j == 1)
      yy = v;
    else
      xy = v;
  }

  Sym2& operator+=(const Sym2& o) {
    xx += o.xx;
    xy += o.xy;
    yy += o.yy;
    return *this;
  }
  Sym2& operator-=(const Sym2& o) {
    xx -= o.xx;
    xy -= o.xy;
    yy -= o.yy;
    return *this;
  }
  Sym2& operator*=(double s) {
    xx *= s;
    xy *= s;
    yy *= s;
    return *this;
  }
};

inline Sym2 operator+(Sym2 a, const Sym2& b) { return a += b; }
inline Sym2 operator-(Sym2 a, const Sym2& b) { return a -= b; }
inline Sym2 operator*(Sym2 a, double s) { return a *= s; }
inline Sym2 operator*(double s, Sym2 a) { return a *= s; }

inline double max_abs(const Sym2& a) {
  double m = std::fabs(a.xx);
  if (std::fabs(a.xy) > m) m = std::fabs(a.xy);
  if (std::fabs(a.yy) > m) m = std::fabs(a.yy);
  return m;
}
inline bool finite(const Sym2& a) {
  return std::isfinite(a.xx) && std::isfinite(a.xy) && std::isfinite(a.yy);
}

inline double max_abs(double a) { return std::fabs(a); }
inline bool finite(double a) { return std::isfinite(a); }

}  // namespace hmcf
