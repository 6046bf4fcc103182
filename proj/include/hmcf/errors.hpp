#pragma once

#include <stdexcept>
#include <string>

namespace hmcf {

struct NonFiniteField : std::runtime_error {
  explicit NonFiniteField(const std::string& what) : std::runtime_error(what) {}
};

struct MetricDegenerate : std::runtime_error {
  MetricDegenerate(int point, double det)
      : std::runtime_error("metric degenerate at point " + std::to_string(point) +
                           ", det = " + std::to_string(det)),
        point(point),
        det(det) {}
  int point;
  double det;
};

struct DegenerateFrame : std::runtime_error {
  explicit DegenerateFrame(int point)
      : std::runtime_error("degenerate tangent frame at point " + std::to_string(point)),
        point(point) {}
  int point;
};

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct StepSizeUnderflow : std::runtime_error {
  StepSizeUnderflow(double t, double h)
      : std::runtime_error("step size underflow at t = " + std::to_string(t)), t(t), h(h) {}
  double t;
  double h;
};

struct DiffeoDegenerate : std::runtime_error {
  explicit DiffeoDegenerate(int point)
      : std::runtime_error("diffeomorphism Jacobian not positive at point " +
                           std::to_string(point)),
        point(point) {}
  int point;
};

struct LightConeViolation : std::runtime_error {
  LightConeViolation(int point, double speed_sq)
      : std::runtime_error("timelike condition violated at point " + std::to_string(point) +
                           ", |X_t|^2 = " + std::to_string(speed_sq)),
        point(point),
        speed_sq(speed_sq) {}
  int point;
  double speed_sq;
};

}  // namespace hmcf
