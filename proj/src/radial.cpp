#include "hmcf/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hmcf/errors.hpp"

namespace hmcf {

double radial_rhs(const RadialState& s) {
  if (!(s.r > 0.0)) throw DomainError("radial_rhs requires r > 0");
  return -s.c / s.r;
}

double first_integral(const RadialState& s, double r0, double r1) {
  return s.r_t * s.r_t + 2.0 * s.c * std::log(s.r / r0) - r1 * r1;
}

namespace {

struct Deriv {
  double dr, dv;
};

inline Deriv rhs(double r, double v, double c) { return {v, -c / r}; }

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

struct TrialStep {
  double r, v;
  double err;     // scaled error estimate
  Deriv k7;       // FSAL derivative at the endpoint
  bool domain_ok;
};

TrialStep try_step(double r, double v, double c, double h, const Deriv& k1, double tol) {
  TrialStep out{};
  auto safe = [](double rr) { return rr > 0.0; };
  double r2 = r + h * a21 * k1.dr;
  double v2 = v + h * a21 * k1.dv;
  if (!safe(r2)) return out;
  Deriv k2 = rhs(r2, v2, c);
  double r3 = r + h * (a31 * k1.dr + a32 * k2.dr);
  double v3 = v + h * (a31 * k1.dv + a32 * k2.dv);
  if (!safe(r3)) return out;
  Deriv k3 = rhs(r3, v3, c);
  double r4 = r + h * (a41 * k1.dr + a42 * k2.dr + a43 * k3.dr);
  double v4 = v + h * (a41 * k1.dv + a42 * k2.dv + a43 * k3.dv);
  if (!safe(r4)) return out;
  Deriv k4 = rhs(r4, v4, c);
  double r5 = r + h * (a51 * k1.dr + a52 * k2.dr + a53 * k3.dr + a54 * k4.dr);
  double v5 = v + h * (a51 * k1.dv + a52 * k2.dv + a53 * k3.dv + a54 * k4.dv);
  if (!safe(r5)) return out;
  Deriv k5 = rhs(r5, v5, c);
  double r6 = r + h * (a61 * k1.dr + a62 * k2.dr + a63 * k3.dr + a64 * k4.dr + a65 * k5.dr);
  double v6 = v + h * (a61 * k1.dv + a62 * k2.dv + a63 * k3.dv + a64 * k4.dv + a65 * k5.dv);
  if (!safe(r6)) return out;
  Deriv k6 = rhs(r6, v6, c);
  double rn = r + h * (b1 * k1.dr + b3 * k3.dr + b4 * k4.dr + b5 * k5.dr + b6 * k6.dr);
  double vn = v + h * (b1 * k1.dv + b3 * k3.dv + b4 * k4.dv + b5 * k5.dv + b6 * k6.dv);
  if (!safe(rn)) return out;
  Deriv k7 = rhs(rn, vn, c);

  const double err_r =
      h * (e1 * k1.dr + e3 * k3.dr + e4 * k4.dr + e5 * k5.dr + e6 * k6.dr + e7 * k7.dr);
  const double err_v =
      h * (e1 * k1.dv + e3 * k3.dv + e4 * k4.dv + e5 * k5.dv + e6 * k6.dv + e7 * k7.dv);
  // Pure relative control on r: the first-integral drift contract needs
  // delta_r / r bounded all the way down to the collapse threshold, where an
  // absolute floor would dominate.
  const double sr = tol * std::min(std::fabs(r), std::fabs(rn));
  const double sv = 1e-14 + tol * std::max({std::fabs(v), std::fabs(vn), 1.0});
  const double er = err_r / sr;
  const double ev = err_v / sv;
  out.err = std::sqrt(0.5 * (er * er + ev * ev));
  out.r = rn;
  out.v = vn;
  out.k7 = k7;
  out.domain_ok = true;
  return out;
}

double hermite(double y0, double d0, double y1, double d1, double h, double theta) {
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + theta;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
}

void check_options(const RadialOptions& opts) {
  if (!(opts.tol > 1e-14 && opts.tol < 1e-3)) {
    throw DomainError("tolerance must lie in (1e-14, 1e-3)");
  }
}

}  // namespace

RadialResult integrate_radial(RadialState s0, double t_end, const RadialOptions& opts) {
  if (!(s0.r > 0.0)) throw DomainError("integrate_radial requires r0 > 0");
  if (!(s0.c > 0.0)) throw DomainError("integrate_radial requires c > 0");
  check_options(opts);

  const double r0 = s0.r;
  const double r1 = s0.r_t;
  const double r_stop = opts.r_stop_rel * r0;
  // Local tolerance sits well below the drift contract (<= 10 * tol over the
  // whole trajectory), leaving headroom for per-step accumulation.
  const double tol_local = std::max(opts.tol / 50.0, 2e-16);

  RadialResult res;
  res.trajectory.push_back(s0);

  double t = s0.t;
  double r = s0.r;
  double v = s0.r_t;
  Deriv k1 = rhs(r, v, s0.c);

  // initial step from the acceleration scale
  double h = std::min(0.01 * r0 / std::max(1.0, std::fabs(v)),
                      0.1 * std::sqrt(r0 * r0 / s0.c));
  h = std::min(h, t_end - t);
  double err_prev = 1.0;
  int prev_sign = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);

  for (long step = 0; step < opts.max_steps; ++step) {
    if (t >= t_end) break;
    if (h > t_end - t) h = t_end - t;
    const double h_min = 1e-14 * std::max(1.0, std::fabs(t));
    if (h < h_min) {
      // -c/r is stiff at the origin; an underflow this deep into the
      // collapse is the collapse bracket itself.
      if (r < 1e-3 * r0) {
        res.event = RadialEventKind::Collapse;
        res.t_collapse = t + r / std::max(std::fabs(v), 1e-300);
        res.trajectory.push_back({r, v, t, s0.c});
        return res;
      }
      throw StepSizeUnderflow(t, h);
    }

    TrialStep trial = try_step(r, v, s0.c, h, k1, tol_local);
    if (!trial.domain_ok || !(trial.err == trial.err)) {
      h *= 0.25;
      continue;
    }
    if (trial.err > 1.0) {
      const double fac = std::max(0.2, 0.9 * std::pow(trial.err, -0.2));
      h *= fac;
      err_prev = trial.err;
      continue;
    }

    // accepted; locate the collapse threshold inside the step if crossed
    if (trial.r < r_stop) {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 200 && (hi - lo) > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double rm = hermite(r, k1.dr, trial.r, trial.k7.dr, h, mid);
        if (rm < r_stop)
          hi = mid;
        else
          lo = mid;
      }
      const double theta = 0.5 * (lo + hi);
      const double tc = t + theta * h;
      const double vc = hermite(v, k1.dv, trial.v, trial.k7.dv, h, theta);
      res.event = RadialEventKind::Collapse;
      // remaining fall time from r_stop estimated with the local velocity
      res.t_collapse = tc + r_stop / std::max(std::fabs(vc), 1e-300);
      res.trajectory.push_back({r_stop, vc, tc, s0.c});
      return res;
    }

    // velocity extremum (sign change) located on the Hermite extension
    const int new_sign = trial.v > 0.0 ? 1 : (trial.v < 0.0 ? -1 : 0);
    if (prev_sign > 0 && new_sign < 0) {
      ++res.r_t_sign_changes;
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 200 && (hi - lo) > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double vm = hermite(v, k1.dv, trial.v, trial.k7.dv, h, mid);
        if (vm < 0.0)
          hi = mid;
        else
          lo = mid;
      }
      const double theta = 0.5 * (lo + hi);
      res.t_peak = t + theta * h;
      res.r_peak = hermite(r, k1.dr, trial.r, trial.k7.dr, h, theta);
    } else if (prev_sign < 0 && new_sign > 0) {
      ++res.r_t_sign_changes;
    }
    if (new_sign != 0) prev_sign = new_sign;

    t += h;
    r = trial.r;
    v = trial.v;
    k1 = trial.k7;
    res.trajectory.push_back({r, v, t, s0.c});
    res.max_first_integral_drift =
        std::max(res.max_first_integral_drift, std::fabs(first_integral({r, v, t, s0.c}, r0, r1)));

    const double fac =
        std::clamp(0.9 * std::pow(std::max(trial.err, 1e-10), -0.7 / 5.0) *
                       std::pow(std::max(err_prev, 1e-10), 0.4 / 5.0),
                   0.2, 5.0);
    err_prev = std::max(trial.err, 1e-10);
    h *= fac;
  }
  res.event = RadialEventKind::ReachedTEnd;
  return res;
}

std::vector<RadialState> sample_radial(RadialState s0, std::span<const double> times,
                                       const RadialOptions& opts) {
  std::vector<RadialState> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < s0.t) throw DomainError("sample time precedes initial time");
    if (t == s0.t) {
      out.push_back(s0);
      continue;
    }
    RadialResult r = integrate_radial(s0, t, opts);
    if (r.event != RadialEventKind::ReachedTEnd) {
      throw DomainError("sample time is past the collapse");
    }
    out.push_back(r.trajectory.back());
  }
  return out;
}

namespace {

// Adaptive Gauss-Kronrod 15(7) on [a, b].
const double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                        0.741531185599394, 0.586087235467691, 0.405845151377397,
                        0.207784955007898, 0.0};
const double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                        0.140653259715525, 0.169004726639267, 0.190350578064785,
                        0.204432940075298, 0.209482141084728};
const double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                       0.417959183673469};

template <class F>
void gk15(const F& f, double a, double b, double& result, double& err) {
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  const double fc = f(c);
  double rk = kWgk[7] * fc;
  double rg = kWg[3] * fc;  // odd Kronrod nodes plus the midpoint form the Gauss rule
  for (int i = 0; i < 7; ++i) {
    const double x = hw * kXgk[i];
    const double fs = f(c - x) + f(c + x);
    rk += kWgk[i] * fs;
    if (i % 2 == 1) rg += kWg[i / 2] * fs;
  }
  result = rk * hw;
  err = std::fabs((rk - rg) * hw);
}

template <class F>
double adaptive_quad(const F& f, double a, double b, double tol, int depth = 0) {
  double result, err;
  gk15(f, a, b, result, err);
  if (err <= tol || depth >= 48) return result;
  const double m = 0.5 * (a + b);
  return adaptive_quad(f, a, m, 0.5 * tol, depth + 1) +
         adaptive_quad(f, m, b, 0.5 * tol, depth + 1);
}

// fall time from rest-or-descending data (r_ref, v_ref <= 0) to r = 0 with
// u = sqrt(ln(r_ref / r)):  t = 2 r_ref \int_0^inf u e^{-u^2} / sqrt(v_ref^2 + 2 c u^2) du
double fall_time(double r_ref, double v_ref, double c, double tol) {
  const double v2 = v_ref * v_ref;
  auto f = [&](double u) {
    if (u == 0.0 && v2 == 0.0) return 2.0 * r_ref / std::sqrt(2.0 * c);
    return 2.0 * r_ref * u * std::exp(-u * u) / std::sqrt(v2 + 2.0 * c * u * u);
  };
  return adaptive_quad(f, 0.0, 6.6, tol);
}

// rise time from (r0, v0 > 0) to the turning radius r_max, with
// u = sqrt(ln(r_max / r)):  t = 2 r_max \int_0^{u0} e^{-u^2} / sqrt(2c) du
double rise_time(double r0, double v0, double c, double tol) {
  const double r_max = r0 * std::exp(v0 * v0 / (2.0 * c));
  const double u0 = v0 / std::sqrt(2.0 * c);
  auto f = [&](double u) { return 2.0 * r_max * std::exp(-u * u) / std::sqrt(2.0 * c); };
  return adaptive_quad(f, 0.0, u0, tol);
}

}  // namespace

double collapse_time_quadrature(double r0, double r1, double c, double tol) {
  if (!(r0 > 0.0)) throw DomainError("collapse_time_quadrature requires r0 > 0");
  if (!(c > 0.0)) throw DomainError("collapse_time_quadrature requires c > 0");
  if (!(tol > 0.0 && tol < 1e-2)) throw DomainError("quadrature tolerance out of range");
  if (r1 <= 0.0) {
    return fall_time(r0, r1, c, tol);
  }
  const double r_max = r0 * std::exp(r1 * r1 / (2.0 * c));
  return rise_time(r0, r1, c, 0.5 * tol) + fall_time(r_max, 0.0, c, 0.5 * tol);
}

RadialClassification classify_radial_phase(double r0, double r1, double c) {
  if (!(r0 > 0.0)) throw DomainError("classify_radial_phase requires r0 > 0");
  if (!(c > 0.0)) throw DomainError("classify_radial_phase requires c > 0");
  RadialClassification out;
  if (r1 <= 0.0) {
    out.phase = RadialPhase::MonotoneCollapse;
    out.r_max = r0;
    out.t_max = 0.0;
    return out;
  }
  out.phase = RadialPhase::ExpandThenCollapse;
  out.r_max = r0 * std::exp(r1 * r1 / (2.0 * c));
  out.t_max = rise_time(r0, r1, c, 1e-13);
  return out;
}

}  // namespace hmcf
