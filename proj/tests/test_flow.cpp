#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hmcf/errors.hpp"
#include "hmcf/flow.hpp"
#include "hmcf/radial.hpp"

using namespace hmcf;

namespace {

constexpr double kPi = std::numbers::pi;

// max_t |r_mean(t) - r_oracle(t)| / r0, compared at every accepted step
double radius_error_vs_oracle(Immersion im0, double r1_init, double c_coeff, double t_stop,
                              FlowOptions opts, double* spread_out = nullptr) {
  const double r0 = 1.0;
  std::vector<Vec3> v0(im0.points.size(), Vec3{});
  if (r1_init != 0.0) {
    const Vec3 cen = centroid(im0);
    for (std::size_t p = 0; p < im0.points.size(); ++p) {
      const Vec3 d = im0.points[p] - cen;
      v0[p] = d * (r1_init / norm(d));
    }
  }
  FlowState fs = make_flow_state(im0, v0, opts);
  StepScratch scratch;
  double max_err = 0.0, max_spread = 0.0;
  std::vector<double> times;
  std::vector<double> radii;
  while (fs.t < t_stop) {
    REQUIRE_FALSE(flow_step(fs, opts, scratch, t_stop - fs.t).has_value());
    double rm, rmin, rmax;
    radius_stats(fs.im, rm, rmin, rmax);
    times.push_back(fs.t);
    radii.push_back(rm);
    max_spread = std::max(max_spread, (rmax - rmin) / rm);
  }
  std::vector<RadialState> samples =
      sample_radial({r0, r1_init, 0.0, c_coeff}, std::span<const double>(times));
  for (std::size_t k = 0; k < times.size(); ++k) {
    max_err = std::max(max_err, std::fabs(radii[k] - samples[k].r) / r0);
  }
  if (spread_out != nullptr) *spread_out = max_spread;
  return max_err;
}

}  // namespace

TEST_CASE("flow right-hand side: H n on the standard shapes") {
  SUBCASE("sphere r=1: acceleration = -2 radial") {
    Immersion sp = make_sphere_band(1.0, kPi / 4.0, 33, 64);
    GeometryCache c = build_cache(sp);
    std::vector<Vec3> f = flow_rhs(c);
    double err = 0.0;
    for_each_interior(sp.grid, [&](int p, int, int) {
      const Vec3 radial = sp.points[p] * (1.0 / norm(sp.points[p]));
      err = std::max(err, max_abs(f[p] + radial * 2.0));
    });
    CHECK(err <= 5e-3);
  }
  SUBCASE("flat band: zero") {
    Immersion fb = make_flat_curve(2.0 * kPi, 64);
    GeometryCache c = build_cache(fb);
    for (const Vec3& v : flow_rhs(c)) CHECK(max_abs(v) <= 1e-13);
  }
  SUBCASE("unit circle: -1 radial") {
    Immersion ci = make_circle(1.0, 128);
    GeometryCache c = build_cache(ci);
    std::vector<Vec3> f = flow_rhs(c);
    double err = 0.0;
    for (int p = 0; p < ci.grid.size(); ++p) {
      const Vec3 radial = ci.points[p] * (1.0 / norm(ci.points[p]));
      err = std::max(err, max_abs(f[p] + radial));
    }
    CHECK(err <= 1e-3);
  }
  SUBCASE("debug flag returns Delta_g X and cross-checks") {
    Immersion ci = make_circle(1.0, 64);
    GeometryCache c = build_cache(ci);
    FlowOptions opts;
    opts.debug_gauss = true;
    opts.debug_gauss_tol = 1e-9;
    std::vector<Vec3> lap = flow_rhs(c, opts);
    std::vector<Vec3> hn = flow_rhs(c);
    double diff = 0.0;
    for (int p = 0; p < ci.grid.size(); ++p) diff = std::max(diff, max_abs(lap[p] - hn[p]));
    CHECK(diff <= 1e-11);
  }
}

TEST_CASE("CFL step bound") {
  SUBCASE("unit circle N=64") {
    GeometryCache c = build_cache(make_circle(1.0, 64));
    const double expected = 0.25 * 2.0 * kPi / 64.0;
    // discrete g^11 carries a dx^2/6 relative bias
    CHECK(std::fabs(cfl_dt(c) - expected) <= 2e-3 * expected);
  }
  SUBCASE("shrinking circle: dt proportional to r") {
    GeometryCache c1 = build_cache(make_circle(1.0, 64));
    GeometryCache c2 = build_cache(make_circle(0.5, 64));
    CHECK(cfl_dt(c2) == doctest::Approx(0.5 * cfl_dt(c1)).epsilon(1e-12));
  }
  SUBCASE("cylinder r=2 with axial spacing 0.1") {
    // angular g^11 = 0.25, axial g^22 = 1
    Immersion cy = make_cylinder(2.0, 1.6, 64, 16);  // axial spacing 0.1
    GeometryCache c = build_cache(cy);
    const double expected = 0.25 * std::min((2.0 * kPi / 64.0) / 0.5, 0.1);
    CHECK(std::fabs(cfl_dt(c) - expected) <= 2e-3 * expected);
  }
}

TEST_CASE("circle radius trajectory matches the radial oracle") {
  FlowOptions opts;
  const double t0 = std::sqrt(kPi / 2.0);
  double spread = 0.0;
  const double err =
      radius_error_vs_oracle(make_circle(1.0, 128), 0.0, 1.0, 0.9 * t0, opts, &spread);
  CHECK(err <= 1e-3);
  CHECK(spread <= 1e-9);  // rotational symmetry of the scheme
}

TEST_CASE("sphere band matches the c=2 oracle with the radial band fill") {
  FlowOptions opts;
  opts.band_fill = BandFillMode::RadialExtension;
  const double t0 = std::sqrt(kPi) / 2.0;
  double spread = 0.0;
  const double err = radius_error_vs_oracle(make_sphere_band(1.0, kPi / 4.0, 65, 128), 0.0, 2.0,
                                            0.9 * t0, opts, &spread);
  CHECK(err <= 1e-3);
  CHECK(spread <= 1e-9);
}

TEST_CASE("outward initial velocity expands to e^{1/8} then falls") {
  FlowOptions opts;
  Immersion ci = make_circle(1.0, 128);
  std::vector<Vec3> v0(ci.points.size());
  for (std::size_t p = 0; p < v0.size(); ++p) {
    v0[p] = ci.points[p] * (0.5 / norm(ci.points[p]));
  }
  FlowState fs = make_flow_state(ci, v0, opts);
  StepScratch scratch;
  double r_peak = 0.0;
  int sign_changes = 0;
  double prev_r = 1.0;
  int prev_sign = 1;
  while (fs.t < 1.5) {
    REQUIRE_FALSE(flow_step(fs, opts, scratch, 1.5 - fs.t).has_value());
    double rm, rmin, rmax;
    radius_stats(fs.im, rm, rmin, rmax);
    const int sgn = rm > prev_r ? 1 : -1;
    if (sgn != prev_sign && fs.step > 1) ++sign_changes;
    prev_sign = sgn;
    prev_r = rm;
    r_peak = std::max(r_peak, rm);
  }
  CHECK(std::fabs(r_peak - std::exp(0.125)) <= 5e-3);
  CHECK(sign_changes == 1);
}

TEST_CASE("flow classification matches the radial lemma for r1 in {-0.5, 0, 0.5}") {
  for (double r1 : {-0.5, 0.0, 0.5}) {
    FlowOptions opts;
    Immersion ci = make_circle(1.0, 64);
    std::vector<Vec3> v0(ci.points.size(), Vec3{});
    for (std::size_t p = 0; p < v0.size(); ++p) {
      v0[p] = ci.points[p] * (r1 / norm(ci.points[p]));
    }
    FlowState fs = make_flow_state(ci, v0, opts);
    StepScratch scratch;
    bool expanded = false;
    double prev_r = 1.0;
    while (fs.t < 0.6) {
      REQUIRE_FALSE(flow_step(fs, opts, scratch, 0.6 - fs.t).has_value());
      double rm, rmin, rmax;
      radius_stats(fs.im, rm, rmin, rmax);
      if (rm > prev_r + 1e-12) expanded = true;
      prev_r = rm;
    }
    const RadialClassification cls = classify_radial_phase(1.0, r1);
    CHECK(expanded == (cls.phase == RadialPhase::ExpandThenCollapse));
  }
}

TEST_CASE("full runs and terminal events") {
  SUBCASE("flat band stays put") {
    Immersion fb = make_flat_curve(2.0 * kPi, 64);
    FlowOptions opts;
    opts.fixed_dt = 0.01;
    FlowState fs = make_flow_state(fb, std::vector<Vec3>(fb.points.size()), opts);
    RunResult rr = flow_run(fs, 1.0, opts, 10);
    CHECK(rr.event.kind == FlowEventKind::Finished);
    Immersion ref = make_flat_curve(2.0 * kPi, 64);
    double drift = 0.0;
    for (std::size_t p = 0; p < ref.points.size(); ++p) {
      drift = std::max(drift, max_abs(fs.im.points[p] - ref.points[p]));
    }
    CHECK(drift <= 1e-12);
  }
  SUBCASE("circle collapses near sqrt(pi/2)") {
    Immersion ci = make_circle(1.0, 256);
    FlowOptions opts;
    FlowState fs = make_flow_state(ci, std::vector<Vec3>(ci.points.size()), opts);
    RunResult rr = flow_run(fs, 2.0, opts, 50);
    REQUIRE(rr.event.kind == FlowEventKind::Collapse);
    const double t0 = std::sqrt(kPi / 2.0);
    CHECK(std::fabs(rr.event.t - t0) <= 0.01 * t0);
    // monotone radius decrease in the recorded stats
    for (std::size_t k = 1; k < rr.stats.size(); ++k) {
      CHECK(rr.stats[k].r_mean < rr.stats[k - 1].r_mean);
    }
  }
  SUBCASE("cylinder shrinks to its axis, axial coordinate frozen") {
    Immersion cy = make_cylinder(1.0, 1.0, 64, 16);
    const std::vector<Vec3> initial = cy.points;
    FlowOptions opts;
    FlowState fs = make_flow_state(cy, std::vector<Vec3>(cy.points.size()), opts);
    RunResult rr = flow_run(fs, 2.0, opts, 50);
    REQUIRE(rr.event.kind == FlowEventKind::Collapse);
    CHECK(std::fabs(rr.event.t - std::sqrt(kPi / 2.0)) <= 0.02);
    double zdrift = 0.0;
    for (std::size_t p = 0; p < initial.size(); ++p) {
      zdrift = std::max(zdrift, std::fabs(fs.im.points[p].z - initial[p].z));
    }
    CHECK(zdrift <= 1e-12);
  }
  SUBCASE("curvature threshold reports blow-up") {
    Immersion ci = make_circle(1.0, 64);
    FlowOptions opts;
    opts.h_max = 3.0;  // reached when r falls through 1/3
    FlowState fs = make_flow_state(ci, std::vector<Vec3>(ci.points.size()), opts);
    RunResult rr = flow_run(fs, 2.0, opts, 50);
    REQUIRE(rr.event.kind == FlowEventKind::BlowUp);
    CHECK(rr.event.t > 1.0);
    CHECK(rr.event.t < 1.2);
    CHECK(rr.event.detail >= 3.0);
  }
}

TEST_CASE("time reversal at frozen dt") {
  SUBCASE("circle, 50 steps") {
    Immersion ci = make_circle(1.0, 64);
    FlowState fs = make_flow_state(ci, std::vector<Vec3>(ci.points.size()), {});
    CHECK(reverse_check(fs, 50, {}) <= 1e-8);
  }
  SUBCASE("zero steps is exact") {
    Immersion ci = make_circle(1.0, 64);
    FlowState fs = make_flow_state(ci, std::vector<Vec3>(ci.points.size()), {});
    CHECK(reverse_check(fs, 0, {}) == 0.0);
  }
  SUBCASE("flat band") {
    Immersion fb = make_flat_curve(2.0 * kPi, 64);
    FlowOptions opts;
    opts.fixed_dt = 0.02;
    FlowState fs = make_flow_state(fb, std::vector<Vec3>(fb.points.size()), opts);
    CHECK(reverse_check(fs, 200, opts) <= 1e-13);
  }
}

TEST_CASE("space-time convergence toward the oracle (factor ~4 per doubling)") {
  FlowOptions opts;
  const double t_half = 0.5 * std::sqrt(kPi / 2.0);
  double prev = 0.0;
  for (int n : {64, 128, 256}) {
    // error at the fixed time t_half only
    Immersion ci = make_circle(1.0, n);
    FlowState fs = make_flow_state(ci, std::vector<Vec3>(ci.points.size()), opts);
    StepScratch scratch;
    while (fs.t < t_half) {
      REQUIRE_FALSE(flow_step(fs, opts, scratch, t_half - fs.t).has_value());
    }
    double rm, rmin, rmax;
    radius_stats(fs.im, rm, rmin, rmax);
    std::vector<double> tq = {t_half};
    const double r_oracle = sample_radial({1.0, 0.0, 0.0, 1.0}, tq)[0].r;
    const double err = std::fabs(rm - r_oracle);
    if (prev > 0.0) {
      const double ratio = prev / err;
      CHECK(ratio >= 3.5);
      CHECK(ratio <= 4.5);
    }
    prev = err;
  }
}

TEST_CASE("velocity stays consistent with the three-level scheme") {
  Immersion ci = make_circle(1.0, 64);
  FlowOptions opts;
  opts.fixed_dt = 0.01;
  FlowState fs = make_flow_state(ci, std::vector<Vec3>(ci.points.size()), opts);
  StepScratch scratch;
  for (int s = 0; s < 5; ++s) REQUIRE_FALSE(flow_step(fs, opts, scratch).has_value());
  // the velocity written during the last step refresh matches the formula
  GeometryCache c = build_cache(fs.im);
  (void)c;
  double err = 0.0;
  for (std::size_t p = 0; p < fs.im.points.size(); ++p) {
    const Vec3 expect = (fs.im.points[p] - fs.prev_points[p]) * (1.0 / fs.dt_prev);
    // consistency up to the dt/2 * F correction term
    err = std::max(err, max_abs(fs.velocity[p] - expect));
  }
  CHECK(err <= 0.5 * fs.dt_prev * 1.1);  // |F| ~ 1 on the unit circle
}

TEST_CASE("DeTurck coupling stays at the identity where connections vanish") {
  SUBCASE("shrinking circle") {
    Immersion ci = make_circle(1.0, 64);
    FlowOptions opts;
    opts.deturck = true;
    FlowState fs = make_flow_state(ci, std::vector<Vec3>(ci.points.size()), opts);
    StepScratch scratch;
    const double t_stop = 0.5 * std::sqrt(kPi / 2.0);
    while (fs.t < t_stop) {
      REQUIRE_FALSE(flow_step(fs, opts, scratch, t_stop - fs.t).has_value());
    }
    REQUIRE(fs.deturck.has_value());
    CHECK(max_norm_interior(fs.im.grid, fs.deturck->d) <= 1e-8);
  }
  SUBCASE("static flat band") {
    Immersion fb = make_flat_curve(2.0 * kPi, 64);
    FlowOptions opts;
    opts.deturck = true;
    opts.fixed_dt = 0.02;
    FlowState fs = make_flow_state(fb, std::vector<Vec3>(fb.points.size()), opts);
    RunResult rr = flow_run(fs, 1.0, opts, 10);
    CHECK(rr.event.kind == FlowEventKind::Finished);
    CHECK(max_norm_interior(fs.im.grid, fs.deturck->d) <= 1e-13);
  }
  SUBCASE("rhs vanishes for identity data when the connections match") {
    Immersion ci = make_circle(1.0, 64);
    FlowOptions opts;
    opts.deturck = true;
    FlowState fs = make_flow_state(ci, std::vector<Vec3>(ci.points.size()), opts);
    GeometryCache c = build_cache(fs.im);
    std::vector<Vec3> acc = deturck_rhs(*fs.deturck, c);
    for (const Vec3& a : acc) CHECK(max_abs(a) <= 1e-12);
  }
  SUBCASE("identity data on a torus: interpolated and background connections cancel") {
    // nonzero Christoffel field; at t = 0 the interpolation lands on grid
    // nodes and the two connection terms cancel exactly
    Immersion to = make_torus(2.0, 0.5, 32, 32);
    FlowOptions opts;
    opts.deturck = true;
    FlowState fs = make_flow_state(to, std::vector<Vec3>(to.points.size()), opts);
    GeometryCache c = build_cache(fs.im);
    std::vector<Vec3> acc = deturck_rhs(*fs.deturck, c);
    for (const Vec3& a : acc) CHECK(max_abs(a) <= 1e-12);
  }
}

TEST_CASE("degenerate diffeomorphism is rejected") {
  Immersion ci = make_circle(1.0, 64);
  FlowOptions opts;
  opts.deturck = true;
  FlowState fs = make_flow_state(ci, std::vector<Vec3>(ci.points.size()), opts);
  // displacement with dy/dx < -1 somewhere: Jacobian loses positivity
  for (int i = 0; i < 64; ++i) {
    fs.deturck->d[i].x = -1.5 * std::sin(fs.im.grid.coord(0, i));
  }
  GeometryCache c = build_cache(fs.im);
  CHECK_THROWS_AS(deturck_rhs(*fs.deturck, c), DiffeoDegenerate);
}

TEST_CASE("non-finite positions are reported, not propagated") {
  Immersion ci = make_circle(1.0, 16);
  FlowState fs = make_flow_state(ci, std::vector<Vec3>(ci.points.size()), {});
  fs.im.points[5].x = std::nan("");
  StepScratch scratch;
  CHECK_THROWS_AS(flow_step(fs, {}, scratch), NonFiniteField);
}
