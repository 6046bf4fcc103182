#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hmcf/errors.hpp"
#include "hmcf/geometry.hpp"
#include "hmcf/stability.hpp"

using namespace hmcf;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("graph metric formula") {
  Grid g = grid_graph_domain(1, 64, 1);
  SUBCASE("zero displacement gives the flat metric") {
    std::vector<Vec3> y(g.size(), Vec3{});
    for (const Sym2& m : graph_metric(g, y)) {
      CHECK(m.xx == doctest::Approx(1.0));
    }
  }
  SUBCASE("pure height: g_11 = 1 + (f')^2 with the same stencil") {
    std::vector<Vec3> y(g.size());
    for (int i = 0; i < 64; ++i) y[i] = Vec3{0.0, 0.3 * std::sin(g.coord(0, i)), 0.0};
    auto gm = graph_metric(g, y);
    for (int i = 0; i < 64; ++i) {
      const double df = d1_field(g, y, i, 0, 0).y;
      CHECK(gm[i].xx == doctest::Approx(1.0 + df * df).epsilon(1e-14));
    }
  }
  SUBCASE("tangential mode: g_11 = 1 + 2 a cos + (a cos)^2 against the closed form") {
    const double a = 0.2;
    std::vector<Vec3> y(g.size());
    for (int i = 0; i < 64; ++i) y[i] = Vec3{a * std::sin(g.coord(0, i)), 0.0, 0.0};
    auto gm = graph_metric(g, y);
    double err = 0.0;
    for (int i = 0; i < 64; ++i) {
      const double cx = std::cos(g.coord(0, i));
      err = std::max(err, std::fabs(gm[i].xx - (1.0 + 2.0 * a * cx + a * a * cx * cx)));
    }
    CHECK(err <= 5e-3);  // stencil bias of the derivative only
  }
}

TEST_CASE("graph metric equals the general-immersion metric path to 1e-12") {
  for (int dim : {1, 2}) {
    Grid g = grid_graph_domain(dim, 32, 32);
    GraphProfile prof = make_profile(g, "sine_mixed", 1);
    std::vector<Vec3> y(g.size());
    for (int p = 0; p < g.size(); ++p) y[p] = prof.shape[p] * 0.1;
    auto gm = graph_metric(g, y);
    auto cm = compute_metric(make_graph_immersion(g, y));
    double diff = 0.0;
    for (int p = 0; p < g.size(); ++p) diff = std::max(diff, max_abs(gm[p] - cm[p]));
    CHECK(diff <= 1e-12);
  }
}

TEST_CASE("inverse-metric truncation error scales with |lambda|^2") {
  Grid g = grid_graph_domain(1, 64, 1);
  GraphProfile prof = make_profile(g, "sine_mixed", 1);
  double prev = 0.0;
  for (double s : {0.05, 0.025, 0.0125}) {
    std::vector<Vec3> y(g.size());
    for (int p = 0; p < g.size(); ++p) y[p] = prof.shape[p] * s;
    auto exact = graph_inverse_exact(g, graph_metric(g, y));
    auto trunc = graph_inverse_truncated(g, y);
    double diff = 0.0;
    for (int p = 0; p < g.size(); ++p) diff = std::max(diff, max_abs(exact[p] - trunc[p]));
    if (prev > 0.0) {
      const double order = std::log2(prev / diff);
      CHECK(order >= 1.8);
      CHECK(order <= 2.2);
    }
    prev = diff;
  }
}

TEST_CASE("full right-hand side minus the flat Laplacian is second order in the data") {
  Grid g = grid_graph_domain(1, 64, 1);
  GraphProfile prof = make_profile(g, "sine_mixed", 1);
  double prev = 0.0;
  for (double s : {0.05, 0.025, 0.0125}) {
    std::vector<Vec3> y(g.size());
    for (int p = 0; p < g.size(); ++p) y[p] = prof.shape[p] * s;
    auto full = graph_rhs(g, y, false);
    auto flat = graph_rhs(g, y, true);
    double diff = 0.0;
    for (int p = 0; p < g.size(); ++p) diff = std::max(diff, max_abs(full[p] - flat[p]));
    if (prev > 0.0) {
      const double order = std::log2(prev / diff);
      CHECK(order >= 1.8);
      CHECK(order <= 2.2);
    }
    prev = diff;
  }
}

TEST_CASE("zero data stays identically zero") {
  Grid g = grid_graph_domain(1, 32, 1);
  GraphState gs = make_graph_state(g, std::vector<Vec3>(g.size()), std::vector<Vec3>(g.size()));
  GraphOptions opts;
  CHECK(graph_run(gs, 1.0, opts) == GraphStepStatus::Ok);
  for (const Vec3& v : gs.y) CHECK(max_abs(v) == 0.0);
}

TEST_CASE("tiny height mode follows the discrete linear wave solver to O(eps^2)") {
  Grid g = grid_graph_domain(1, 64, 1);
  GraphProfile prof = make_profile(g, "sine_height", 1);
  const double eps = 1e-4;
  std::vector<Vec3> y0(g.size()), v0(g.size(), Vec3{});
  for (int p = 0; p < g.size(); ++p) y0[p] = prof.shape[p] * eps;
  GraphState nl = make_graph_state(g, y0, v0);
  GraphState lin = make_graph_state(g, y0, v0);
  GraphOptions nlo, lino;
  lino.linear = true;
  nlo.fixed_dt = lino.fixed_dt = 0.2 * g.spacing[0];
  REQUIRE(graph_run(nl, 2.0, nlo) == GraphStepStatus::Ok);
  REQUIRE(graph_run(lin, 2.0, lino) == GraphStepStatus::Ok);
  double diff = 0.0, scale = 0.0;
  for (int p = 0; p < g.size(); ++p) {
    diff = std::max(diff, max_abs(nl.y[p] - lin.y[p]));
    scale = std::max(scale, max_abs(lin.y[p]));
  }
  CHECK(diff / scale <= 1e-6);
}

TEST_CASE("moderate eps stays bounded over several periods") {
  Grid g = grid_graph_domain(1, 64, 1);
  GraphProfile prof = make_profile(g, "sine_mixed", 1);
  std::vector<Vec3> y0(g.size()), v0(g.size(), Vec3{});
  for (int p = 0; p < g.size(); ++p) y0[p] = prof.shape[p] * 0.1;
  GraphState gs = make_graph_state(g, y0, v0);
  GraphOptions opts;
  REQUIRE(graph_run(gs, 12.0, opts) == GraphStepStatus::Ok);
  CHECK(max_norm_interior(g, gs.y) <= 1.0);
}

TEST_CASE("epsilon scaling sweep") {
  Grid g = grid_graph_domain(1, 64, 1);
  GraphProfile prof = make_profile(g, "sine_mixed", 1);
  SUBCASE("quadratic deviation from linearity") {
    EpsScalingReport rep = epsilon_scaling(g, prof, {0.02, 0.01, 0.005}, 1.0);
    REQUIRE(rep.pair_orders.size() == 1);
    CHECK(rep.pair_orders[0] >= 1.8);
    CHECK(rep.pair_orders[0] <= 2.2);
    for (const EpsScalingRow& r : rep.rows) CHECK(r.verdict == "ok");
    CHECK(rep.empirical_eps0 == doctest::Approx(0.02));
  }
  SUBCASE("zero entry gives exactly zero") {
    EpsScalingReport rep = epsilon_scaling(g, prof, {0.01, 0.0}, 0.5);
    CHECK(rep.rows[1].sup_norm == 0.0);
  }
  SUBCASE("large eps violates the small-gradient regime and is excluded") {
    EpsScalingReport rep = epsilon_scaling(g, prof, {0.8, 0.01, 0.005}, 0.5);
    CHECK(rep.rows[0].verdict == "excluded_regime");
    CHECK(rep.rows[0].deviation < 0.0);  // no deviation against an excluded run
    CHECK(rep.rows[1].verdict == "ok");
    CHECK(rep.empirical_eps0 == doctest::Approx(0.01));
  }
  SUBCASE("2d domain") {
    Grid g2 = grid_graph_domain(2, 24, 24);
    GraphProfile prof2 = make_profile(g2, "sine_mixed", 1);
    EpsScalingReport rep = epsilon_scaling(g2, prof2, {0.02, 0.01, 0.005}, 0.5);
    REQUIRE(rep.pair_orders.size() == 1);
    CHECK(rep.pair_orders[0] >= 1.8);
    CHECK(rep.pair_orders[0] <= 2.2);
  }
}

TEST_CASE("profiles validate") {
  Grid g = grid_graph_domain(1, 32, 1);
  CHECK_THROWS_AS(make_profile(g, "nope", 1), DomainError);
  GraphProfile b = make_profile(g, "bump", 1);
  double sup = 0.0;
  for (const Vec3& v : b.shape) sup = std::max(sup, max_abs(v));
  CHECK(sup == doctest::Approx(1.0));  // bump peaks at 1 before scaling by eps
}
