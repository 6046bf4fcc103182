#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "hmcf/exec.hpp"
#include "hmcf/flow.hpp"
#include "hmcf/geometry.hpp"

using namespace hmcf;

namespace {

struct ModeGuard {
  ModeGuard() : saved(exec_mode()) {}
  ~ModeGuard() { set_exec_mode(saved); }
  ExecMode saved;
};

}  // namespace

TEST_CASE("mode switch") {
  ModeGuard guard;
  set_exec_mode(ExecMode::Serial);
  CHECK(exec_mode() == ExecMode::Serial);
  set_exec_mode(ExecMode::Parallel);
  CHECK(exec_mode() == ExecMode::Parallel);
}

TEST_CASE("parallel_for covers every index exactly once") {
  ModeGuard guard;
  for (ExecMode mode : {ExecMode::Serial, ExecMode::Parallel}) {
    set_exec_mode(mode);
    std::vector<int> hits(10000, 0);
    parallel_for(static_cast<std::ptrdiff_t>(hits.size()), [&](std::ptrdiff_t i) { ++hits[i]; });
    for (int h : hits) CHECK(h == 1);
  }
}

TEST_CASE("geometry cache is bitwise identical across execution modes") {
  ModeGuard guard;
  Immersion torus = make_torus(2.0, 0.5, 64, 64);
  set_exec_mode(ExecMode::Serial);
  GeometryCache a = build_cache(torus);
  set_exec_mode(ExecMode::Parallel);
  GeometryCache b = build_cache(torus);
  for (int p = 0; p < torus.grid.size(); ++p) {
    CHECK(a.mean_curvature[p] == b.mean_curvature[p]);
    CHECK(a.norm_a_sq[p] == b.norm_a_sq[p]);
    CHECK(a.trace_a3[p] == b.trace_a3[p]);
    CHECK(a.grad_a_sq[p] == b.grad_a_sq[p]);
    CHECK(a.normal[p].x == b.normal[p].x);
    CHECK(a.normal[p].y == b.normal[p].y);
    CHECK(a.normal[p].z == b.normal[p].z);
    CHECK(a.metric[p].xx == b.metric[p].xx);
    CHECK(a.metric[p].xy == b.metric[p].xy);
    CHECK(a.metric[p].yy == b.metric[p].yy);
  }
}

TEST_CASE("flow trajectories are bitwise identical across execution modes") {
  ModeGuard guard;
  auto run40 = [] {
    Immersion c = make_circle(1.0, 256);
    FlowOptions opts;
    FlowState fs = make_flow_state(c, std::vector<Vec3>(c.points.size()), opts);
    StepScratch scratch;
    for (int s = 0; s < 40; ++s) REQUIRE_FALSE(flow_step(fs, opts, scratch).has_value());
    return fs.im.points;
  };
  set_exec_mode(ExecMode::Serial);
  const std::vector<Vec3> xs = run40();
  set_exec_mode(ExecMode::Parallel);
  const std::vector<Vec3> xp = run40();
  REQUIRE(xs.size() == xp.size());
  for (std::size_t p = 0; p < xs.size(); ++p) {
    CHECK(xs[p].x == xp[p].x);
    CHECK(xs[p].y == xp[p].y);
  }
}
