// Serial vs OpenMP comparison for the pointwise kernels, with a bitwise
// equality check between the two paths.
#include <chrono>
#include <cstdio>
#include <vector>

#include "hmcf/exec.hpp"
#include "hmcf/flow.hpp"
#include "hmcf/geometry.hpp"
#include "hmcf/identities.hpp"

using namespace hmcf;

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
double time_ms(F&& fn, int reps) {
  const auto t0 = Clock::now();
  for (int k = 0; k < reps; ++k) fn();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

bool bitwise_equal(const GeometryCache& a, const GeometryCache& b) {
  for (int p = 0; p < a.grid.size(); ++p) {
    if (a.mean_curvature[p] != b.mean_curvature[p]) return false;
    if (a.normal[p].x != b.normal[p].x || a.normal[p].y != b.normal[p].y ||
        a.normal[p].z != b.normal[p].z)
      return false;
    if (a.grad_a_sq[p] != b.grad_a_sq[p]) return false;
  }
  return true;
}

}  // namespace

int main() {
  std::printf("OpenMP support: %s\n\n", openmp_enabled() ? "yes" : "no (serial fallback)");
  std::printf("%-34s %12s %12s %9s\n", "kernel", "serial [ms]", "parallel[ms]", "speedup");

  // geometry cache on a torus
  {
    Immersion torus = make_torus(2.0, 0.5, 192, 192);
    set_exec_mode(ExecMode::Serial);
    GeometryCache ser = build_cache(torus);
    const double ts = time_ms([&] { build_cache(torus); }, 5);
    set_exec_mode(ExecMode::Parallel);
    GeometryCache par = build_cache(torus);
    const double tp = time_ms([&] { build_cache(torus); }, 5);
    std::printf("%-34s %12.2f %12.2f %8.2fx  bitwise %s\n", "build_cache torus 192x192", ts, tp,
                ts / tp, bitwise_equal(ser, par) ? "equal" : "DIFFER");
  }

  // flow stepping: a 1D curve (too little work per region to win) and a 2D
  // band (the representative data-parallel case)
  {
    auto run_steps = [&] {
      Immersion c = make_circle(1.0, 8192);
      std::vector<Vec3> v0(c.points.size(), Vec3{});
      FlowOptions opts;
      FlowState fs = make_flow_state(c, v0, opts);
      StepScratch scratch;
      for (int s = 0; s < 50; ++s) (void)flow_step(fs, opts, scratch);
      return fs.im.points[0].x;
    };
    set_exec_mode(ExecMode::Serial);
    const double xs = run_steps();
    const double ts = time_ms(run_steps, 3);
    set_exec_mode(ExecMode::Parallel);
    const double xp = run_steps();
    const double tp = time_ms(run_steps, 3);
    std::printf("%-34s %12.2f %12.2f %8.2fx  bitwise %s\n", "flow_step x50 circle N=8192", ts, tp,
                ts / tp, xs == xp ? "equal" : "DIFFER");
  }
  {
    auto run_steps = [&] {
      Immersion s0 = make_sphere_band(1.0, 0.25 * 3.14159265358979, 96, 384);
      std::vector<Vec3> v0(s0.points.size(), Vec3{});
      FlowOptions opts;
      opts.band_fill = BandFillMode::RadialExtension;
      FlowState fs = make_flow_state(s0, v0, opts);
      StepScratch scratch;
      for (int s = 0; s < 20; ++s) (void)flow_step(fs, opts, scratch);
      return fs.im.points[0].x;
    };
    set_exec_mode(ExecMode::Serial);
    const double xs = run_steps();
    const double ts = time_ms(run_steps, 2);
    set_exec_mode(ExecMode::Parallel);
    const double xp = run_steps();
    const double tp = time_ms(run_steps, 2);
    std::printf("%-34s %12.2f %12.2f %8.2fx  bitwise %s\n", "flow_step x20 band 96x384", ts, tp,
                ts / tp, xs == xp ? "equal" : "DIFFER");
  }

  // residual assembly on a sphere band
  {
    ResidualStudy cfg;
    cfg.context = ResidualContext::AnalyticSphere;
    cfg.levels = {33, 65};
    set_exec_mode(ExecMode::Serial);
    const double ts = time_ms([&] { run_residual_study(cfg); }, 2);
    set_exec_mode(ExecMode::Parallel);
    const double tp = time_ms([&] { run_residual_study(cfg); }, 2);
    std::printf("%-34s %12.2f %12.2f %8.2fx\n", "residual study sphere {33,65}", ts, tp, ts / tp);
  }

  set_exec_mode(ExecMode::Parallel);
  return 0;
}
