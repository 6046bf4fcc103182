#pragma once

#include <array>
#include <string>
#include <vector>

#include "hmcf/geometry.hpp"

namespace hmcf {

// Derived evolution identities of the flow, checked as discrete residuals.
// simons_h / simons_a2 are the elliptic identities for the second fundamental
// form and |A|^2; the *_tt identities give the second time derivatives of the
// metric, normal, second form, mean curvature and |A|^2 along the flow.
enum class IdentityId {
  SimonsH,
  SimonsA2,
  MetricTt,
  NormalTt,
  SecondFormTt,
  MeanCurvatureTt,
  A2Tt,
};

inline constexpr std::array<IdentityId, 7> kAllIdentities = {
    IdentityId::SimonsH,       IdentityId::SimonsA2,        IdentityId::MetricTt,
    IdentityId::NormalTt,      IdentityId::SecondFormTt,    IdentityId::MeanCurvatureTt,
    IdentityId::A2Tt,
};

const char* identity_token(IdentityId id);

// Three consecutive geometry caches at fixed snapshot spacing; the residual
// is evaluated at the middle level.
struct SnapshotTriple {
  const GeometryCache* prev = nullptr;
  const GeometryCache* mid = nullptr;
  const GeometryCache* next = nullptr;
  double dt = 0.0;
};

std::vector<Sym2> residual_simons(const GeometryCache& cache);
std::vector<double> residual_simons_a2(const GeometryCache& cache);
std::vector<Sym2> residual_metric_tt(const SnapshotTriple& s);
std::vector<Vec3> residual_normal_tt(const SnapshotTriple& s);
std::vector<Sym2> residual_second_form_tt(const SnapshotTriple& s);
std::vector<double> residual_mean_curvature_tt(const SnapshotTriple& s);
std::vector<double> residual_a2_tt(const SnapshotTriple& s);

// Interior max-norm of one identity's residual for a snapshot triple.
double residual_norm(IdentityId id, const SnapshotTriple& s);

enum class ResidualContext {
  AnalyticSphere,
  AnalyticCylinder,
  SimulatedEllipse,
  SimulatedCylinder,
  SimulatedTorus,
};

const char* context_token(ResidualContext ctx);

struct ResidualRow {
  IdentityId id;
  ResidualContext context;
  int level = 0;       // resolution parameter N
  double dx = 0.0;     // leading grid spacing at this level
  double dt = 0.0;     // snapshot spacing
  double residual = 0.0;
};

struct ResidualReport {
  std::vector<ResidualRow> rows;
  // log(res_k / res_{k+1}) / log(dx_k / dx_{k+1}) between consecutive levels
  std::vector<double> orders(IdentityId id, ResidualContext ctx) const;
};

struct ResidualStudy {
  ResidualContext context = ResidualContext::AnalyticSphere;
  std::vector<int> levels = {17, 33, 65};
  // analytic families: evaluation time = t_frac * collapse time, snapshot
  // spacing = coarse_dt_frac * t0 at the coarsest level, halved per level
  double t_frac = 0.3;
  double coarse_dt_frac = 0.025;
  double r0 = 1.0;
  // simulated flows: frozen dt = t_star / steps, snapshot stride in steps
  double t_star = 0.25;
  int base_steps = 60;
  int stride = 12;
  double ellipse_a = 1.5, ellipse_b = 1.0;
  double cylinder_len = 1.0;
  int cylinder_axial = 16;
  double torus_major = 2.0, torus_minor = 0.5;
};

ResidualReport run_residual_study(const ResidualStudy& cfg);

}  // namespace hmcf
