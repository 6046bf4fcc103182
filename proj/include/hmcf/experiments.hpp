#pragma once

#include <string>
#include <vector>

#include "hmcf/config.hpp"
#include "hmcf/immersion.hpp"

namespace hmcf {

// Exit codes: 0 finished, 2 collapse detected (expected science outcome,
// outputs still written), 3 blow-up, 64 config error, 1 internal error.
struct ExperimentResult {
  int exit_code = 0;
  std::string summary;
};

// Immersion for the configured geometry. n2 == 0 picks a spacing-matched
// default for 2D geometries.
Immersion build_geometry(const SimConfig& cfg);

// velocity * unit radial direction about the centroid (outward positive).
std::vector<Vec3> radial_velocity_field(const Immersion& im, double magnitude);

ExperimentResult run_simulate(const SimConfig& cfg);
ExperimentResult run_oracle(const SimConfig& cfg);
ExperimentResult run_verify(const SimConfig& cfg);
ExperimentResult run_minkowski(const SimConfig& cfg);
ExperimentResult run_stability(const SimConfig& cfg);

ExperimentResult run_experiment(const SimConfig& cfg);

}  // namespace hmcf
