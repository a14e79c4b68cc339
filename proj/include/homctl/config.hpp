#pragma once

#include <cstdint>
#include <string>

#include "homctl/simulation.hpp"
#include "homctl/synthesis.hpp"

namespace homctl {

/// Everything a CLI run needs, parsed from one JSON document. Dimension
/// consistency is validated before any stage runs.
struct ProblemConfig {
  LinearPlant plant;
  ConeSpec cone;
  double rho = 4.0;
  double mu = -0.5;

  Vector x0;
  SimConfig sim;
  PerturbationSpec perturbation;
  ControllerKind controller_kind = ControllerKind::homogeneous;

  int samples = 2048;
  std::uint64_t seed = 1;

  Vector issf_r;      // strictly positive offset for the safety-degradation check
  double iss_q_max = 1.0;
  std::string out_dir = ".";
};

/// Parses and validates; throws std::invalid_argument (malformed JSON,
/// missing keys, dimension mismatch, out-of-range values) with the failing
/// check named in the message.
ProblemConfig load_config(const std::string& path);

/// Serializes a config as JSON (used by tests and to emit samples).
void save_config(const ProblemConfig& cfg, const std::string& path);

/// Config prefilled with the bundled reference design.
ProblemConfig reference_config();

}  // namespace homctl
