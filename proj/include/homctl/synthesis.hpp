#pragma once

#include "homctl/cone.hpp"
#include "homctl/lp.hpp"

namespace homctl {

struct LinearSynthesisResult {
  enum class Status { ok, stalled, infeasible };
  Status status = Status::infeasible;
  Matrix K;
  Vector ell;        // positive weighting vector certifying the decay
  double cost = 0.0; // J = max_j ell^T (A + B K) e_j; negative on success
  int iterations = 0;
  bool metzler = false;
  bool hurwitz = false;
};

/// Nonovershooting linear gain by alternating linear programs: with ell fixed
/// minimize the epigraph of max_j ell^T (A + B K) e_j over K subject to
/// H(A+BK)H^-1 Metzler with diagonal >= -rho; with K fixed minimize over
/// ell in [1e-6, 1]^n. Stops when the cost improves by less than 1e-10 or
/// the iteration cap is hit; stalls with nonnegative cost are reported with
/// the best iterate rather than thrown.
LinearSynthesisResult synth_linear(const LinearPlant& plant, const ConeSpec& cone, double rho,
                                   int max_iters = 40, double gain_box = 1e3);

struct Homogenization {
  Matrix G0;
  Matrix Y0;
  Matrix K0;  // Y0 (G0 - I)^-1
  double residual = 0.0;
};

/// Minimum-norm least-squares solution of A G0 + B Y0 = G0 A + A, G0 B = 0.
/// When (G0 - I) comes out singular the solution is nudged inside the
/// solution subspace until it is invertible. Throws std::runtime_error when
/// the system is inconsistent (residual above 1e-9).
Homogenization solve_homogenization(const LinearPlant& plant, std::uint64_t seed = 0);

/// Re-optimizes G0 within the solution subspace of the homogenizer equations
/// to minimize the Metzler offset bound tau for the given cone and gain
/// (a linear program over the null-space coordinates).
Homogenization refine_homogenization(const LinearPlant& plant, const ConeSpec& cone,
                                     const Matrix& K, std::uint64_t seed = 0);

struct OffsetRange {
  bool feasible = false;
  double tau_min = 0.0;
  double mu_lower = -1.0;  // admissible degrees are [mu_lower, 0)
  std::string violation;   // offending entry when infeasible
};

/// Smallest tau >= 0 with H(tau (A+BK) - G0)H^-1 Metzler off the diagonal,
/// entrywise: tau a_ij >= g_ij for i != j where a = H(A+BK)H^-1 and
/// g = H G0 H^-1. Infeasible when some g_ij > 0 meets a_ij <= 0.
OffsetRange metzler_offset_range(const ConeSpec& cone, const Matrix& K, const Matrix& G0,
                                 const LinearPlant& plant);

/// Feasible weight for sym(P(A+BK)) < 0, sym(P Gd) > 0, P > 0 with margins
/// 1e-6 ||P||. Candidates come from Lyapunov solves on either inequality and
/// golden-section blends between them; projected subgradient ascent on the
/// worst eigenvalue margin is the fallback. Throws std::runtime_error when no
/// feasible weight is found (retry with a degree closer to zero).
Matrix solve_lmi_weight(const LinearPlant& plant, const Matrix& K, const Matrix& Gd,
                        const ConeSpec* cone = nullptr, int max_iters = 4000);

struct PipelineReport {
  LinearSynthesisResult linear;
  Homogenization homogenization;
  OffsetRange offset_range;
  MarginReport invariance;
  IssfReport issf;
  HomogeneityReport homogeneity;
  bool issf_ran = false;
};

/// End-to-end synthesis: linear gain, homogenizer, offset range, weight,
/// controller assembly, then the sampled cone checks. Fails loudly (throws
/// std::runtime_error / std::invalid_argument) at the first infeasible stage.
HomogeneousController full_pipeline(const LinearPlant& plant, const ConeSpec& cone, double rho,
                                    double mu, PipelineReport* report = nullptr,
                                    int samples = 2048, std::uint64_t seed = 1);

}  // namespace homctl
