#pragma once

#include "homctl/numerics.hpp"

namespace homctl {

/// min objective . v   subject to   ineq_lhs v <= ineq_rhs,  lower <= v <= upper.
/// Bound entries may be +/- infinity.
struct LpProblem {
  Vector objective;
  Matrix ineq_lhs;
  Vector ineq_rhs;
  Vector lower;
  Vector upper;

  int variables() const { return static_cast<int>(objective.size()); }
  int rows() const { return static_cast<int>(ineq_rhs.size()); }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Vector solution;
  double objective = 0.0;
  int iterations = 0;
};

/// Dense two-phase simplex with Bland's rule. Infeasible and unbounded are
/// ordinary verdicts, not exceptions; dimension mismatches throw.
LpResult lp_solve(const LpProblem& p);

}  // namespace homctl
