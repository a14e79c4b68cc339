#pragma once

#include "homctl/numerics.hpp"

namespace homctl {

struct LinearPlant {
  Matrix A;  // n x n
  Matrix B;  // n x m

  int dim() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(B.cols()); }

  /// [B, AB, ..., A^{n-1} B]
  Matrix controllability_matrix() const;
  bool controllable(double rel_tol = 1e-9) const;
};

/// Dimension and finiteness checks; throws std::invalid_argument.
void validate_plant(const LinearPlant& plant);

}  // namespace homctl
