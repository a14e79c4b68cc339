#pragma once

// Shared scaling-and-squaring core (internal). MatrixType is either a
// fixed-size stack matrix (hot path for small n) or MatrixXd.

#include <cmath>

#include <Eigen/Dense>

namespace homctl::detail {

template <typename MatrixType>
MatrixType expm_core(MatrixType x) {
  const double norm = x.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
  int squarings = 0;
  if (norm > 0.25) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
    x /= std::ldexp(1.0, squarings);
  }
  MatrixType result = MatrixType::Identity(x.rows(), x.cols());
  MatrixType term = result;
  MatrixType scratch = result;
  for (int k = 1; k <= 12; ++k) {
    scratch.noalias() = term * x;
    term = scratch / static_cast<double>(k);
    result += term;
  }
  for (int k = 0; k < squarings; ++k) {
    scratch.noalias() = result * result;
    result.swap(scratch);
  }
  return result;
}

}  // namespace homctl::detail
