#pragma once

#include <Eigen/Dense>
#include <vector>

namespace homctl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Throws std::invalid_argument if m has a NaN or infinite entry.
void require_finite(const Eigen::Ref<const Matrix>& m, const char* what);

/// Symmetric part (m + m^T) / 2.
Matrix sym(const Matrix& m);

/// Matrix exponential e^{s m} by scaling-and-squaring around an order-12
/// truncated series. Relative accuracy ~1e-12 for ||s m|| up to ~100.
Matrix expm(const Matrix& m, double s = 1.0);

/// Real parts of all eigenvalues, in no particular order. Closed forms for
/// n <= 2, Hessenberg reduction + Francis double-shift QR above (repeated
/// eigenvalues stay accurate there, which a characteristic-polynomial route
/// cannot guarantee). Throws std::runtime_error when the iteration does not
/// converge.
std::vector<double> eigen_real_parts(const Matrix& m);

double max_eigen_real_part(const Matrix& m);
bool is_hurwitz(const Matrix& m);
bool is_anti_hurwitz(const Matrix& m);

/// Extreme eigenvalues of a symmetric matrix.
double min_sym_eigenvalue(const Matrix& m);
double max_sym_eigenvalue(const Matrix& m);

/// Solves A^T P + P A = -Q for symmetric P through the vectorized linear
/// system. Requires A Hurwitz and Q symmetric positive definite; throws
/// std::runtime_error when the system is singular or P is not positive
/// definite.
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

}  // namespace homctl
