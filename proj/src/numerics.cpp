#include "homctl/numerics.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "expm_impl.hpp"

namespace homctl {

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix expm(const Matrix& m, double s) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("expm: matrix must be square");
  }
  require_finite(m, "expm");
  if (!std::isfinite(s)) {
    throw std::invalid_argument("expm: scale must be finite");
  }
  switch (m.rows()) {
    case 2:
      return detail::expm_core<Eigen::Matrix2d>(s * m);
    case 3:
      return detail::expm_core<Eigen::Matrix3d>(s * m);
    case 4:
      return detail::expm_core<Eigen::Matrix4d>(s * m);
    default:
      return detail::expm_core<Matrix>(s * m);
  }
}

namespace {

// Householder reduction to upper Hessenberg form, in place.
void hessenberg(Matrix& h) {
  const Eigen::Index n = h.rows();
  for (Eigen::Index k = 0; k < n - 2; ++k) {
    Vector x = h.col(k).segment(k + 1, n - k - 1);
    const double alpha = -(x(0) >= 0 ? 1.0 : -1.0) * x.norm();
    if (std::abs(alpha) < 1e-300) continue;
    Vector v = x;
    v(0) -= alpha;
    const double vnorm = v.norm();
    if (vnorm < 1e-300) continue;
    v /= vnorm;
    auto rows = Eigen::seq(k + 1, n - 1);
    h(rows, Eigen::all) -= 2.0 * v * (v.transpose() * h(rows, Eigen::all));
    h(Eigen::all, rows) -= 2.0 * (h(Eigen::all, rows) * v) * v.transpose();
  }
}

void append_block_real_parts(const Matrix& h, Eigen::Index lo, Eigen::Index hi,
                             std::vector<double>& out) {
  if (hi == lo) {
    out.push_back(h(lo, lo));
    return;
  }
  // 2x2 block: real eigenvalues when the discriminant is nonnegative.
  const double a = h(lo, lo), b = h(lo, hi), c = h(hi, lo), d = h(hi, hi);
  const double tr = a + d;
  const double disc = (a - d) * (a - d) + 4.0 * b * c;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    out.push_back(0.5 * (tr + root));
    out.push_back(0.5 * (tr - root));
  } else {
    out.push_back(0.5 * tr);
    out.push_back(0.5 * tr);
  }
}

// Francis double-shift QR on a Hessenberg matrix; returns real parts.
std::vector<double> qr_real_parts(Matrix h) {
  const Eigen::Index n = h.rows();
  std::vector<double> out;
  Eigen::Index hi = n - 1;
  int stuck = 0;
  const double eps = 1e-15;
  while (hi >= 0) {
    if (hi == 0) {
      out.push_back(h(0, 0));
      break;
    }
    // Deflate converged subdiagonal entries.
    Eigen::Index lo = hi;
    while (lo > 0 &&
           std::abs(h(lo, lo - 1)) > eps * (std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1)))) {
      --lo;
    }
    if (lo == hi) {
      out.push_back(h(hi, hi));
      --hi;
      stuck = 0;
      continue;
    }
    if (lo == hi - 1) {
      append_block_real_parts(h, lo, hi, out);
      hi = lo - 1;
      stuck = 0;
      continue;
    }
    if (++stuck > 30 * n) {
      throw std::runtime_error("eigen_real_parts: QR iteration did not converge");
    }
    // Implicit double shift from the trailing 2x2 block.
    const double s = h(hi - 1, hi - 1) + h(hi, hi);
    const double t = h(hi - 1, hi - 1) * h(hi, hi) - h(hi - 1, hi) * h(hi, hi - 1);
    double x = h(lo, lo) * h(lo, lo) + h(lo, lo + 1) * h(lo + 1, lo) - s * h(lo, lo) + t;
    double y = h(lo + 1, lo) * (h(lo, lo) + h(lo + 1, lo + 1) - s);
    double z = h(lo + 2, lo + 1) * h(lo + 1, lo);
    for (Eigen::Index k = lo; k <= hi - 2; ++k) {
      Eigen::Vector3d v(x, y, z);
      const double vnorm = v.norm();
      if (vnorm > 1e-300) {
        v(0) += (v(0) >= 0 ? 1.0 : -1.0) * vnorm;
        const double vn2 = v.squaredNorm();
        if (vn2 > 1e-300) {
          const Eigen::Index r0 = k, r1 = k + 1, r2 = k + 2;
          for (Eigen::Index col = std::max<Eigen::Index>(0, k - 1); col < n; ++col) {
            const double dot =
                v(0) * h(r0, col) + v(1) * h(r1, col) + v(2) * h(r2, col);
            const double f = 2.0 * dot / vn2;
            h(r0, col) -= f * v(0);
            h(r1, col) -= f * v(1);
            h(r2, col) -= f * v(2);
          }
          const Eigen::Index last = std::min(hi, k + 3);
          for (Eigen::Index row = 0; row <= last; ++row) {
            const double dot =
                v(0) * h(row, r0) + v(1) * h(row, r1) + v(2) * h(row, r2);
            const double f = 2.0 * dot / vn2;
            h(row, r0) -= f * v(0);
            h(row, r1) -= f * v(1);
            h(row, r2) -= f * v(2);
          }
        }
      }
      x = h(k + 1, k);
      y = h(k + 2, k);
      z = (k + 3 <= hi) ? h(k + 3, k) : 0.0;
    }
    // Final 2x1 Givens-like reflection.
    {
      Eigen::Vector2d v(x, y);
      const double vnorm = v.norm();
      if (vnorm > 1e-300) {
        v(0) += (v(0) >= 0 ? 1.0 : -1.0) * vnorm;
        const double vn2 = v.squaredNorm();
        if (vn2 > 1e-300) {
          const Eigen::Index r0 = hi - 1, r1 = hi;
          for (Eigen::Index col = hi - 2; col < n; ++col) {
            const double dot = v(0) * h(r0, col) + v(1) * h(r1, col);
            const double f = 2.0 * dot / vn2;
            h(r0, col) -= f * v(0);
            h(r1, col) -= f * v(1);
          }
          for (Eigen::Index row = 0; row <= hi; ++row) {
            const double dot = v(0) * h(row, r0) + v(1) * h(row, r1);
            const double f = 2.0 * dot / vn2;
            h(row, r0) -= f * v(0);
            h(row, r1) -= f * v(1);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<double> eigen_real_parts(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("eigen_real_parts: matrix must be square");
  }
  require_finite(m, "eigen_real_parts");
  const Eigen::Index n = m.rows();
  if (n == 0) return {};
  if (n == 1) return {m(0, 0)};
  if (n == 2) {
    std::vector<double> out;
    append_block_real_parts(m, 0, 1, out);
    return out;
  }
  Matrix h = m;
  hessenberg(h);
  auto out = qr_real_parts(h);
  if (out.size() != static_cast<std::size_t>(n)) {
    throw std::runtime_error("eigen_real_parts: lost eigenvalues during deflation");
  }
  return out;
}

double max_eigen_real_part(const Matrix& m) {
  double best = -std::numeric_limits<double>::infinity();
  for (double r : eigen_real_parts(m)) best = std::max(best, r);
  return best;
}

bool is_hurwitz(const Matrix& m) { return max_eigen_real_part(m) < 0.0; }

bool is_anti_hurwitz(const Matrix& m) {
  for (double r : eigen_real_parts(m)) {
    if (r <= 0.0) return false;
  }
  return true;
}

double min_sym_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym(m));
  return solver.eigenvalues().minCoeff();
}

double max_sym_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym(m));
  return solver.eigenvalues().maxCoeff();
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
  if (a.rows() != a.cols() || q.rows() != q.cols() || a.rows() != q.rows()) {
    throw std::invalid_argument("solve_lyapunov: dimension mismatch");
  }
  require_finite(a, "solve_lyapunov");
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + q.cwiseAbs().maxCoeff()) ||
      min_sym_eigenvalue(q) <= 0.0) {
    throw std::invalid_argument("solve_lyapunov: Q must be symmetric positive definite");
  }
  const Eigen::Index n = a.rows();
  // vec(A^T P) = (I (x) A^T) vec(P), vec(P A) = (A^T (x) I) vec(P).
  Matrix big = Matrix::Zero(n * n, n * n);
  const Matrix at = a.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    big.block(i * n, i * n, n, n) += at;
    for (Eigen::Index j = 0; j < n; ++j) {
      big.block(i * n, j * n, n, n) += at(i, j) * Matrix::Identity(n, n);
    }
  }
  Vector rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    rhs.segment(j * n, n) = -q.col(j);
  }
  Eigen::FullPivLU<Matrix> lu(big);
  if (!lu.isInvertible()) {
    throw std::runtime_error("solve_lyapunov: singular system (A not Hurwitz?)");
  }
  const Vector sol = lu.solve(rhs);
  Matrix p(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    p.col(j) = sol.segment(j * n, n);
  }
  p = sym(p);
  const double residual = (a.transpose() * p + p * a + q).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-9 * (1.0 + q.cwiseAbs().maxCoeff()))) {
    throw std::runtime_error("solve_lyapunov: residual too large");
  }
  if (min_sym_eigenvalue(p) <= 0.0) {
    throw std::runtime_error("solve_lyapunov: solution not positive definite (A not Hurwitz?)");
  }
  return p;
}

}  // namespace homctl
