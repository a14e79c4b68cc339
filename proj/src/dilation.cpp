#include "homctl/dilation.hpp"

#include <cmath>
#include <stdexcept>

#include "expm_impl.hpp"
#include "sampling.hpp"

namespace homctl {

double Dilation::weighted_norm(const Vector& x) const {
  return std::sqrt(std::max(0.0, x.dot(weight * x)));
}

Dilation make_dilation(Matrix generator, Matrix weight) {
  if (generator.rows() != generator.cols() || weight.rows() != weight.cols() ||
      generator.rows() != weight.rows()) {
    throw std::invalid_argument("make_dilation: dimension mismatch");
  }
  require_finite(generator, "make_dilation: generator");
  require_finite(weight, "make_dilation: weight");
  if ((weight - weight.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * (1.0 + weight.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("make_dilation: weight must be symmetric");
  }
  if (min_sym_eigenvalue(weight) <= 0.0) {
    throw std::invalid_argument("make_dilation: weight must be positive definite");
  }
  if (!is_anti_hurwitz(generator)) {
    throw std::invalid_argument("make_dilation: generator must be anti-Hurwitz");
  }
  Dilation d;
  d.generator = std::move(generator);
  d.weight = sym(weight);
  d.monotonicity_margin = min_sym_eigenvalue(d.weight * d.generator);
  if (d.monotonicity_margin <= 0.0) {
    throw std::invalid_argument("make_dilation: dilation is not strictly monotone");
  }
  return d;
}

Dilation standard_dilation(int n) {
  Dilation d;
  d.generator = Matrix::Identity(n, n);
  d.weight = Matrix::Identity(n, n);
  d.monotonicity_margin = 1.0;
  return d;
}

Vector dilate(const Dilation& d, double s, const Vector& x) {
  require_finite(x, "dilate");
  return expm(d.generator, s) * x;
}

namespace {

constexpr double kTinyNorm = 1e-300;
constexpr double kNormSolveTol = 1e-12;

// Core root solve on fixed-size (stack) or dynamic matrices. s ->
// ||d(-s)x|| is strictly decreasing; bracket the unit crossing by doubling
// away from ln||x||, then run Newton with the bracket as safeguard: an
// iterate that leaves the bracket is replaced by its midpoint, so the worst
// case is plain bisection while the typical case converges in a few steps.
template <typename Mat, typename Vec>
HomNormFull solve_norm(const Mat& gen, const Mat& weight, const Mat& pg, const Vec& x,
                       double wn) {
  HomNormFull full;
  HomNormResult& result = full.result;
  Vec y;
  double norm = 0.0;
  const auto eval = [&](double at) {
    y.noalias() = detail::expm_core<Mat>(-at * gen) * x;
    norm = std::sqrt(std::max(0.0, y.dot(weight * y)));
    ++result.iterations;
  };

  double s = std::log(wn);
  eval(s);
  double lo, hi;
  if (norm >= 1.0) {
    lo = s;
    double step = 1.0;
    hi = s + step;
    eval(hi);
    s = hi;
    while (norm > 1.0) {
      lo = hi;
      step *= 2.0;
      hi += step;
      eval(hi);
      s = hi;
      if (result.iterations > 200) {
        throw std::runtime_error("canonical_norm: bracketing failed");
      }
    }
  } else {
    hi = s;
    double step = 1.0;
    lo = s - step;
    eval(lo);
    s = lo;
    while (norm < 1.0) {
      hi = lo;
      step *= 2.0;
      lo -= step;
      eval(lo);
      s = lo;
      if (result.iterations > 200) {
        throw std::runtime_error("canonical_norm: bracketing failed");
      }
    }
  }

  for (int k = 0; k < 200; ++k) {
    const double g = norm - 1.0;
    if (g >= 0.0) {
      lo = std::max(lo, s);
    } else {
      hi = std::min(hi, s);
    }
    const double slope = -y.dot(pg * y) / norm;
    double next = s - g / slope;
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    const double move = std::abs(next - s);
    s = next;
    eval(s);
    if (move <= kNormSolveTol) break;
  }

  result.s_x = s;
  result.value = std::exp(s);
  full.unit = y;
  return full;
}

}  // namespace

HomNormFull canonical_norm_full(const Dilation& d, const Vector& x) {
  if (d.monotonicity_margin <= 0.0) {
    throw std::invalid_argument("canonical_norm: dilation is not strictly monotone");
  }
  require_finite(x, "canonical_norm");
  const double wn = d.weighted_norm(x);
  if (wn < kTinyNorm) {
    HomNormFull full;
    full.result.value = 0.0;
    full.result.s_x = -std::numeric_limits<double>::infinity();
    full.unit = Vector::Zero(x.size());
    return full;
  }
  const Matrix pg = sym(d.weight * d.generator);
  switch (d.dim()) {
    case 2:
      return solve_norm<Eigen::Matrix2d, Eigen::Vector2d>(d.generator, d.weight, pg, x, wn);
    case 3:
      return solve_norm<Eigen::Matrix3d, Eigen::Vector3d>(d.generator, d.weight, pg, x, wn);
    case 4:
      return solve_norm<Eigen::Matrix4d, Eigen::Vector4d>(d.generator, d.weight, pg, x, wn);
    default:
      return solve_norm<Matrix, Vector>(d.generator, d.weight, pg, x, wn);
  }
}

HomNormResult canonical_norm(const Dilation& d, const Vector& x) {
  return canonical_norm_full(d, x).result;
}

RowVector canonical_norm_gradient(const Dilation& d, const Vector& x) {
  const double wn = d.weighted_norm(x);
  if (wn < kTinyNorm) {
    throw std::invalid_argument("canonical_norm_gradient: undefined at the origin");
  }
  const HomNormResult hn = canonical_norm(d, x);
  const Matrix back = expm(d.generator, -hn.s_x);
  const Vector y = back * x;
  const double denom = y.dot(d.weight * d.generator * y);
  return hn.value * (y.transpose() * d.weight * back) / denom;
}

Vector psi(const Dilation& d, const Vector& x) {
  const double wn = d.weighted_norm(x);
  if (wn < kTinyNorm) return Vector::Zero(x.size());
  const HomNormFull full = canonical_norm_full(d, x);
  return full.result.value * full.unit;
}

Vector psi_inverse(const Dilation& d, const Vector& z) {
  const double wn = d.weighted_norm(z);
  if (wn < kTinyNorm) return Vector::Zero(z.size());
  return expm(d.generator, std::log(wn)) * z / wn;
}

Vector hom_add(const Dilation& d, const Vector& x, const Vector& y) {
  return psi_inverse(d, psi(d, x) + psi(d, y));
}

HomogeneityReport check_field_homogeneity(const FieldFn& field, const Dilation& d,
                                          double degree, int sample_count,
                                          std::uint64_t seed) {
  HomogeneityReport report;
  const auto points = detail::weighted_sphere_samples(d.weight, sample_count, seed);
  constexpr int kGrid = 17;
  for (const auto& x : points) {
    const Vector gx = field(x);
    const double denom = 1.0 + d.weighted_norm(gx);
    for (int k = 0; k < kGrid; ++k) {
      const double s = -2.0 + 4.0 * k / (kGrid - 1);
      const Matrix ds = expm(d.generator, s);
      const Vector lhs = field(ds * x);
      const Vector rhs = std::exp(degree * s) * (ds * gx);
      const double residual = d.weighted_norm(lhs - rhs) / denom;
      ++report.samples;
      if (residual > report.max_residual) {
        report.max_residual = residual;
        report.worst_point = x;
        report.worst_scale = s;
      }
    }
  }
  report.pass = report.max_residual <= 1e-8;
  return report;
}

}  // namespace homctl
