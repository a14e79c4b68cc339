#include "homctl/cone.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <set>
#include <stdexcept>

#include "homctl/lp.hpp"
#include "sampling.hpp"

namespace homctl {

namespace {

constexpr double kActiveTol = 1e-12;

Matrix inverse_or_throw(const Matrix& h, const char* what) {
  Eigen::FullPivLU<Matrix> lu(h);
  if (!lu.isInvertible()) {
    throw std::invalid_argument(std::string(what) + ": singular constraint matrix");
  }
  return lu.inverse();
}

// Orthonormal basis of the orthogonal complement of the given columns.
Matrix null_basis(const Matrix& columns) {
  const Eigen::Index n = columns.rows();
  Eigen::HouseholderQR<Matrix> qr(columns);
  const Matrix q = qr.householderQ();
  Eigen::ColPivHouseholderQR<Matrix> rank_probe(columns);
  rank_probe.setThreshold(1e-12);
  const Eigen::Index rank = rank_probe.rank();
  return q.rightCols(n - rank);
}

std::string point_key(const Vector& z) {
  std::string key;
  key.reserve(static_cast<std::size_t>(z.size()) * 12);
  char buf[24];
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    const double q = std::round(z(k) * 1e9) / 1e9;
    std::snprintf(buf, sizeof(buf), "%.9f|", q + 0.0);  // +0.0 folds -0 into 0
    key += buf;
  }
  return key;
}

bool feasible_direction(const ConeSpec& cone, int i, const Vector& z, double scale) {
  for (int j = 0; j < cone.constraints(); ++j) {
    if (j == i) continue;
    if (cone.H.row(j).dot(z) < -kActiveTol * scale) return false;
  }
  return true;
}

struct MarginAccumulator {
  // Exceptions cannot cross the parallel scan; failures are flagged and
  // rethrown after the reduction.
  std::atomic<bool> failed{false};
  std::string message;
  std::mutex guard;

  void fail(const char* msg) {
    if (!failed.exchange(true)) {
      std::lock_guard<std::mutex> lock(guard);
      message = msg;
    }
  }
};

}  // namespace

void validate_cone(const ConeSpec& cone, double* condition_number) {
  if (cone.H.rows() < 1 || cone.H.cols() < 1) {
    throw std::invalid_argument("cone: empty constraint matrix");
  }
  require_finite(cone.H, "cone");
  for (int i = 0; i < cone.constraints(); ++i) {
    if (cone.H.row(i).norm() < 1e-14) {
      throw std::invalid_argument("cone: zero constraint row");
    }
  }
  if (cone.constraints() == cone.dim()) {
    Eigen::JacobiSVD<Matrix> svd(cone.H);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin < 1e-12 * smax) {
      throw std::invalid_argument("cone: square constraint matrix is singular");
    }
    if (condition_number != nullptr) *condition_number = smax / smin;
  } else if (condition_number != nullptr) {
    *condition_number = std::numeric_limits<double>::quiet_NaN();
  }
}

Vector barrier_values(const ConeSpec& cone, const Dilation& d, const Vector& x) {
  return cone.H * psi(d, x);
}

bool contains(const ConeSpec& cone, const Dilation& d, const Vector& x, double tol) {
  return barrier_values(cone, d, x).minCoeff() >= -tol;
}

bool is_metzler(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("is_metzler: matrix must be square");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i != j && m(i, j) < -tol) return false;
    }
  }
  return true;
}

XiSamples sample_xi(const ConeSpec& cone, const Dilation& d, int i, const Vector& offset,
                    int count, std::uint64_t seed, double radius_window) {
  const int p = cone.constraints();
  const int n = cone.dim();
  if (i < 0 || i >= p) {
    throw std::invalid_argument("sample_xi: constraint index out of range");
  }
  Vector r = offset.size() == 0 ? Vector::Zero(p) : offset;
  if (r.size() != p) {
    throw std::invalid_argument("sample_xi: offset dimension mismatch");
  }
  if (r.minCoeff() < 0.0) {
    throw std::invalid_argument("sample_xi: offset must be componentwise nonnegative");
  }
  const bool affine = r.maxCoeff() > 0.0;
  const Vector hi = cone.H.row(i).transpose();
  const double hi_scale = hi.norm();
  const Matrix basis = null_basis(hi);
  const int free_dims = static_cast<int>(basis.cols());

  XiSamples out;
  std::set<std::string> seen;
  auto push = [&](const Vector& z) {
    if (seen.insert(point_key(z)).second) out.points.push_back(z);
  };

  if (!affine) {
    if (free_dims == 0) {
      out.feasible = false;
      return out;
    }
    const std::uint64_t base_index = detail::seed_offset(seed);
    int attempts = 0;
    const int max_attempts = 60 * count + 200;
    for (int k = 0; static_cast<int>(out.points.size()) < count && attempts < max_attempts;
         ++k, ++attempts) {
      Vector coeffs = detail::halton_gaussian(base_index + static_cast<std::uint64_t>(k),
                                              free_dims);
      Vector w = basis * coeffs;
      const double wn = d.weighted_norm(w);
      if (wn < 1e-12) continue;
      Vector z = w / wn;
      if (feasible_direction(cone, i, z, hi_scale)) {
        push(z);
      } else if (feasible_direction(cone, i, Vector(-z), hi_scale)) {
        push(-z);
      }
    }
    // Edge points where a second constraint is active.
    for (int j = 0; j < p; ++j) {
      if (j == i) continue;
      Matrix pair(n, 2);
      pair.col(0) = hi;
      pair.col(1) = cone.H.row(j).transpose();
      const Matrix edge = null_basis(pair);
      for (int c = 0; c < edge.cols(); ++c) {
        Vector w = edge.col(c);
        const double wn = d.weighted_norm(w);
        if (wn < 1e-12) continue;
        Vector z = w / wn;
        if (feasible_direction(cone, i, z, hi_scale)) push(z);
        if (feasible_direction(cone, i, Vector(-z), hi_scale)) push(-z);
      }
    }
    out.feasible = !out.points.empty();
    return out;
  }

  // Affine slice h_i^T z + r_i = 0, h_j^T z + r_j >= 0, within a norm window.
  const double window =
      radius_window > 0.0 ? radius_window : 100.0 * r.maxCoeff();
  const double lambda_min = min_sym_eigenvalue(d.weight);
  const double euclid_window = window / std::sqrt(lambda_min);

  {
    // Infeasible slices are detected exactly, not by exhausting samples.
    LpProblem probe;
    probe.objective = Vector::Zero(n);
    Matrix lhs(p + 1, n);
    Vector rhs(p + 1);
    lhs.row(0) = cone.H.row(i);
    rhs(0) = -r(i);
    int row = 1;
    for (int j = 0; j < p; ++j) {
      if (j == i) continue;
      lhs.row(row) = -cone.H.row(j);
      rhs(row) = r(j);
      ++row;
    }
    lhs.row(row) = -cone.H.row(i);
    rhs(row) = r(i);
    probe.ineq_lhs = lhs;
    probe.ineq_rhs = rhs;
    probe.lower = Vector::Constant(n, -euclid_window);
    probe.upper = Vector::Constant(n, euclid_window);
    if (lp_solve(probe).status != LpStatus::optimal) {
      out.feasible = false;
      return out;
    }
  }
  out.feasible = true;

  auto push_if_feasible = [&](const Vector& z) {
    if (d.weighted_norm(z) > window) return;
    for (int j = 0; j < p; ++j) {
      if (j == i) continue;
      if (cone.H.row(j).dot(z) + r(j) < -kActiveTol * (1.0 + r(j))) return;
    }
    if (std::abs(cone.H.row(i).dot(z) + r(i)) > 1e-9 * (1.0 + r(i))) return;
    push(z);
  };

  const Vector z0 = -r(i) / hi.squaredNorm() * hi;
  push_if_feasible(z0);
  for (int j = 0; j < p; ++j) {
    if (j == i) continue;
    Matrix pair(2, n);
    pair.row(0) = cone.H.row(i);
    pair.row(1) = cone.H.row(j);
    Vector target(2);
    target << -r(i), -r(j);
    const Vector zp = pair.completeOrthogonalDecomposition().solve(target);
    push_if_feasible(zp);
  }

  const std::uint64_t base_index = detail::seed_offset(seed ^ 0x9e3779b9ULL);
  int attempts = 0;
  const int max_attempts = 60 * count + 200;
  const int radius_base = detail::kPrimes[free_dims + 2 < 12 ? free_dims + 2 : 11];
  for (int k = 0; static_cast<int>(out.points.size()) < count && attempts < max_attempts;
       ++k, ++attempts) {
    const std::uint64_t idx = base_index + static_cast<std::uint64_t>(k);
    Vector coeffs = detail::halton_gaussian(idx, free_dims);
    const double cn = coeffs.norm();
    if (cn < 1e-12) continue;
    const double u = detail::halton(idx, radius_base);
    const double rho = euclid_window * std::pow(u, 1.0 / free_dims);
    push_if_feasible(z0 + basis * (rho / cn * coeffs));
  }
  return out;
}

namespace {

MarginReport scan_constraints(
    const ConeSpec& cone, const Dilation& d, int samples_per_constraint, std::uint64_t seed,
    ExecPolicy policy, const Vector& offset, double radius_window,
    const std::function<double(int, const Vector&, MarginAccumulator&)>& margin_of) {
  const int p = cone.constraints();
  MarginReport report;
  report.per_constraint = Vector::Constant(p, std::numeric_limits<double>::infinity());
  report.witness.assign(static_cast<std::size_t>(p), Vector());
  report.checked.resize(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) report.checked[static_cast<std::size_t>(i)] = i;

  for (int i = 0; i < p; ++i) {
    const XiSamples xs =
        sample_xi(cone, d, i, offset, samples_per_constraint, seed + static_cast<std::uint64_t>(i),
                  radius_window);
    if (!xs.feasible || xs.points.empty()) {
      report.note += "slice " + std::to_string(i) + " empty; ";
      continue;
    }
    MarginAccumulator acc;
    const auto eval = [&](std::size_t k) -> double {
      return margin_of(i, xs.points[k], acc);
    };
    const ScanMin sm = scan_min(xs.points.size(), eval, policy);
    if (acc.failed.load()) {
      throw std::runtime_error(acc.message);
    }
    report.samples_used += static_cast<int>(xs.points.size());
    report.per_constraint(i) = sm.value;
    report.witness[static_cast<std::size_t>(i)] = xs.points[static_cast<std::size_t>(sm.index)];
    if (sm.value < report.worst_margin) {
      report.worst_margin = sm.value;
      report.worst_constraint = i;
      report.worst_witness = report.witness[static_cast<std::size_t>(i)];
    }
  }
  report.pass = report.worst_margin > -report.tolerance;
  return report;
}

}  // namespace

MarginReport invariance_margin(const FieldFn& g, const Dilation& d, const ConeSpec& cone,
                               int samples_per_constraint, std::uint64_t seed,
                               InvarianceRhs form, ExecPolicy policy) {
  if (d.monotonicity_margin <= 0.0) {
    throw std::invalid_argument("invariance_margin: dilation is not strictly monotone");
  }
  const Matrix shift = form == InvarianceRhs::generator
                           ? d.generator
                           : Matrix(d.generator - Matrix::Identity(d.dim(), d.dim()));
  const auto margin_of = [&](int i, const Vector& z, MarginAccumulator& acc) -> double {
    try {
      const Vector gz = g(z);
      const double denom = z.dot(d.weight * d.generator * z);
      if (denom <= 0.0) {
        acc.fail("invariance_margin: z^T P G z <= 0 at a sample");
        return std::numeric_limits<double>::infinity();
      }
      const double ratio = z.dot(d.weight * gz) / denom;
      return cone.H.row(i).dot(gz) - ratio * cone.H.row(i).dot(shift * z);
    } catch (const std::exception&) {
      acc.fail("invariance_margin: field evaluation failed");
      return std::numeric_limits<double>::infinity();
    }
  };
  return scan_constraints(cone, d, samples_per_constraint, seed, policy, Vector(), 0.0,
                          margin_of);
}

Matrix closed_loop_cone_matrix(const HomogeneousController& c, const ConeSpec& cone,
                               const Vector& z) {
  if (cone.constraints() != cone.dim()) {
    throw std::invalid_argument("closed_loop_cone_matrix: constraint matrix must be square");
  }
  const Matrix hinv = inverse_or_throw(cone.H, "closed_loop_cone_matrix");
  const Matrix acl = closed_loop_matrix(c);
  const double denom = z.dot(c.dilation.weight * c.dilation.generator * z);
  if (denom <= 0.0) {
    throw std::runtime_error("closed_loop_cone_matrix: z^T P G z <= 0");
  }
  const double gamma = -z.dot(c.dilation.weight * acl * z) / denom;
  return cone.H * (acl + c.mu * gamma * c.G0) * hinv;
}

MarginReport iss_margin(const PerturbedFieldFn& f, const Dilation& d, const ConeSpec& cone,
                        int samples_per_constraint, const std::vector<Vector>& q_grid,
                        std::uint64_t seed, InvarianceRhs form, ExecPolicy policy) {
  if (q_grid.empty()) {
    throw std::invalid_argument("iss_margin: empty disturbance grid");
  }
  const Matrix shift = form == InvarianceRhs::generator
                           ? d.generator
                           : Matrix(d.generator - Matrix::Identity(d.dim(), d.dim()));
  const auto margin_of = [&](int i, const Vector& z, MarginAccumulator& acc) -> double {
    double worst = std::numeric_limits<double>::infinity();
    try {
      const double denom = z.dot(d.weight * d.generator * z);
      if (denom <= 0.0) {
        acc.fail("iss_margin: z^T P G z <= 0 at a sample");
        return worst;
      }
      const double hsz = cone.H.row(i).dot(shift * z);
      for (const Vector& q : q_grid) {
        const Vector fz = f(z, q);
        const double ratio = z.dot(d.weight * fz) / denom;
        worst = std::min(worst, cone.H.row(i).dot(fz) - ratio * hsz);
      }
    } catch (const std::exception&) {
      acc.fail("iss_margin: field evaluation failed");
    }
    return worst;
  };
  return scan_constraints(cone, d, samples_per_constraint, seed, policy, Vector(), 0.0,
                          margin_of);
}

IssfReport issf_check(const HomogeneousController& c, const ConeSpec& cone, const Vector& r,
                      int samples_per_constraint, std::uint64_t seed, double radius_window,
                      ExecPolicy policy) {
  if (cone.constraints() != cone.dim()) {
    throw std::invalid_argument("issf_check: constraint matrix must be square");
  }
  if (r.size() != cone.constraints() || r.minCoeff() <= 0.0) {
    throw std::invalid_argument("issf_check: offset r must be strictly positive");
  }
  const Matrix hinv = inverse_or_throw(cone.H, "issf_check");
  const Matrix acl = closed_loop_matrix(c);

  IssfReport out;
  out.static_certificate = -(cone.H * acl * hinv) * r;

  const Dilation& d = c.dilation;
  const auto margin_of = [&](int i, const Vector& z, MarginAccumulator& acc) -> double {
    try {
      const Matrix m = closed_loop_cone_matrix(c, cone, z);
      return -(m.row(i).dot(r));
    } catch (const std::exception&) {
      acc.fail("issf_check: cone matrix evaluation failed");
      return std::numeric_limits<double>::infinity();
    }
  };
  out.sampled = scan_constraints(cone, d, samples_per_constraint, seed, policy, r,
                                 radius_window, margin_of);
  if (!out.sampled.note.empty()) {
    throw std::runtime_error("issf_check: " + out.sampled.note);
  }
  return out;
}

EmbeddingReport embedding_check(const ConeSpec& cone, const Dilation& d, const Matrix& G0,
                                int samples, std::uint64_t seed, ExecPolicy policy) {
  EmbeddingReport report;
  if (cone.constraints() != cone.dim()) {
    throw std::invalid_argument("embedding_check: constraint matrix must be square");
  }
  const Matrix hinv = inverse_or_throw(cone.H, "embedding_check");
  const Matrix offset = cone.H * (-G0) * hinv;
  report.offset_metzler = is_metzler(offset, 1e-9);
  if (!report.offset_metzler) {
    return report;
  }

  std::vector<Vector> accepted;
  accepted.reserve(static_cast<std::size_t>(samples));
  const auto ball = detail::weighted_ball_samples(d.weight, samples * 64, seed);
  for (const auto& x : ball) {
    if ((cone.H * x).minCoeff() >= 0.0) {
      accepted.push_back(x);
      if (static_cast<int>(accepted.size()) >= samples) break;
    }
  }
  report.samples = static_cast<int>(accepted.size());

  MarginAccumulator acc;
  const auto eval = [&](std::size_t k) -> double {
    try {
      return barrier_values(cone, d, accepted[k]).minCoeff();
    } catch (const std::exception&) {
      acc.fail("embedding_check: barrier evaluation failed");
      return std::numeric_limits<double>::infinity();
    }
  };
  const ScanMin sm = scan_min(accepted.size(), eval, policy);
  if (acc.failed.load()) {
    throw std::runtime_error(acc.message);
  }
  report.holds = sm.index < 0 || sm.value >= -1e-9;
  if (!report.holds) {
    report.counterexample = accepted[static_cast<std::size_t>(sm.index)];
  }
  return report;
}

}  // namespace homctl
