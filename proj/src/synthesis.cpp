#include "homctl/synthesis.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace homctl {

namespace {

double operator_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().maxCoeff();
}

Matrix inverse_of(const Matrix& h) {
  Eigen::FullPivLU<Matrix> lu(h);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("synthesis: singular constraint matrix");
  }
  return lu.inverse();
}

// Kronecker product, column-major vec convention: vec(AXB) = (B^T (x) A) vec(X).
Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector vec(const Matrix& m) {
  Vector v(m.size());
  Eigen::Index at = 0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    v.segment(at, m.rows()) = m.col(j);
    at += m.rows();
  }
  return v;
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    m.col(j) = v.segment(j * rows, rows);
  }
  return m;
}

// Cost of the alternating design, evaluated on the cone-transformed closed
// loop: J = max_j ell^T H (A + BK) H^-1 e_j. With the Metzler constraint and
// diagonal floor -rho this is bounded below by -rho, and J < 0 with ell > 0
// certifies that the (Metzler) transformed matrix is Hurwitz.
double bilinear_cost(const Vector& ell, const Matrix& cone_acl) {
  return (cone_acl.transpose() * ell).maxCoeff();
}

// Stacked operator of the homogenizer equations in [vec(G0); vec(Y0)].
struct HomogenizerSystem {
  Matrix op;
  Vector rhs;
  int n = 0, m = 0;

  Matrix g0_of(const Vector& x) const { return unvec(x.head(n * n), n, n); }
  Matrix y0_of(const Vector& x) const { return unvec(x.tail(m * n), m, n); }
};

HomogenizerSystem homogenizer_system(const LinearPlant& plant) {
  const int n = plant.dim();
  const int m = plant.inputs();
  const Matrix eye = Matrix::Identity(n, n);
  HomogenizerSystem sys;
  sys.n = n;
  sys.m = m;
  // A G0 - G0 A + B Y0 = A    and    G0 B = 0.
  Matrix top(n * n, n * n + n * m);
  top.leftCols(n * n) = kron(eye, plant.A) - kron(plant.A.transpose(), eye);
  top.rightCols(n * m) = kron(eye, plant.B);
  Matrix bottom(n * m, n * n + n * m);
  bottom.setZero();
  bottom.leftCols(n * n) = kron(plant.B.transpose(), eye);
  sys.op.resize(n * n + n * m, n * n + n * m);
  sys.op.topRows(n * n) = top;
  sys.op.bottomRows(n * m) = bottom;
  sys.rhs.resize(n * n + n * m);
  sys.rhs.head(n * n) = vec(plant.A);
  sys.rhs.tail(n * m).setZero();
  return sys;
}

double min_relative_singular_value(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const double smax = svd.singularValues().maxCoeff();
  if (smax == 0.0) return 0.0;
  return svd.singularValues().minCoeff() / smax;
}

Homogenization assemble_homogenization(const HomogenizerSystem& sys, Vector x,
                                       const Matrix& null_space, std::uint64_t seed,
                                       const LinearPlant& plant) {
  // (G0 - I) must be invertible for the homogenizing gain; nudge inside the
  // solution subspace until it is well conditioned.
  std::mt19937_64 rng(seed + 17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = sys.n;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Matrix g0 = sys.g0_of(x);
    if (min_relative_singular_value(g0 - Matrix::Identity(n, n)) > 1e-8) break;
    if (null_space.cols() == 0) {
      throw std::runtime_error(
          "solve_homogenization: (G0 - I) singular and the solution is unique");
    }
    Vector w(null_space.cols());
    for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = gauss(rng);
    x += 0.1 * (1.0 + x.norm()) / std::max(1e-12, (null_space * w).norm()) * (null_space * w);
  }
  Homogenization hom;
  hom.G0 = sys.g0_of(x);
  hom.Y0 = sys.y0_of(x);
  const Matrix shifted = hom.G0 - Matrix::Identity(n, n);
  if (min_relative_singular_value(shifted) <= 1e-8) {
    throw std::runtime_error("solve_homogenization: could not make (G0 - I) invertible");
  }
  hom.K0 = hom.Y0 * shifted.inverse();
  const double scale = 1.0 + plant.A.cwiseAbs().maxCoeff();
  hom.residual = (sys.op * x - sys.rhs).cwiseAbs().maxCoeff();
  if (hom.residual > 1e-9 * scale) {
    throw std::runtime_error("solve_homogenization: inconsistent system, residual " +
                             std::to_string(hom.residual));
  }
  return hom;
}

Matrix solution_null_space(const Matrix& op) {
  Eigen::JacobiSVD<Matrix> svd(op, Eigen::ComputeFullV);
  const double smax = svd.singularValues().maxCoeff();
  int rank = 0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    if (svd.singularValues()(k) > 1e-10 * smax) ++rank;
  }
  return svd.matrixV().rightCols(svd.matrixV().cols() - rank);
}

}  // namespace

LinearSynthesisResult synth_linear(const LinearPlant& plant, const ConeSpec& cone, double rho,
                                   int max_iters, double gain_box) {
  validate_plant(plant);
  if (cone.constraints() != cone.dim() || cone.dim() != plant.dim()) {
    throw std::invalid_argument("synth_linear: cone must be square and match the plant");
  }
  if (!(rho > 0.0)) {
    throw std::invalid_argument("synth_linear: rho must be positive");
  }
  const Matrix hinv = inverse_of(cone.H);
  const int n = plant.dim();
  const int m = plant.inputs();
  const int nk = m * n;
  const Matrix hb = cone.H * plant.B;
  const Matrix ha = cone.H * plant.A * hinv;
  const double inf = std::numeric_limits<double>::infinity();

  LinearSynthesisResult result;
  result.ell = Vector::Ones(n);
  result.K = Matrix::Zero(m, n);
  result.cost = inf;

  const auto gain_step = [&](const Vector& ell) -> LpResult {
    // Variables [K(0,0..n-1), K(1,*), ..., t]; K stored row-major here.
    LpProblem lp;
    const int nv = nk + 1;
    const int rows = n + n + n * (n - 1);
    lp.objective = Vector::Zero(nv);
    lp.objective(nk) = 1.0;
    lp.ineq_lhs = Matrix::Zero(rows, nv);
    lp.ineq_rhs = Vector::Zero(rows);
    const Vector hb_ell = hb.transpose() * ell;        // B^T H^T ell
    const Vector ha_ell = ha.transpose() * ell;        // (H A H^-1)^T ell
    int row = 0;
    for (int j = 0; j < n; ++j, ++row) {  // ell^T H (A + BK) H^-1 e_j <= t
      for (int p = 0; p < m; ++p) {
        for (int q = 0; q < n; ++q) {
          lp.ineq_lhs(row, p * n + q) = hb_ell(p) * hinv(q, j);
        }
      }
      lp.ineq_lhs(row, nk) = -1.0;
      lp.ineq_rhs(row) = -ha_ell(j);
    }
    for (int i = 0; i < n; ++i, ++row) {  // diagonal of H(A+BK)H^-1 >= -rho
      for (int p = 0; p < m; ++p) {
        for (int q = 0; q < n; ++q) {
          lp.ineq_lhs(row, p * n + q) = -hb(i, p) * hinv(q, i);
        }
      }
      lp.ineq_rhs(row) = rho + ha(i, i);
    }
    for (int i = 0; i < n; ++i) {  // off-diagonal of H(A+BK)H^-1 >= 0
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        for (int p = 0; p < m; ++p) {
          for (int q = 0; q < n; ++q) {
            lp.ineq_lhs(row, p * n + q) = -hb(i, p) * hinv(q, j);
          }
        }
        lp.ineq_rhs(row) = ha(i, j);
        ++row;
      }
    }
    lp.lower = Vector::Constant(nv, -gain_box);
    lp.upper = Vector::Constant(nv, gain_box);
    lp.lower(nk) = -1e6;
    lp.upper(nk) = 1e6;
    return lp_solve(lp);
  };

  const auto weight_step = [&](const Matrix& k) -> LpResult {
    LpProblem lp;
    const int nv = n + 1;
    lp.objective = Vector::Zero(nv);
    lp.objective(n) = 1.0;
    lp.ineq_lhs = Matrix::Zero(n, nv);
    lp.ineq_rhs = Vector::Zero(n);
    const Matrix cone_acl = cone.H * (plant.A + plant.B * k) * hinv;
    for (int j = 0; j < n; ++j) {
      lp.ineq_lhs.row(j).head(n) = cone_acl.col(j).transpose();
      lp.ineq_lhs(j, n) = -1.0;
    }
    lp.lower = Vector::Constant(nv, 1e-6);
    lp.upper = Vector::Constant(nv, 1.0);
    lp.lower(n) = -1e6;
    lp.upper(n) = 1e6;
    return lp_solve(lp);
  };

  double previous = inf;
  for (int iter = 0; iter < max_iters; ++iter) {
    result.iterations = iter + 1;
    const LpResult gain = gain_step(result.ell);
    if (gain.status != LpStatus::optimal) {
      result.status = LinearSynthesisResult::Status::infeasible;
      return result;
    }
    for (int p = 0; p < m; ++p) {
      result.K.row(p) = gain.solution.segment(p * n, n).transpose();
    }
    const LpResult weight = weight_step(result.K);
    if (weight.status != LpStatus::optimal) {
      result.status = LinearSynthesisResult::Status::infeasible;
      return result;
    }
    result.ell = weight.solution.head(n);
    result.cost =
        bilinear_cost(result.ell, cone.H * (plant.A + plant.B * result.K) * hinv);
    if (std::abs(previous - result.cost) < 1e-10) break;
    previous = result.cost;
  }

  const Matrix acl = plant.A + plant.B * result.K;
  result.metzler = is_metzler(cone.H * acl * hinv, 1e-9);
  result.hurwitz = is_hurwitz(acl);
  result.status = (result.cost < 0.0 && result.metzler && result.hurwitz)
                      ? LinearSynthesisResult::Status::ok
                      : LinearSynthesisResult::Status::stalled;
  return result;
}

Homogenization solve_homogenization(const LinearPlant& plant, std::uint64_t seed) {
  validate_plant(plant);
  if (!plant.controllable()) {
    throw std::invalid_argument("solve_homogenization: plant is not controllable");
  }
  const HomogenizerSystem sys = homogenizer_system(plant);
  const Vector x = sys.op.completeOrthogonalDecomposition().solve(sys.rhs);
  return assemble_homogenization(sys, x, solution_null_space(sys.op), seed, plant);
}

Homogenization refine_homogenization(const LinearPlant& plant, const ConeSpec& cone,
                                     const Matrix& K, std::uint64_t seed) {
  validate_plant(plant);
  const HomogenizerSystem sys = homogenizer_system(plant);
  const Vector particular = sys.op.completeOrthogonalDecomposition().solve(sys.rhs);
  const Matrix null_space = solution_null_space(sys.op);
  const int q = static_cast<int>(null_space.cols());
  if (q == 0) {
    return assemble_homogenization(sys, particular, null_space, seed, plant);
  }

  const Matrix hinv = inverse_of(cone.H);
  const int n = plant.dim();
  const Matrix acl_cone = cone.H * (plant.A + plant.B * K) * hinv;
  const Matrix g_base = cone.H * sys.g0_of(particular) * hinv;
  std::vector<Matrix> g_dirs;
  g_dirs.reserve(static_cast<std::size_t>(q));
  for (int l = 0; l < q; ++l) {
    g_dirs.push_back(cone.H * sys.g0_of(null_space.col(l)) * hinv);
  }

  // minimize t over the solution subspace subject to g_ij(w) <= t a_ij off
  // the diagonal; small t widens the admissible degree interval.
  LpProblem lp;
  const int nv = q + 1;
  const int rows = n * (n - 1);
  lp.objective = Vector::Zero(nv);
  lp.objective(q) = 1.0;
  lp.ineq_lhs = Matrix::Zero(rows, nv);
  lp.ineq_rhs = Vector::Zero(rows);
  int row = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int l = 0; l < q; ++l) {
        lp.ineq_lhs(row, l) = g_dirs[static_cast<std::size_t>(l)](i, j);
      }
      lp.ineq_lhs(row, q) = -std::max(acl_cone(i, j), 0.0);
      lp.ineq_rhs(row) = -g_base(i, j);
      ++row;
    }
  }
  lp.lower = Vector::Constant(nv, -50.0);
  lp.upper = Vector::Constant(nv, 50.0);
  lp.lower(q) = -100.0;
  lp.upper(q) = 100.0;
  const LpResult sol = lp_solve(lp);
  Vector x = particular;
  if (sol.status == LpStatus::optimal) {
    x += null_space * sol.solution.head(q);
    // Blend back toward the particular solution if the optimum leaves
    // (G0 - I) ill conditioned; the solution set is affine, so blends stay in.
    for (double theta = 1.0; theta > 1e-4; theta *= 0.5) {
      const Vector blend = theta * x + (1.0 - theta) * particular;
      if (min_relative_singular_value(sys.g0_of(blend) - Matrix::Identity(n, n)) > 1e-8) {
        x = blend;
        break;
      }
    }
  }
  return assemble_homogenization(sys, x, null_space, seed, plant);
}

OffsetRange metzler_offset_range(const ConeSpec& cone, const Matrix& K, const Matrix& G0,
                                 const LinearPlant& plant) {
  const Matrix hinv = inverse_of(cone.H);
  const Matrix a = cone.H * (plant.A + plant.B * K) * hinv;
  const Matrix g = cone.H * G0 * hinv;
  constexpr double kTol = 1e-12;
  OffsetRange range;
  range.feasible = true;
  range.tau_min = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i == j || g(i, j) <= kTol) continue;
      if (a(i, j) <= kTol) {
        range.feasible = false;
        range.violation = "entry (" + std::to_string(i) + "," + std::to_string(j) +
                          "): offset " + std::to_string(g(i, j)) +
                          " has no Metzler slack";
        return range;
      }
      range.tau_min = std::max(range.tau_min, g(i, j) / a(i, j));
    }
  }
  range.mu_lower = range.tau_min > 0.0 ? std::max(-1.0, -1.0 / range.tau_min) : -1.0;
  return range;
}

namespace {

struct LmiMargins {
  double decay;     // -lambda_max(sym(P Acl)), scaled
  double monotone;  // lambda_min(sym(P Gd)), scaled
  double definite;  // lambda_min(P)
  double worst() const { return std::min({decay, monotone, definite}); }
};

LmiMargins lmi_margins(const Matrix& p, const Matrix& acl, const Matrix& gd, double s_a,
                       double s_g) {
  return {-max_sym_eigenvalue(p * acl) / s_a, min_sym_eigenvalue(p * gd) / s_g,
          min_sym_eigenvalue(p)};
}

bool lmi_feasible(const Matrix& p, const Matrix& acl, const Matrix& gd) {
  const double delta = 1e-6 * operator_norm(p);
  return max_sym_eigenvalue(p * acl) <= -delta && min_sym_eigenvalue(p * gd) >= delta &&
         min_sym_eigenvalue(p) >= delta;
}

}  // namespace

Matrix solve_lmi_weight(const LinearPlant& plant, const Matrix& K, const Matrix& Gd,
                        const ConeSpec* cone, int max_iters) {
  const Matrix acl = plant.A + plant.B * K;
  if (!is_hurwitz(acl)) {
    throw std::invalid_argument("solve_lmi_weight: A + BK is not Hurwitz");
  }
  if (!is_anti_hurwitz(Gd)) {
    throw std::invalid_argument("solve_lmi_weight: generator is not anti-Hurwitz");
  }
  const int n = plant.dim();
  const double s_a = operator_norm(acl);
  const double s_g = operator_norm(Gd);
  const auto normalized = [&](Matrix p) {
    p = sym(p);
    return Matrix(p * (static_cast<double>(n) / p.trace()));
  };

  std::vector<Matrix> qs;
  qs.push_back(Matrix::Identity(n, n));
  if (cone != nullptr) {
    Matrix hth = sym(cone->H.transpose() * cone->H);
    hth *= static_cast<double>(n) / hth.trace();
    qs.push_back(hth);
    qs.push_back(normalized(0.5 * (Matrix::Identity(n, n) + hth)));
  }

  std::vector<Matrix> candidates;
  for (const Matrix& q : qs) {
    candidates.push_back(normalized(solve_lyapunov(acl, q)));
    candidates.push_back(normalized(solve_lyapunov(-Gd, q)));  // sym(P Gd) = Q > 0
  }

  Matrix best = candidates.front();
  double best_margin = -std::numeric_limits<double>::infinity();
  const auto consider = [&](const Matrix& p) {
    const double w = lmi_margins(p, acl, Gd, s_a, s_g).worst();
    if (w > best_margin) {
      best_margin = w;
      best = p;
    }
  };
  for (const Matrix& p : candidates) consider(p);
  // Both constraint families are concave in P, so the worst margin is concave
  // along any segment; golden-section each candidate pair.
  constexpr double kGolden = 0.6180339887498949;
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    for (std::size_t b = a + 1; b < candidates.size(); ++b) {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 40; ++it) {
        const double t1 = hi - kGolden * (hi - lo);
        const double t2 = lo + kGolden * (hi - lo);
        const Matrix p1 = normalized(t1 * candidates[a] + (1.0 - t1) * candidates[b]);
        const Matrix p2 = normalized(t2 * candidates[a] + (1.0 - t2) * candidates[b]);
        const double w1 = lmi_margins(p1, acl, Gd, s_a, s_g).worst();
        const double w2 = lmi_margins(p2, acl, Gd, s_a, s_g).worst();
        consider(p1);
        consider(p2);
        if (w1 >= w2) {
          hi = t2;
        } else {
          lo = t1;
        }
      }
    }
  }
  if (lmi_feasible(best, acl, Gd)) return best;

  // Projected subgradient ascent on the worst scaled eigenvalue margin.
  Matrix p = best;
  for (int k = 0; k < max_iters; ++k) {
    const LmiMargins m = lmi_margins(p, acl, Gd, s_a, s_g);
    Matrix grad;
    Eigen::SelfAdjointEigenSolver<Matrix> es;
    if (m.worst() == m.definite) {
      es.compute(sym(p));
      const Vector u = es.eigenvectors().col(0);
      grad = u * u.transpose();
    } else if (m.worst() == m.monotone) {
      es.compute(sym(p * Gd));
      const Vector u = es.eigenvectors().col(0);
      const Vector gu = Gd * u;
      grad = 0.5 / s_g * (u * gu.transpose() + gu * u.transpose());
    } else {
      es.compute(sym(p * acl));
      const Vector u = es.eigenvectors().col(es.eigenvectors().cols() - 1);
      const Vector au = acl * u;
      grad = -0.5 / s_a * (u * au.transpose() + au * u.transpose());
    }
    const double step = 0.5 / std::sqrt(1.0 + k) * operator_norm(p) /
                        std::max(1e-12, operator_norm(grad));
    p = normalized(p + step * grad);
    consider(p);
    if (lmi_feasible(best, acl, Gd)) return best;
  }
  throw std::runtime_error(
      "solve_lmi_weight: no feasible weight found; retry with a degree closer to zero");
}

HomogeneousController full_pipeline(const LinearPlant& plant, const ConeSpec& cone, double rho,
                                    double mu, PipelineReport* report, int samples,
                                    std::uint64_t seed) {
  validate_plant(plant);
  validate_cone(cone);
  if (cone.constraints() != cone.dim() || cone.dim() != plant.dim()) {
    throw std::invalid_argument("full_pipeline: cone must be square and match the plant");
  }
  if (!(mu >= -1.0 && mu < 0.0)) {
    throw std::invalid_argument("full_pipeline: degree must lie in [-1, 0)");
  }
  if (!plant.controllable()) {
    throw std::invalid_argument("full_pipeline: plant is not controllable");
  }

  LinearSynthesisResult linear = synth_linear(plant, cone, rho);
  if (linear.status != LinearSynthesisResult::Status::ok) {
    throw std::runtime_error("full_pipeline: linear synthesis failed (cost " +
                             std::to_string(linear.cost) + ")");
  }

  Homogenization hom = solve_homogenization(plant, seed);
  OffsetRange range = metzler_offset_range(cone, linear.K, hom.G0, plant);
  if (!range.feasible || mu < range.mu_lower) {
    hom = refine_homogenization(plant, cone, linear.K, seed);
    range = metzler_offset_range(cone, linear.K, hom.G0, plant);
  }
  if (!range.feasible) {
    throw std::runtime_error("full_pipeline: Metzler offset infeasible: " + range.violation);
  }
  if (mu < range.mu_lower) {
    throw std::runtime_error("full_pipeline: requested degree " + std::to_string(mu) +
                             " outside the admissible interval [" +
                             std::to_string(range.mu_lower) + ", 0)");
  }

  const int n = plant.dim();
  const Matrix gd = Matrix::Identity(n, n) + mu * hom.G0;
  const Matrix weight = solve_lmi_weight(plant, linear.K, gd, &cone);

  HomogeneousController ctrl;
  ctrl.plant = plant;
  ctrl.K = linear.K;
  ctrl.K0 = hom.K0;
  ctrl.G0 = hom.G0;
  ctrl.Y0 = hom.Y0;
  ctrl.mu = mu;
  ctrl.dilation = make_dilation(gd, weight);
  ctrl.tau_min = range.tau_min;
  ctrl.mu_lower = range.mu_lower;

  if (report != nullptr) {
    report->linear = linear;
    report->homogenization = hom;
    report->offset_range = range;
    const FieldFn loop = [&ctrl](const Vector& x) {
      return Vector(ctrl.plant.A * x + ctrl.plant.B * eval_control(ctrl, x));
    };
    report->invariance = invariance_margin(loop, ctrl.dilation, cone, samples, seed);
    report->homogeneity = check_field_homogeneity(loop, ctrl.dilation, mu, 32, seed);
    // A strictly positive offset with strictly negative image under the cone
    // matrix exists because that matrix is Metzler and Hurwitz; find one by LP.
    LpProblem lp;
    lp.objective = Vector::Zero(n + 1);
    lp.objective(n) = -1.0;
    const Matrix hinv = inverse_of(cone.H);
    const Matrix acl_cone = cone.H * (plant.A + plant.B * linear.K) * hinv;
    lp.ineq_lhs = Matrix::Zero(n, n + 1);
    lp.ineq_lhs.leftCols(n) = acl_cone;
    lp.ineq_lhs.col(n).setOnes();
    lp.ineq_rhs = Vector::Zero(n);
    lp.lower = Vector::Constant(n + 1, 1e-3);
    lp.upper = Vector::Constant(n + 1, 1.0);
    lp.lower(n) = 0.0;
    lp.upper(n) = 1e3;
    const LpResult r_lp = lp_solve(lp);
    if (r_lp.status == LpStatus::optimal && -r_lp.objective > 0.0) {
      report->issf = issf_check(ctrl, cone, r_lp.solution.head(n), samples, seed);
      report->issf_ran = true;
    }
  }
  return ctrl;
}

}  // namespace homctl
