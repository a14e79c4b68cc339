#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "homctl/numerics.hpp"
#include "homctl/reference_system.hpp"

using namespace homctl;

namespace {

// Brute-force oracle: plain series summation until terms vanish, no scaling.
Matrix expm_series_oracle(const Matrix& m, double s) {
  const Eigen::Index n = m.rows();
  Matrix sum = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k < 200; ++k) {
    term = (term * (s * m)) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18 * sum.cwiseAbs().maxCoeff()) break;
  }
  return sum;
}

Matrix random_matrix(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = scale * u(rng);
  }
  return m;
}

}  // namespace

TEST_CASE("expm at s = 0 is the identity") {
  std::mt19937_64 rng(7);
  const Matrix m = random_matrix(rng, 4, 2.0);
  CHECK((expm(m, 0.0) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("expm of a diagonal matrix") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  const Matrix e = expm(d, 1.0);
  CHECK(e(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
  CHECK(e(1, 1) == doctest::Approx(std::exp(2.0)).epsilon(1e-13));
  CHECK(std::abs(e(0, 1)) < 1e-15);
  CHECK(std::abs(e(1, 0)) < 1e-15);
}

TEST_CASE("expm of the reference homogenizer has the rank-one closed form") {
  // G0^2 = -G0, so e^{s G0} = I + (1 - e^{-s}) G0.
  const Matrix g0 = refsys::homogenizer_G0();
  REQUIRE((g0 * g0 + g0).cwiseAbs().maxCoeff() < 1e-15);
  for (double s : {-2.0, -0.5, 1.0, 3.0}) {
    const Matrix closed = Matrix::Identity(3, 3) + (1.0 - std::exp(-s)) * g0;
    CHECK((expm(g0, s) - closed).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((expm(g0, s) - expm_series_oracle(g0, s)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("expm semigroup property on random matrices") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> us(-3.0, 3.0);
  for (int trial = 0; trial < 25; ++trial) {
    const Matrix m = random_matrix(rng, 3, 2.0 / 3.0);
    const double s = us(rng);
    const double t = us(rng);
    const Matrix lhs = expm(m, s) * expm(m, t);
    const Matrix rhs = expm(m, s + t);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("expm rejects bad input") {
  CHECK_THROWS_AS(expm(Matrix::Zero(2, 3), 1.0), std::invalid_argument);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(expm(bad, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(expm(Matrix::Identity(2, 2), std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
}

TEST_CASE("eigen_real_parts on a diagonal matrix") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = -1.0;
  d(1, 1) = 2.0;
  auto parts = eigen_real_parts(d);
  std::sort(parts.begin(), parts.end());
  CHECK(parts[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(parts[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("eigen_real_parts of the reference dilation generator") {
  // G0 has eigenvalues {-1, 0, 0}, so I - 0.75 G0 has {1.75, 1, 1}.
  const Matrix gd = Matrix::Identity(3, 3) - 0.75 * refsys::homogenizer_G0();
  auto parts = eigen_real_parts(gd);
  std::sort(parts.begin(), parts.end());
  CHECK(std::abs(parts[0] - 1.0) < 1e-9);
  CHECK(std::abs(parts[1] - 1.0) < 1e-9);
  CHECK(std::abs(parts[2] - 1.75) < 1e-9);
  CHECK(is_anti_hurwitz(gd));
}

TEST_CASE("reference closed loop is Hurwitz") {
  const LinearPlant plant = refsys::plant();
  const Matrix acl = plant.A + plant.B * refsys::gain_K();
  CHECK(max_eigen_real_part(acl) < 0.0);
  CHECK(is_hurwitz(acl));
}

TEST_CASE("eigen_real_parts matches known spectra beyond the polynomial path") {
  // Block-diagonal construction with known eigenvalues, pushed through a
  // similarity so the matrix is dense; n = 6 exercises the QR branch.
  Matrix d = Matrix::Zero(6, 6);
  d(0, 0) = -3.0;
  d(1, 1) = 2.5;
  d.block(2, 2, 2, 2) << 1.0, -2.0, 2.0, 1.0;    // 1 +/- 2i
  d.block(4, 4, 2, 2) << -0.5, 4.0, -1.0, -0.5;  // -0.5 +/- 2i
  std::mt19937_64 rng(3);
  Matrix t = random_matrix(rng, 6, 1.0) + 3.0 * Matrix::Identity(6, 6);
  const Matrix m = t * d * t.inverse();
  auto parts = eigen_real_parts(m);
  std::sort(parts.begin(), parts.end());
  const std::vector<double> expected = {-3.0, -0.5, -0.5, 1.0, 1.0, 2.5};
  REQUIRE(parts.size() == expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    CHECK(std::abs(parts[k] - expected[k]) < 1e-8);
  }
}

TEST_CASE("eigen_real_parts agrees with the symmetric solver on random symmetric input") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix raw = random_matrix(rng, 5, 1.0);
    const Matrix m = sym(raw);
    Eigen::SelfAdjointEigenSolver<Matrix> oracle(m);
    auto parts = eigen_real_parts(m);
    std::sort(parts.begin(), parts.end());
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
      CHECK(std::abs(parts[static_cast<std::size_t>(k)] - oracle.eigenvalues()(k)) < 1e-9);
    }
  }
}

TEST_CASE("solve_lyapunov closed forms") {
  const Matrix minus_eye = -Matrix::Identity(3, 3);
  CHECK((solve_lyapunov(minus_eye, 2.0 * Matrix::Identity(3, 3)) - Matrix::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = -1.0;
  a(1, 1) = -2.0;
  const Matrix p = solve_lyapunov(a, Matrix::Identity(2, 2));
  CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p(1, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::abs(p(0, 1)) < 1e-12);
}

TEST_CASE("solve_lyapunov residual on the reference closed loop") {
  const LinearPlant plant = refsys::plant();
  const Matrix acl = plant.A + plant.B * refsys::gain_K();
  const Matrix q = Matrix::Identity(3, 3);
  const Matrix p = solve_lyapunov(acl, q);
  CHECK((acl.transpose() * p + p * acl + q).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(min_sym_eigenvalue(p) > 0.0);
}

TEST_CASE("solve_lyapunov output is SPD for random Hurwitz matrices") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = random_matrix(rng, 4, 1.0);
    a -= (max_eigen_real_part(a) + 0.5) * Matrix::Identity(4, 4);
    const Matrix p = solve_lyapunov(a, Matrix::Identity(4, 4));
    CHECK(min_sym_eigenvalue(p) > 0.0);
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("solve_lyapunov rejects non-Hurwitz input") {
  CHECK_THROWS_AS(solve_lyapunov(Matrix::Identity(2, 2), Matrix::Identity(2, 2)),
                  std::runtime_error);
}
