#include <cmath>
#include <random>

#include "doctest.h"
#include "homctl/dilation.hpp"
#include "homctl/reference_system.hpp"

using namespace homctl;

namespace {

Dilation reference_dilation() {
  const Matrix gd = Matrix::Identity(3, 3) + refsys::degree_mu() * refsys::homogenizer_G0();
  return make_dilation(gd, refsys::lmi_weight_P());
}

// Slow independent root finder for the canonical norm: plain bisection on a
// wide fixed bracket, no Newton, no bracket expansion heuristics.
double bisection_norm_oracle(const Dilation& d, const Vector& x) {
  double lo = -80.0, hi = 80.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double norm = d.weighted_norm(expm(d.generator, -mid) * x);
    (norm >= 1.0 ? lo : hi) = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

Vector random_vector(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector v(n);
  for (int k = 0; k < n; ++k) v(k) = scale * u(rng);
  return v;
}

}  // namespace

TEST_CASE("dilate basics") {
  const Dilation d = reference_dilation();
  std::mt19937_64 rng(2);
  const Vector x = random_vector(rng, 3, 1.0);
  CHECK((dilate(d, 0.0, x) - x).norm() == 0.0);

  const Dilation std3 = standard_dilation(3);
  CHECK((dilate(std3, 0.7, x) - std::exp(0.7) * x).norm() < 1e-12);

  // The first basis vector is fixed by the homogenizer, so it scales plainly.
  Vector e1 = Vector::Zero(3);
  e1(0) = 1.0;
  for (double s : {-1.5, 0.3, 2.0}) {
    CHECK((dilate(d, s, e1) - std::exp(s) * e1).norm() < 1e-12);
  }
}

TEST_CASE("make_dilation validates its invariants") {
  CHECK_THROWS_AS(make_dilation(-Matrix::Identity(2, 2), Matrix::Identity(2, 2)),
                  std::invalid_argument);  // not anti-Hurwitz
  Matrix indefinite = Matrix::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  CHECK_THROWS_AS(make_dilation(Matrix::Identity(2, 2), indefinite), std::invalid_argument);
  CHECK(reference_dilation().monotonicity_margin > 0.0);
}

TEST_CASE("canonical norm special values") {
  const Dilation d = reference_dilation();
  CHECK(canonical_norm(d, Vector::Zero(3)).value == 0.0);

  // Tiny states collapse to zero rather than underflowing the bracket.
  Vector tiny = Vector::Zero(3);
  tiny(1) = 1e-308;
  CHECK(canonical_norm(d, tiny).value == 0.0);

  // Euclidean case: the homogeneous norm is the plain norm.
  const Dilation std3 = standard_dilation(3);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = random_vector(rng, 3, 2.0);
    CHECK(canonical_norm(std3, x).value == doctest::Approx(x.norm()).epsilon(1e-11));
  }

  // e1 is an eigenvector of the generator with eigenvalue 1, which gives the
  // closed form sqrt(P11).
  Vector e1 = Vector::Zero(3);
  e1(0) = 1.0;
  const double expected = std::sqrt(refsys::lmi_weight_P()(0, 0));
  CHECK(canonical_norm(d, e1).value == doctest::Approx(expected).epsilon(1e-10));
  CHECK(canonical_norm(d, e1).value == doctest::Approx(bisection_norm_oracle(d, e1)).epsilon(1e-10));
}

TEST_CASE("canonical norm agrees with the bisection oracle") {
  const Dilation d = reference_dilation();
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = random_vector(rng, 3, std::pow(10.0, trial % 5 - 2));
    if (x.norm() < 1e-6) continue;
    const HomNormResult hn = canonical_norm(d, x);
    CHECK(hn.value == doctest::Approx(bisection_norm_oracle(d, x)).epsilon(1e-9));
    // Defining property: the pulled-back point sits on the unit sphere.
    CHECK(d.weighted_norm(dilate(d, -hn.s_x, x)) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("canonical norm refuses a non-monotone dilation") {
  Dilation broken;
  broken.generator = Matrix::Identity(2, 2);
  broken.weight = Matrix::Identity(2, 2);
  broken.monotonicity_margin = -1.0;
  Vector x(2);
  x << 1.0, 0.0;
  CHECK_THROWS_AS(canonical_norm(broken, x), std::invalid_argument);
}

TEST_CASE("canonical norm homogeneity and sphere consistency") {
  const Dilation d = reference_dilation();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> us(-3.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Vector x = random_vector(rng, 3, 1.5);
    if (x.norm() < 1e-3) continue;
    const double s = us(rng);
    const double lhs = canonical_norm(d, dilate(d, s, x)).value;
    const double rhs = std::exp(s) * canonical_norm(d, x).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));

    // ||x||_d = 1 iff ||x|| = 1 on rays.
    const Vector on_sphere = x / d.weighted_norm(x);
    CHECK(canonical_norm(d, on_sphere).value == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("canonical norm is continuous away from zero") {
  const Dilation d = reference_dilation();
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 15; ++trial) {
    Vector x = random_vector(rng, 3, 1.0);
    if (x.norm() < 0.1) x(0) += 0.5;
    const double base = canonical_norm(d, x).value;
    for (int probe = 0; probe < 5; ++probe) {
      const Vector dx = random_vector(rng, 3, 1e-6);
      const double moved = canonical_norm(d, x + dx).value;
      CHECK(std::abs(moved - base) < 1e-3);  // crude Lipschitz bound at unit scale
    }
  }
}

TEST_CASE("gradient matches central finite differences") {
  const Dilation d = reference_dilation();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 15; ++trial) {
    const Vector x = random_vector(rng, 3, 1.5);
    if (x.norm() < 0.05) continue;
    const RowVector grad = canonical_norm_gradient(d, x);
    for (int k = 0; k < 3; ++k) {
      Vector xp = x, xm = x;
      xp(k) += 1e-6;
      xm(k) -= 1e-6;
      const double fd =
          (canonical_norm(d, xp).value - canonical_norm(d, xm).value) / 2e-6;
      CHECK(grad(k) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
  CHECK_THROWS_AS(canonical_norm_gradient(d, Vector::Zero(3)), std::invalid_argument);
}

TEST_CASE("Euler identity for the norm") {
  const Dilation d = reference_dilation();
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 15; ++trial) {
    const Vector x = random_vector(rng, 3, 2.0);
    if (x.norm() < 0.05) continue;
    const RowVector grad = canonical_norm_gradient(d, x);
    const double lhs = grad.dot(d.generator * x);
    CHECK(lhs == doctest::Approx(canonical_norm(d, x).value).epsilon(1e-9));
  }
}

TEST_CASE("gradient of the Euclidean case") {
  const Dilation std3 = standard_dilation(3);
  Vector x(3);
  x << 1.0, -2.0, 0.5;
  const RowVector grad = canonical_norm_gradient(std3, x);
  CHECK((grad.transpose() - x / x.norm()).norm() < 1e-10);
}

TEST_CASE("psi and its inverse") {
  const Dilation d = reference_dilation();
  CHECK(psi(d, Vector::Zero(3)).norm() == 0.0);
  CHECK(psi_inverse(d, Vector::Zero(3)).norm() == 0.0);

  const Dilation std3 = standard_dilation(3);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = random_vector(rng, 3, 2.0);
    CHECK((psi(std3, x) - x).norm() < 1e-10);  // identity map for plain scaling

    // Round trips and the norm-transport identity.
    const Vector z = psi(d, x);
    CHECK((psi_inverse(d, z) - x).norm() < 1e-9 * (1.0 + x.norm()));
    CHECK((psi(d, psi_inverse(d, z)) - z).norm() < 1e-9 * (1.0 + z.norm()));
    CHECK(d.weighted_norm(z) == doctest::Approx(canonical_norm(d, x).value).epsilon(1e-10));
  }
}

TEST_CASE("hom_add behaves like addition in straightened coordinates") {
  const Dilation d = reference_dilation();
  std::mt19937_64 rng(10);
  const ConeSpec cone = refsys::design_cone();
  for (int trial = 0; trial < 10; ++trial) {
    const Vector x = random_vector(rng, 3, 1.0);
    const Vector y = random_vector(rng, 3, 1.0);
    CHECK((hom_add(d, x, Vector::Zero(3)) - x).norm() < 1e-9 * (1.0 + x.norm()));

    const Dilation std3 = standard_dilation(3);
    CHECK((hom_add(std3, x, y) - (x + y)).norm() < 1e-9);

    // Barriers are additive through psi.
    const Vector sum = hom_add(d, x, y);
    for (int i = 0; i < cone.constraints(); ++i) {
      const double lhs = cone.H.row(i).dot(psi(d, sum));
      const double rhs = cone.H.row(i).dot(psi(d, x)) + cone.H.row(i).dot(psi(d, y));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
  }
}

TEST_CASE("field homogeneity checker") {
  const Dilation std3 = standard_dilation(3);
  std::mt19937_64 rng(11);
  Matrix a(3, 3);
  a << 0, 1, 0, 0, 0, 1, -1, -2, -3;

  // Any linear field is plain-homogeneous of degree 0.
  const FieldFn linear = [&a](const Vector& x) { return Vector(a * x); };
  const HomogeneityReport ok = check_field_homogeneity(linear, std3, 0.0, 24);
  CHECK(ok.pass);
  CHECK(ok.max_residual < 1e-12);

  // The same field against a non-commuting generator fails.
  const Dilation d = reference_dilation();
  const HomogeneityReport bad = check_field_homogeneity(linear, d, 0.0, 24);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_residual > 1e-3);
}
