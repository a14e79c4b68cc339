#include <random>

#include "doctest.h"
#include "homctl/lp.hpp"

using namespace homctl;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LpProblem make(Vector c, Matrix a, Vector b, Vector lo, Vector hi) {
  LpProblem p;
  p.objective = std::move(c);
  p.ineq_lhs = std::move(a);
  p.ineq_rhs = std::move(b);
  p.lower = std::move(lo);
  p.upper = std::move(hi);
  return p;
}

}  // namespace

TEST_CASE("min x subject to x >= 1") {
  Matrix a(1, 1);
  a << -1.0;
  Vector b(1), c(1), lo(1), hi(1);
  b << -1.0;
  c << 1.0;
  lo << -kInf;
  hi << kInf;
  const LpResult r = lp_solve(make(c, a, b, lo, hi));
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.solution(0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("min -x-y on the boxed simplex") {
  Matrix a(1, 2);
  a << 1.0, 1.0;
  Vector b(1), c(2), lo(2), hi(2);
  b << 1.0;
  c << -1.0, -1.0;
  lo << 0.0, 0.0;
  hi << 1.0, 1.0;
  const LpResult r = lp_solve(make(c, a, b, lo, hi));
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(r.solution(0) + r.solution(1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("infeasible and unbounded are distinct verdicts") {
  {
    // x <= -1 together with x >= 1.
    Matrix a(2, 1);
    a << 1.0, -1.0;
    Vector b(2), c(1), lo(1), hi(1);
    b << -1.0, -1.0;
    c << 1.0;
    lo << -kInf;
    hi << kInf;
    CHECK(lp_solve(make(c, a, b, lo, hi)).status == LpStatus::infeasible);
  }
  {
    // min -x over x >= 0 with no cap.
    Matrix a(1, 1);
    a << -1.0;
    Vector b(1), c(1), lo(1), hi(1);
    b << 0.0;
    c << -1.0;
    lo << 0.0;
    hi << kInf;
    CHECK(lp_solve(make(c, a, b, lo, hi)).status == LpStatus::unbounded);
  }
}

TEST_CASE("mirrored and equality-like bounds") {
  // Upper-bounded free-below variable: min x with x <= 3 is unbounded,
  // max x (min -x) gives 3.
  Matrix a(0, 1);
  Vector b(0), lo(1), hi(1);
  lo << -kInf;
  hi << 3.0;
  Vector c(1);
  c << -1.0;
  const LpResult r = lp_solve(make(c, a, b, lo, hi));
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.solution(0) == doctest::Approx(3.0));
  c << 1.0;
  CHECK(lp_solve(make(c, a, b, lo, hi)).status == LpStatus::unbounded);

  // Pinned variable lo = hi.
  Vector lo2(1), hi2(1);
  lo2 << 2.5;
  hi2 << 2.5;
  const LpResult pinned = lp_solve(make(c, a, b, lo2, hi2));
  REQUIRE(pinned.status == LpStatus::optimal);
  CHECK(pinned.solution(0) == doctest::Approx(2.5));
}

TEST_CASE("solutions are feasible and locally non-improvable") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4, m = 6;
    Matrix a(m, n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = u(rng);
    }
    Vector interior(n);
    for (int j = 0; j < n; ++j) interior(j) = 0.3 * u(rng);
    Vector b = a * interior;
    for (int i = 0; i < m; ++i) b(i) += 0.5 + 0.5 * std::abs(u(rng));
    Vector c(n), lo = Vector::Constant(n, -2.0), hi = Vector::Constant(n, 2.0);
    for (int j = 0; j < n; ++j) c(j) = u(rng);

    const LpResult r = lp_solve(make(c, a, b, lo, hi));
    REQUIRE(r.status == LpStatus::optimal);
    CHECK((a * r.solution - b).maxCoeff() < 1e-9);
    CHECK((r.solution.array() >= lo.array() - 1e-9).all());
    CHECK((r.solution.array() <= hi.array() + 1e-9).all());

    // Random feasible perturbations cannot beat the reported optimum.
    for (int probe = 0; probe < 30; ++probe) {
      Vector delta(n);
      for (int j = 0; j < n; ++j) delta(j) = 0.05 * u(rng);
      const Vector y = r.solution + delta;
      const bool feasible = (a * y - b).maxCoeff() <= 1e-12 &&
                            (y.array() >= lo.array()).all() &&
                            (y.array() <= hi.array()).all();
      if (feasible) {
        CHECK(c.dot(y) >= r.objective - 1e-9);
      }
    }
  }
}

TEST_CASE("dimension mismatches throw") {
  Matrix a(1, 2);
  a << 1.0, 1.0;
  Vector b(1), c(1), lo(2), hi(2);
  b << 1.0;
  c << 1.0;
  lo << 0.0, 0.0;
  hi << 1.0, 1.0;
  CHECK_THROWS_AS(lp_solve(make(c, a, b, lo, hi)), std::invalid_argument);
}
