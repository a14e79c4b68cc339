#include <cmath>
#include <random>

#include "doctest.h"
#include "homctl/reference_system.hpp"
#include "homctl/synthesis.hpp"

using namespace homctl;

namespace {

ConeSpec identity_cone(int n) {
  ConeSpec cone;
  cone.H = Matrix::Identity(n, n);
  return cone;
}

}  // namespace

TEST_CASE("synth_linear on an already-stable positive plant") {
  LinearPlant plant;
  plant.A = -Matrix::Identity(3, 3);
  plant.B = Matrix::Identity(3, 3);
  const auto res = synth_linear(plant, identity_cone(3), 1.0);
  CHECK(res.status == LinearSynthesisResult::Status::ok);
  CHECK(res.cost < 0.0);
  CHECK(res.metzler);
  CHECK(res.hurwitz);
  CHECK((res.ell.array() > 0.0).all());
}

TEST_CASE("synth_linear on the reference problem") {
  const auto res = synth_linear(refsys::plant(), refsys::design_cone(), 4.0);
  REQUIRE(res.status == LinearSynthesisResult::Status::ok);
  CHECK(res.cost < 0.0);
  CHECK(res.metzler);
  CHECK(res.hurwitz);
  const Matrix cone_acl = refsys::design_cone().H *
                          (refsys::plant().A + refsys::plant().B * res.K) *
                          refsys::design_cone().H.inverse();
  for (int i = 0; i < 3; ++i) {
    CHECK(cone_acl(i, i) >= -4.0 - 1e-9);
  }
  // The certificate is real: ell^T cone_acl < 0 componentwise.
  CHECK(((cone_acl.transpose() * res.ell).array() < 0.0).all());
}

TEST_CASE("the published gain satisfies the design constraints at rho = 4") {
  const Matrix cone_acl = refsys::design_cone().H *
                          (refsys::plant().A + refsys::plant().B * refsys::gain_K()) *
                          refsys::design_cone().H.inverse();
  CHECK(is_metzler(cone_acl, 1e-9));
  for (int i = 0; i < 3; ++i) {
    CHECK(cone_acl(i, i) >= -4.0 - 1e-9);
  }
  CHECK((cone_acl - refsys::cone_matrix()).cwiseAbs().maxCoeff() < 5e-4);
}

TEST_CASE("the first gain step alone is already feasible and decaying") {
  const auto res = synth_linear(refsys::plant(), refsys::design_cone(), 4.0, 1);
  CHECK(res.cost < 0.0);
  CHECK(res.metzler);
}

TEST_CASE("synth_linear input validation and infeasibility") {
  CHECK_THROWS_AS(synth_linear(refsys::plant(), refsys::safety_cone(), 4.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(synth_linear(refsys::plant(), refsys::design_cone(), -1.0),
                  std::invalid_argument);
}

TEST_CASE("solve_homogenization on the double integrator") {
  LinearPlant plant;
  plant.A.resize(2, 2);
  plant.A << 0, 1, 0, 0;
  plant.B.resize(2, 1);
  plant.B << 0, 1;
  const auto hom = solve_homogenization(plant);
  CHECK(hom.residual < 1e-9);
  CHECK((plant.A * hom.G0 + plant.B * hom.Y0 - hom.G0 * plant.A - plant.A)
            .cwiseAbs()
            .maxCoeff() < 1e-9);
  CHECK((hom.G0 * plant.B).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((hom.K0 - hom.Y0 * (hom.G0 - Matrix::Identity(2, 2)).inverse())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("solve_homogenization on the reference plant") {
  const auto hom = solve_homogenization(refsys::plant());
  const auto& plant = refsys::plant();
  CHECK(hom.residual < 1e-9);
  CHECK((hom.G0 * plant.B).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(
      [] {
        LinearPlant dead;
        dead.A = Matrix::Zero(2, 2);
        dead.B = Matrix::Zero(2, 1);
        return solve_homogenization(dead);
      }(),
      std::invalid_argument);
}

TEST_CASE("the published homogenizer solves the defining equations") {
  const auto& plant = refsys::plant();
  const Matrix g0 = refsys::homogenizer_G0();
  const Matrix y0 = refsys::gain_K0() * (g0 - Matrix::Identity(3, 3));
  CHECK((plant.A * g0 + plant.B * y0 - g0 * plant.A - plant.A).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((g0 * plant.B).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("refine_homogenization widens the admissible degree interval") {
  const auto refined = refine_homogenization(refsys::plant(), refsys::design_cone(),
                                             refsys::gain_K());
  CHECK(refined.residual < 1e-9);
  const auto range = metzler_offset_range(refsys::design_cone(), refsys::gain_K(),
                                          refined.G0, refsys::plant());
  CHECK(range.feasible);
  CHECK(range.tau_min <= 1e-9);
  CHECK(range.mu_lower == doctest::Approx(-1.0));
}

TEST_CASE("metzler_offset_range closed forms") {
  // Published homogenizer: the offset image is already Metzler-compatible.
  const auto range = metzler_offset_range(refsys::design_cone(), refsys::gain_K(),
                                          refsys::homogenizer_G0(), refsys::plant());
  CHECK(range.feasible);
  CHECK(range.tau_min == 0.0);
  CHECK(range.mu_lower == -1.0);

  // Single off-diagonal obstruction: a slack of 1 against an offset of 2.
  LinearPlant toy;
  toy.A.resize(2, 2);
  toy.A << -1, 1, 0, -1;
  toy.B = Matrix::Zero(2, 1);
  toy.B(1, 0) = 1.0;
  Matrix g0 = Matrix::Zero(2, 2);
  g0(0, 1) = 2.0;
  const auto single = metzler_offset_range(identity_cone(2), Matrix::Zero(1, 2), g0, toy);
  CHECK(single.feasible);
  CHECK(single.tau_min == doctest::Approx(2.0));
  CHECK(single.mu_lower == doctest::Approx(-0.5));

  // No slack at all: infeasible, with the entry named.
  Matrix a2 = toy.A;
  a2(0, 1) = 0.0;
  LinearPlant toy2 = toy;
  toy2.A = a2;
  const auto stuck = metzler_offset_range(identity_cone(2), Matrix::Zero(1, 2), g0, toy2);
  CHECK_FALSE(stuck.feasible);
  CHECK(stuck.violation.find("(0,1)") != std::string::npos);
}

TEST_CASE("solve_lmi_weight closed form and reference problem") {
  LinearPlant trivial;
  trivial.A = -Matrix::Identity(2, 2);
  trivial.B = Matrix::Zero(2, 1);
  trivial.B(0, 0) = 1.0;
  const Matrix p0 = solve_lmi_weight(trivial, Matrix::Zero(1, 2), Matrix::Identity(2, 2));
  CHECK(min_sym_eigenvalue(p0) > 0.0);
  CHECK(max_sym_eigenvalue(p0 * trivial.A) < 0.0);

  const auto& plant = refsys::plant();
  const Matrix gd = Matrix::Identity(3, 3) + refsys::degree_mu() * refsys::homogenizer_G0();
  const ConeSpec cone = refsys::design_cone();
  const Matrix p = solve_lmi_weight(plant, refsys::gain_K(), gd, &cone);
  const Matrix acl = plant.A + plant.B * refsys::gain_K();
  const double delta = 1e-6 * p.norm();
  CHECK(max_sym_eigenvalue(p * acl) <= -delta);
  CHECK(min_sym_eigenvalue(p * gd) >= delta);
  CHECK(min_sym_eigenvalue(p) >= delta);
  CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("the published weight satisfies the three sign conditions") {
  const auto& plant = refsys::plant();
  const Matrix p = refsys::lmi_weight_P();
  const Matrix gd = Matrix::Identity(3, 3) + refsys::degree_mu() * refsys::homogenizer_G0();
  const Matrix acl = plant.A + plant.B * refsys::gain_K();
  CHECK(min_sym_eigenvalue(p) > 0.0);
  CHECK(max_sym_eigenvalue(p * acl) < 0.0);
  CHECK(min_sym_eigenvalue(p * gd) > 0.0);
}

TEST_CASE("solve_lmi_weight rejects unstabilized input") {
  const auto& plant = refsys::plant();
  CHECK_THROWS_AS(
      solve_lmi_weight(plant, Matrix::Zero(2, 3), Matrix::Identity(3, 3)),
      std::invalid_argument);
}

TEST_CASE("eval_control basics") {
  const auto c = refsys::controller();
  CHECK(eval_control(c, Vector::Zero(3)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(eval_mixed_control(c, Vector::Zero(3)).cwiseAbs().maxCoeff() == 0.0);

  // Far outside the unit ball the mixed law is exactly linear.
  Vector far(3);
  far << 2.0, -1.0, 1.5;
  far *= 2.0 / c.dilation.weighted_norm(far);
  CHECK((eval_mixed_control(c, far) - c.K * far).cwiseAbs().maxCoeff() < 1e-12);

  // On the sphere both branches coincide.
  Vector edge(3);
  edge << 0.8, 0.4, -0.2;
  edge /= c.dilation.weighted_norm(edge);
  CHECK((eval_control(c, edge) - c.K * edge).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((eval_mixed_control(c, edge) - c.K * edge).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("eval_control approaches the linear gain as the degree vanishes") {
  HomogeneousController c = refsys::controller();
  c.mu = -1e-6;
  c.dilation =
      make_dilation(Matrix::Identity(3, 3) + c.mu * c.G0, refsys::lmi_weight_P());
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x(3);
    for (int k = 0; k < 3; ++k) x(k) = u(rng);
    if (x.norm() < 0.05) continue;
    CHECK((eval_control(c, x) - c.K * x).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("homogeneity structure of the control and the closed loop") {
  const auto c = refsys::controller();
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Vector x(3);
    for (int k = 0; k < 3; ++k) x(k) = u(rng);
    if (x.norm() < 0.05) continue;
    const double s = 1.5 * u(rng);
    const Vector xs = dilate(c.dilation, s, x);
    // The gain split scales cleanly: u(d(s)x) - K0 d(s)x = e^{(1+mu)s} (u(x) - K0 x).
    const Vector lhs = eval_control(c, xs) - c.K0 * xs;
    const Vector rhs = std::exp((1.0 + c.mu) * s) * (eval_control(c, x) - c.K0 * x);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8 * (1.0 + rhs.cwiseAbs().maxCoeff()));
  }

  const FieldFn loop = [&c](const Vector& x) {
    return Vector(c.plant.A * x + c.plant.B * eval_control(c, x));
  };
  const HomogeneityReport rep = check_field_homogeneity(loop, c.dilation, c.mu, 48);
  CHECK(rep.pass);
  CHECK(rep.max_residual <= 1e-8);
}

TEST_CASE("homogenized drift identity and input-channel scaling") {
  const auto& plant = refsys::plant();
  for (double mu : {-1.0, -0.75, -0.3, -0.05}) {
    const Matrix gd = Matrix::Identity(3, 3) + mu * refsys::homogenizer_G0();
    const Matrix a0 = plant.A + plant.B * refsys::gain_K0();
    CHECK((a0 * gd - (gd + mu * Matrix::Identity(3, 3)) * a0).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(is_anti_hurwitz(gd));
    for (double s : {-3.0, -1.0, 0.5, 3.0}) {
      CHECK((expm(gd, s) * plant.B - std::exp(s) * plant.B).cwiseAbs().maxCoeff() <
            1e-9 * std::exp(std::abs(s)));
    }
  }
}

TEST_CASE("full pipeline on the reference problem") {
  PipelineReport report;
  const auto ctrl =
      full_pipeline(refsys::plant(), refsys::design_cone(), 4.0, -0.75, &report, 512);
  CHECK(ctrl.mu == -0.75);
  CHECK(report.linear.status == LinearSynthesisResult::Status::ok);
  CHECK(report.invariance.pass);
  CHECK(report.homogeneity.pass);
  CHECK(report.issf_ran);
  CHECK(report.issf.static_certificate.minCoeff() > 0.0);
  CHECK(ctrl.dilation.monotonicity_margin > 0.0);
  CHECK(ctrl.mu_lower <= -0.75);
}

TEST_CASE("full pipeline input rejection") {
  CHECK_THROWS_AS(full_pipeline(refsys::plant(), refsys::design_cone(), 4.0, -2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(full_pipeline(refsys::plant(), refsys::design_cone(), 4.0, 0.0),
                  std::invalid_argument);
  LinearPlant dead;
  dead.A = Matrix::Zero(3, 3);
  dead.B = Matrix::Zero(3, 2);
  CHECK_THROWS_AS(full_pipeline(dead, refsys::design_cone(), 4.0, -0.5),
                  std::invalid_argument);
}
