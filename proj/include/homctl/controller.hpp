#pragma once

#include "homctl/dilation.hpp"
#include "homctl/plant.hpp"

namespace homctl {

/// Finite-time state feedback obtained by upgrading a stabilizing linear gain.
/// The applied input is
///   u(x) = K0 x + ||x||_d^{1+mu} (K - K0) d(-ln||x||_d) x,   u(0) = 0,
/// where d is the dilation generated by I + mu G0 and ||.||_d its canonical
/// homogeneous norm.
struct HomogeneousController {
  LinearPlant plant;
  Matrix K;   // stabilizing linear gain (m x n)
  Matrix K0;  // homogenizing gain, K0 = Y0 (G0 - I)^-1
  Matrix G0;  // homogenizer: A G0 + B Y0 = G0 A + A and G0 B = 0
  Matrix Y0;
  double mu = -0.5;   // closed-loop homogeneity degree, in [-1, 0)
  Dilation dilation;  // generator I + mu G0, weight from the feasibility LMI
  double tau_min = 0.0;
  double mu_lower = -1.0;  // admissible degrees are [mu_lower, 0)
};

/// A + B K.
Matrix closed_loop_matrix(const HomogeneousController& c);

Vector eval_control(const HomogeneousController& c, const Vector& x);

/// Linear gain outside the weighted unit ball, homogeneous feedback inside;
/// the two branches agree on the unit sphere.
Vector eval_mixed_control(const HomogeneousController& c, const Vector& x);

}  // namespace homctl
