#pragma once

#include "homctl/controller.hpp"
#include "homctl/cone.hpp"

// Bundled three-state, two-input reference design. The published gain,
// homogenizer, and weight below are the fixture values the reproduction
// suite and many tests check against.
namespace homctl::refsys {

LinearPlant plant();

/// The two physical constraints (x1 + x3 >= 0 and x2 - x3 >= 0).
ConeSpec safety_cone();

/// Physical constraints plus the virtual row -x3, making H square.
ConeSpec design_cone();

Matrix gain_K();
Matrix homogenizer_G0();
Matrix gain_K0();
Matrix lmi_weight_P();
double degree_mu();  // -0.75

/// Reference value of H (A + B K) H^-1 (4-decimal rounding).
Matrix cone_matrix();

/// Reference value of H (-G0) H^-1 (exact).
Matrix offset_cone_matrix();

Vector default_x0();     // (0.5, 1, 0)
Vector issf_offset_r();  // (0.2, 1, 0.2)
double synthesis_rho();  // 4

/// Controller assembled from the reference values (dilation validated).
HomogeneousController controller();

}  // namespace homctl::refsys
