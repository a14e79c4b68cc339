#include "homctl/reference_system.hpp"

namespace homctl::refsys {

LinearPlant plant() {
  LinearPlant p;
  p.A.resize(3, 3);
  p.A << 3, 0, 1,
         0, -1, 1,
         -2, 0, 0;
  p.B.resize(3, 2);
  p.B << 1, -1,
         0, 1,
         0, 1;
  return p;
}

ConeSpec safety_cone() {
  ConeSpec cone;
  cone.H.resize(2, 3);
  cone.H << 1, 0, 1,
            0, 1, -1;
  cone.labels = {"x1+x3", "x2-x3"};
  return cone;
}

ConeSpec design_cone() {
  ConeSpec cone;
  cone.H.resize(3, 3);
  cone.H << 1, 0, 1,
            0, 1, -1,
            0, 0, -1;
  cone.labels = {"x1+x3", "x2-x3", "-x3"};
  return cone;
}

Matrix gain_K() {
  Matrix k(2, 3);
  k << -4.7536, 0, -4.9393,
       1.7415, 0, -3.7856;
  return k;
}

Matrix homogenizer_G0() {
  Matrix g0(3, 3);
  g0 << 0, -0.5, 0.5,
        0, -0.5, 0.5,
        0, 0.5, -0.5;
  return g0;
}

Matrix gain_K0() {
  Matrix k0(2, 3);
  k0 << -1, 0, -1,
        1, 0.5, -0.5;
  return k0;
}

Matrix lmi_weight_P() {
  Matrix p(3, 3);
  p << 0.8707, 0.2572, -0.1918,
       0.2572, 1.0229, -0.3984,
       -0.1918, -0.3984, 0.9301;
  return p;
}

double degree_mu() { return -0.75; }

Matrix cone_matrix() {
  Matrix m(3, 3);
  m << -3.7536, 0, 0.1857,
       2, -1, 2,
       0.2585, 0, -3.5271;
  return m;
}

Matrix offset_cone_matrix() {
  Matrix m(3, 3);
  m << 0, 0, 0,
       0, 1, 0,
       0, 0.5, 0;
  return m;
}

Vector default_x0() {
  Vector x(3);
  x << 0.5, 1, 0;
  return x;
}

Vector issf_offset_r() {
  Vector r(3);
  r << 0.2, 1, 0.2;
  return r;
}

double synthesis_rho() { return 4.0; }

HomogeneousController controller() {
  HomogeneousController c;
  c.plant = plant();
  c.K = gain_K();
  c.K0 = gain_K0();
  c.G0 = homogenizer_G0();
  c.Y0 = gain_K0() * (homogenizer_G0() - Matrix::Identity(3, 3));
  c.mu = degree_mu();
  const Matrix gd = Matrix::Identity(3, 3) + c.mu * c.G0;
  c.dilation = make_dilation(gd, lmi_weight_P());
  c.tau_min = 0.0;
  c.mu_lower = -1.0;
  return c;
}

}  // namespace homctl::refsys
