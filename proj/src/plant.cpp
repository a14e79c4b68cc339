#include "homctl/plant.hpp"

#include <stdexcept>

namespace homctl {

Matrix LinearPlant::controllability_matrix() const {
  const int n = dim();
  const int m = inputs();
  Matrix ctrb(n, n * m);
  Matrix block = B;
  for (int k = 0; k < n; ++k) {
    ctrb.block(0, k * m, n, m) = block;
    block = A * block;
  }
  return ctrb;
}

bool LinearPlant::controllable(double rel_tol) const {
  const Matrix ctrb = controllability_matrix();
  Eigen::ColPivHouseholderQR<Matrix> qr(ctrb);
  qr.setThreshold(rel_tol);
  return qr.rank() == dim();
}

void validate_plant(const LinearPlant& plant) {
  if (plant.A.rows() != plant.A.cols()) {
    throw std::invalid_argument("plant: A must be square");
  }
  if (plant.B.rows() != plant.A.rows() || plant.B.cols() < 1) {
    throw std::invalid_argument("plant: B must have n rows and at least one column");
  }
  require_finite(plant.A, "plant: A");
  require_finite(plant.B, "plant: B");
}

}  // namespace homctl
