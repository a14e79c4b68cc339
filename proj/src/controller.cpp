#include "homctl/controller.hpp"

namespace homctl {

Matrix closed_loop_matrix(const HomogeneousController& c) {
  return c.plant.A + c.plant.B * c.K;
}

Vector eval_control(const HomogeneousController& c, const Vector& x) {
  const HomNormFull hn = canonical_norm_full(c.dilation, x);
  if (hn.result.value == 0.0) {
    // At (and numerically indistinguishable from) the origin the feedback is
    // zero; for mu = -1 this is the selected value of the discontinuity.
    return Vector::Zero(c.K.rows());
  }
  return c.K0 * x + std::pow(hn.result.value, 1.0 + c.mu) * ((c.K - c.K0) * hn.unit);
}

Vector eval_mixed_control(const HomogeneousController& c, const Vector& x) {
  if (c.dilation.weighted_norm(x) >= 1.0) {
    return c.K * x;
  }
  return eval_control(c, x);
}

}  // namespace homctl
