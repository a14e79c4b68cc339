#pragma once

#include <cstdint>
#include <functional>

#include "homctl/numerics.hpp"

namespace homctl {

/// One-parameter group x -> e^{s G} x together with the SPD weight P of the
/// norm ||x|| = sqrt(x^T P x) against which the group is strictly monotone.
/// Immutable after construction; all operations on it are pure.
struct Dilation {
  Matrix generator;                  // G, anti-Hurwitz
  Matrix weight;                     // P, symmetric positive definite
  double monotonicity_margin = 0.0;  // min eigenvalue of sym(P G)

  int dim() const { return static_cast<int>(generator.rows()); }
  double weighted_norm(const Vector& x) const;
};

/// Validates the pair and computes the monotonicity margin. Throws
/// std::invalid_argument when G is not anti-Hurwitz, P is not symmetric
/// positive definite, or sym(P G) is not positive definite.
Dilation make_dilation(Matrix generator, Matrix weight);

/// Identity dilation with Euclidean weight (plain scaling by e^s).
Dilation standard_dilation(int n);

/// e^{s G} x.
Vector dilate(const Dilation& d, double s, const Vector& x);

struct HomNormResult {
  double value = 0.0;  // homogeneous norm, e^{s_x}
  double s_x = 0.0;    // -inf when x = 0
  int iterations = 0;
};

/// Canonical homogeneous norm: the unique e^{s_x} such that the pulled-back
/// point d(-s_x) x lies on the weighted unit sphere. Solved by bracketing
/// from ln||x|| plus bracket-guarded Newton (bisection is the fallback for
/// any rejected Newton step). States with ||x|| < 1e-300 map to 0. Throws
/// std::invalid_argument when the dilation is not strictly monotone
/// (monotonicity_margin <= 0).
HomNormResult canonical_norm(const Dilation& d, const Vector& x);

struct HomNormFull {
  HomNormResult result;
  Vector unit;  // d(-s_x) x, the point pulled back to the unit sphere
};

/// canonical_norm plus the pulled-back unit point (saves a matrix
/// exponential for callers that need both).
HomNormFull canonical_norm_full(const Dilation& d, const Vector& x);

/// Gradient row of the canonical norm; undefined at the origin (throws).
RowVector canonical_norm_gradient(const Dilation& d, const Vector& x);

/// Straightening homeomorphism ||x||_d d(-ln||x||_d) x and its inverse.
Vector psi(const Dilation& d, const Vector& x);
Vector psi_inverse(const Dilation& d, const Vector& z);

/// Addition in straightened coordinates: psi^-1(psi(x) + psi(y)).
Vector hom_add(const Dilation& d, const Vector& x, const Vector& y);

using FieldFn = std::function<Vector(const Vector&)>;

struct HomogeneityReport {
  double max_residual = 0.0;
  Vector worst_point;
  double worst_scale = 0.0;
  int samples = 0;
  bool pass = false;
};

/// Samples the scaling law g(d(s)x) = e^{degree s} d(s) g(x) on the weighted
/// unit sphere over a grid s in [-2, 2] and reports the largest normalized
/// residual. Pass threshold 1e-8.
HomogeneityReport check_field_homogeneity(const FieldFn& field, const Dilation& d,
                                          double degree, int sample_count,
                                          std::uint64_t seed = 0);

}  // namespace homctl
