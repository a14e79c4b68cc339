#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "homctl/controller.hpp"
#include "homctl/scan.hpp"

namespace homctl {

/// Constraint rows h_i^T of the region {x : h_i^T psi(x) >= 0 for all i}.
/// The region is a cone invariant under the dilation; in straightened
/// (psi) coordinates it is an ordinary linear cone.
struct ConeSpec {
  Matrix H;  // p x n
  std::vector<std::string> labels;

  int constraints() const { return static_cast<int>(H.rows()); }
  int dim() const { return static_cast<int>(H.cols()); }
};

/// Rejects zero rows; for square H also reports the condition number when
/// requested and rejects singular H. Throws std::invalid_argument.
void validate_cone(const ConeSpec& cone, double* condition_number = nullptr);

/// Barrier vector phi_i(x) = h_i^T psi(x); all zeros at the origin.
Vector barrier_values(const ConeSpec& cone, const Dilation& d, const Vector& x);

bool contains(const ConeSpec& cone, const Dilation& d, const Vector& x, double tol = 1e-9);

/// Off-diagonal entries all >= -tol.
bool is_metzler(const Matrix& m, double tol);

struct XiSamples {
  std::vector<Vector> points;
  bool feasible = false;  // false when the slice admits no point
};

/// Deterministic low-discrepancy samples of the i-th boundary slice.
/// offset = 0: points with ||z|| = 1 (weighted), h_i^T z = 0 and
/// h_j^T z >= 0 for j != i, supplemented with edge points where a second
/// constraint is active. offset != 0 (componentwise >= 0): points of the
/// affine slice h_i^T z + offset_i = 0, h_j^T z + offset_j >= 0 inside the
/// window ||z|| <= radius_window (default 100 max(offset)).
XiSamples sample_xi(const ConeSpec& cone, const Dilation& d, int i, const Vector& offset,
                    int count, std::uint64_t seed = 0, double radius_window = 0.0);

struct MarginReport {
  Vector per_constraint;        // worst margin per constraint (+inf if unsampled)
  std::vector<Vector> witness;  // worst sample per constraint (may be empty)
  double worst_margin = std::numeric_limits<double>::infinity();
  int worst_constraint = -1;
  Vector worst_witness;
  int samples_used = 0;
  double tolerance = 1e-9;
  bool pass = false;  // worst margin > -tolerance over the checked constraints
  std::vector<int> checked;  // constraint indices the verdict covers
  std::string note;
};

/// Right-hand side of the boundary flow condition. The two forms differ by
/// the h_i^T z term, which vanishes on the slice h_i^T z = 0; both are
/// exposed because the perturbed and unperturbed statements of the condition
/// are written with different generator shifts.
enum class InvarianceRhs { generator, generator_minus_identity };

/// Worst value over the boundary slices of
///   h_i^T g(z) - (z^T P g(z) / z^T P G z) h_i^T G' z,
/// with G' = G or G - I according to `form`. Negative margins witness flow
/// leaving the cone. Throws std::runtime_error when z^T P G z <= 0 at a
/// sample (broken dilation).
MarginReport invariance_margin(const FieldFn& g, const Dilation& d, const ConeSpec& cone,
                               int samples_per_constraint, std::uint64_t seed = 0,
                               InvarianceRhs form = InvarianceRhs::generator,
                               ExecPolicy policy = ExecPolicy::parallel);

/// M(z) = H (A + B K + mu gamma(z) G0) H^-1 with
/// gamma(z) = -z^T P (A + B K) z / z^T P G z; requires a square invertible
/// cone. The cone is invariant for the closed loop when M(z) is Metzler on
/// the whole boundary sphere.
Matrix closed_loop_cone_matrix(const HomogeneousController& c, const ConeSpec& cone,
                               const Vector& z);

using PerturbedFieldFn = std::function<Vector(const Vector& x, const Vector& q)>;

/// Same boundary condition with the field under exogenous input q drawn from
/// a grid; q = {0} reduces to invariance_margin of the unperturbed field.
MarginReport iss_margin(const PerturbedFieldFn& f, const Dilation& d, const ConeSpec& cone,
                        int samples_per_constraint, const std::vector<Vector>& q_grid,
                        std::uint64_t seed = 0,
                        InvarianceRhs form = InvarianceRhs::generator_minus_identity,
                        ExecPolicy policy = ExecPolicy::parallel);

struct IssfReport {
  MarginReport sampled;       // min over i, z of -e_i^T M(z/||z||) r
  Vector static_certificate;  // -H (A + B K) H^-1 r componentwise
};

/// Safety-degradation certificate for the offset cone {h_i^T z + r_i >= 0}:
/// the sampled slice condition plus the static matrix certificate. r must be
/// strictly positive; empty slices are reported through `feasible` notes.
IssfReport issf_check(const HomogeneousController& c, const ConeSpec& cone, const Vector& r,
                      int samples_per_constraint, std::uint64_t seed = 0,
                      double radius_window = 0.0, ExecPolicy policy = ExecPolicy::parallel);

struct EmbeddingReport {
  bool offset_metzler = false;  // H (-G0) H^-1 Metzler
  bool holds = false;           // sampled inclusion verified
  std::optional<Vector> counterexample;
  int samples = 0;
};

/// When H(-G0)H^-1 is Metzler, every x with H x >= 0 inside the weighted unit
/// ball must satisfy the cone barriers; verified on deterministic samples.
EmbeddingReport embedding_check(const ConeSpec& cone, const Dilation& d, const Matrix& G0,
                                int samples, std::uint64_t seed = 0,
                                ExecPolicy policy = ExecPolicy::parallel);

}  // namespace homctl
