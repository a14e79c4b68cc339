#pragma once

#include <optional>

#include "homctl/cone.hpp"

namespace homctl {

struct SimConfig {
  double t_final = 10.0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 0.1;
  double min_step = 1e-12;
  double origin_clamp = 1e-9;  // radius in the homogeneous norm
  double stride = 1e-3;        // output grid spacing
};

/// Exogenous disturbance models of the closed loop:
///  - state_multiplicative: xdot += channel |q(t) x_k|^exponent with
///    q(t) = q_amplitude sin(q_frequency t);
///  - noise_plus_additive: the control sees x + q1(t) with q1 a seeded
///    uniform noise held piecewise constant, and xdot += q2(t) with
///    q2(t) = additive_amplitude sin(additive_frequency t).
struct PerturbationSpec {
  enum class Kind { none, state_multiplicative, noise_plus_additive };
  Kind kind = Kind::none;

  Vector channel;
  double exponent = 1.0;  // must satisfy 0 < exponent < 1 + mu for ISS runs
  double q_amplitude = 0.0;
  double q_frequency = 0.0;
  int state_index = 0;

  double noise_magnitude = 0.0;
  double noise_hold = 1e-3;
  std::uint64_t noise_seed = 1;
  Vector additive_amplitude;
  double additive_frequency = 0.0;
};

enum class ControllerKind { linear, homogeneous, mixed };

struct ClosedLoop {
  std::function<Vector(double, const Vector&)> rhs;    // (t, x) -> xdot
  std::function<Vector(double, const Vector&)> input;  // (t, x) -> applied u
};

/// Assembles xdot = A x + B u(x + q1(t)) + disturbance(t, x) for the chosen
/// controller branch. Dimension mismatches throw at construction.
ClosedLoop build_rhs(const HomogeneousController& c, ControllerKind kind,
                     const PerturbationSpec& pert);

struct Trace {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> inputs;
  std::vector<Vector> barriers;    // cone barriers per sample (empty without a cone)
  std::vector<double> hom_norms;
  std::optional<double> clamped_at;
};

/// Embedded Runge-Kutta 4(5) (Dormand-Prince) with PI step control. Steps
/// land exactly on the output grid. Once the homogeneous norm of the state
/// falls below origin_clamp the state is set to exactly zero and held; the
/// clamp time is recorded. Step underflow and non-finite derivatives throw
/// std::runtime_error with the time and state in the message.
Trace integrate(const ClosedLoop& loop, const Vector& x0, const SimConfig& cfg,
                const Dilation& d, const ConeSpec* cone = nullptr);

/// Convenience overload for a bare vector field (zero input column).
Trace integrate(const std::function<Vector(double, const Vector&)>& rhs, const Vector& x0,
                const SimConfig& cfg, const Dilation& d, const ConeSpec* cone = nullptr);

/// First recorded time after which |x(t)| stays at or below the threshold.
std::optional<double> settling_time(const Trace& trace, double threshold);

/// Componentwise minimum of the recorded barrier values.
Vector min_barrier(const Trace& trace);

/// Dilation symmetry regression: integrates the loop from x0 and from the
/// dilated state d(s) x0 with time and disturbance rescaled by the degree,
/// then returns the largest mismatch between the two trajectories on the
/// shared grid. degree_override substitutes a wrong degree on purpose (for
/// negative controls).
double symmetry_check(const HomogeneousController& c, ControllerKind kind,
                      const PerturbationSpec& pert, const Vector& x0, double s,
                      const SimConfig& cfg,
                      std::optional<double> degree_override = std::nullopt);

}  // namespace homctl
