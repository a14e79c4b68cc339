#include "homctl/simulation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sampling.hpp"

namespace homctl {

namespace {

// Dormand-Prince 4(5) pair.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384,      0.0,        500.0 / 1113, 125.0 / 192,
                           -2187.0 / 6784,  11.0 / 84,  0.0};
constexpr double kB4[7] = {5179.0 / 57600,  0.0,        7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

std::string state_string(double t, const Vector& x) {
  std::ostringstream os;
  os << "t=" << t << ", x=[";
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    os << (k ? ", " : "") << x(k);
  }
  os << "]";
  return os.str();
}

struct SignalScaling {
  double s = 0.0;
  double mu = 0.0;
  Matrix dilate_s;  // d(s); identity when s = 0

  double time_factor() const { return std::exp(mu * s); }
};

struct Realization {
  std::function<Vector(double, const Vector&)> state_term;  // added to xdot
  std::function<Vector(double)> measurement;                // q1, empty if none
};

Vector noise_value(const PerturbationSpec& pert, int n, double t) {
  const auto bin = static_cast<std::uint64_t>(std::floor(t / pert.noise_hold + 1e-12));
  Vector q(n);
  for (int k = 0; k < n; ++k) {
    q(k) = pert.noise_magnitude * detail::hash_uniform(pert.noise_seed, bin, k);
  }
  return q;
}

Realization realize(const PerturbationSpec& pert, int n, const SignalScaling& sc) {
  Realization out;
  switch (pert.kind) {
    case PerturbationSpec::Kind::none:
      break;
    case PerturbationSpec::Kind::state_multiplicative: {
      if (pert.channel.size() != n) {
        throw std::invalid_argument("perturbation: channel dimension mismatch");
      }
      if (!(pert.exponent > 0.0)) {
        throw std::invalid_argument("perturbation: exponent must be positive");
      }
      // The scalar disturbance scales by e^{((1+mu)/nu - 1) s} and its clock
      // by e^{mu s} under the dilation symmetry.
      const double amp =
          pert.q_amplitude * std::exp(((1.0 + sc.mu) / pert.exponent - 1.0) * sc.s);
      const double freq = pert.q_frequency * sc.time_factor();
      const Vector channel = pert.channel;
      const double nu = pert.exponent;
      const int idx = pert.state_index;
      out.state_term = [channel, amp, freq, nu, idx](double t, const Vector& x) {
        const double q = amp * std::sin(freq * t);
        return Vector(channel * std::pow(std::abs(q * x(idx)), nu));
      };
      break;
    }
    case PerturbationSpec::Kind::noise_plus_additive: {
      if (pert.additive_amplitude.size() != 0 && pert.additive_amplitude.size() != n) {
        throw std::invalid_argument("perturbation: additive amplitude dimension mismatch");
      }
      const double tf = sc.time_factor();
      if (pert.noise_magnitude > 0.0) {
        const Matrix pre = sc.dilate_s;
        const PerturbationSpec spec = pert;
        out.measurement = [spec, n, pre, tf](double t) {
          return Vector(pre * noise_value(spec, n, tf * t));
        };
      }
      if (pert.additive_amplitude.size() == n && pert.additive_frequency != 0.0) {
        const Vector amp = tf * (sc.dilate_s * pert.additive_amplitude);
        const double freq = pert.additive_frequency * tf;
        out.state_term = [amp, freq](double t, const Vector&) {
          return Vector(amp * std::sin(freq * t));
        };
      }
      break;
    }
  }
  return out;
}

ClosedLoop build_loop(const HomogeneousController& c, ControllerKind kind,
                      const Realization& real) {
  const int n = c.plant.dim();
  if (c.K.cols() != n || c.plant.B.cols() != c.K.rows()) {
    throw std::invalid_argument("build_rhs: gain dimensions do not match the plant");
  }
  ClosedLoop loop;
  loop.input = [c, kind, real](double t, const Vector& x) {
    Vector xm = x;
    if (real.measurement) xm += real.measurement(t);
    switch (kind) {
      case ControllerKind::linear:
        return Vector(c.K * xm);
      case ControllerKind::homogeneous:
        return eval_control(c, xm);
      case ControllerKind::mixed:
        return eval_mixed_control(c, xm);
    }
    return Vector(Vector::Zero(c.K.rows()));
  };
  loop.rhs = [c, real, input = loop.input](double t, const Vector& x) {
    Vector dx = c.plant.A * x + c.plant.B * input(t, x);
    if (real.state_term) dx += real.state_term(t, x);
    return dx;
  };
  return loop;
}

}  // namespace

ClosedLoop build_rhs(const HomogeneousController& c, ControllerKind kind,
                     const PerturbationSpec& pert) {
  SignalScaling identity;
  identity.dilate_s = Matrix::Identity(c.plant.dim(), c.plant.dim());
  return build_loop(c, kind, realize(pert, c.plant.dim(), identity));
}

Trace integrate(const ClosedLoop& loop, const Vector& x0, const SimConfig& cfg,
                const Dilation& d, const ConeSpec* cone) {
  if (!(cfg.min_step > 0.0 && cfg.min_step <= cfg.max_step) || !(cfg.rel_tol > 0.0) ||
      !(cfg.abs_tol > 0.0) || !(cfg.stride > 0.0) || !(cfg.t_final > 0.0)) {
    throw std::invalid_argument("integrate: invalid configuration");
  }
  require_finite(x0, "integrate: x0");

  Trace trace;
  const Eigen::Index n = x0.size();
  Vector x = x0;
  double t = 0.0;
  bool clamped = false;

  const auto hom_norm_of = [&](const Vector& y) { return canonical_norm(d, y).value; };

  const auto emit = [&](double at, const Vector& y, double hom) {
    trace.times.push_back(at);
    trace.states.push_back(y);
    if (loop.input) {
      trace.inputs.push_back(clamped ? Vector(Vector::Zero(loop.input(0.0, x0).size()))
                                     : loop.input(at, y));
    } else {
      trace.inputs.push_back(Vector());
    }
    trace.barriers.push_back(cone != nullptr ? barrier_values(*cone, d, y) : Vector());
    trace.hom_norms.push_back(hom);
  };

  double hom = hom_norm_of(x);
  if (hom < cfg.origin_clamp) {
    clamped = true;
    trace.clamped_at = 0.0;
    x.setZero();
    hom = 0.0;
  }
  emit(0.0, x, hom);

  double h = std::min(cfg.max_step, cfg.stride);
  double err_prev = 1.0;
  Vector k_stage[7];
  Vector k1_cache;
  bool have_k1 = false;

  const long grid_count = static_cast<long>(std::ceil(cfg.t_final / cfg.stride - 1e-9));
  for (long g = 1; g <= grid_count && !clamped; ++g) {
    const double target = std::min(g * cfg.stride, cfg.t_final);
    while (t < target - 1e-14 * cfg.t_final && !clamped) {
      const double h_try = std::min(h, target - t);
      // Stages (first-same-as-last reuse across accepted steps).
      if (!have_k1) {
        k1_cache = loop.rhs(t, x);
      }
      k_stage[0] = k1_cache;
      bool finite = k_stage[0].allFinite();
      for (int i = 1; i < 7 && finite; ++i) {
        Vector xi = x;
        for (int j = 0; j < i; ++j) {
          if (kA[i][j] != 0.0) xi += h_try * kA[i][j] * k_stage[j];
        }
        k_stage[i] = loop.rhs(t + kC[i] * h_try, xi);
        finite = k_stage[i].allFinite();
      }
      if (!finite) {
        throw std::runtime_error("integrate: non-finite derivative at " + state_string(t, x));
      }
      Vector x5 = x;
      Vector err = Vector::Zero(n);
      for (int i = 0; i < 7; ++i) {
        if (kB5[i] != 0.0) x5 += h_try * kB5[i] * k_stage[i];
        const double db = kB5[i] - kB4[i];
        if (db != 0.0) err += h_try * db * k_stage[i];
      }
      double err_norm = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double scale =
            cfg.abs_tol + cfg.rel_tol * std::max(std::abs(x(i)), std::abs(x5(i)));
        const double e = err(i) / scale;
        err_norm += e * e;
      }
      err_norm = std::sqrt(err_norm / static_cast<double>(n));

      if (err_norm <= 1.0) {
        t += h_try;
        x = x5;
        k1_cache = k_stage[6];  // FSAL
        have_k1 = true;
        const double grow = 0.9 * std::pow(std::max(err_norm, 1e-10), -0.14) *
                            std::pow(err_prev, 0.08);
        h = std::min(cfg.max_step, h_try * std::min(5.0, std::max(0.2, grow)));
        err_prev = std::max(err_norm, 1e-10);
        hom = hom_norm_of(x);
        if (hom < cfg.origin_clamp) {
          clamped = true;
          trace.clamped_at = t;
          x.setZero();
          hom = 0.0;
        }
      } else {
        const double shrink = 0.9 * std::pow(err_norm, -0.2);
        h = h_try * std::min(1.0, std::max(0.2, shrink));
        have_k1 = true;  // k1 still valid: same (t, x)
        if (h < cfg.min_step) {
          throw std::runtime_error("integrate: step underflow at " + state_string(t, x));
        }
      }
    }
    if (!clamped) {
      emit(target, x, hom);
      t = target;
    } else {
      // Grid samples from the clamp onward are exact zeros.
      for (long gg = g; gg <= grid_count; ++gg) {
        emit(std::min(gg * cfg.stride, cfg.t_final), Vector::Zero(n), 0.0);
      }
    }
  }
  return trace;
}

Trace integrate(const std::function<Vector(double, const Vector&)>& rhs, const Vector& x0,
                const SimConfig& cfg, const Dilation& d, const ConeSpec* cone) {
  ClosedLoop loop;
  loop.rhs = rhs;
  return integrate(loop, x0, cfg, d, cone);
}

std::optional<double> settling_time(const Trace& trace, double threshold) {
  if (trace.times.empty()) return std::nullopt;
  std::size_t first_settled = trace.times.size();
  for (std::size_t k = trace.times.size(); k-- > 0;) {
    if (trace.states[k].norm() <= threshold) {
      first_settled = k;
    } else {
      break;
    }
  }
  if (first_settled == trace.times.size()) return std::nullopt;
  return trace.times[first_settled];
}

Vector min_barrier(const Trace& trace) {
  if (trace.barriers.empty() || trace.barriers.front().size() == 0) return Vector();
  Vector mins = trace.barriers.front();
  for (const auto& b : trace.barriers) {
    mins = mins.cwiseMin(b);
  }
  return mins;
}

double symmetry_check(const HomogeneousController& c, ControllerKind kind,
                      const PerturbationSpec& pert, const Vector& x0, double s,
                      const SimConfig& cfg, std::optional<double> degree_override) {
  const double mu = degree_override.value_or(c.mu);
  const int n = c.plant.dim();
  const Matrix ds = expm(c.dilation.generator, s);

  SignalScaling base_sc;
  base_sc.dilate_s = Matrix::Identity(n, n);
  const ClosedLoop base_loop = build_loop(c, kind, realize(pert, n, base_sc));

  SignalScaling trans_sc;
  trans_sc.s = s;
  trans_sc.mu = mu;
  trans_sc.dilate_s = ds;
  const ClosedLoop trans_loop = build_loop(c, kind, realize(pert, n, trans_sc));

  const double tf = std::exp(mu * s);
  SimConfig base_cfg = cfg;
  base_cfg.t_final = tf * cfg.t_final;
  base_cfg.stride = tf * cfg.stride;
  base_cfg.max_step = tf * cfg.max_step;

  const Trace base = integrate(base_loop, x0, base_cfg, c.dilation);
  const Trace trans = integrate(trans_loop, Vector(ds * x0), cfg, c.dilation);

  const std::size_t count = std::min(base.states.size(), trans.states.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    worst = std::max(worst, (trans.states[k] - ds * base.states[k]).norm());
  }
  return worst;
}

}  // namespace homctl
