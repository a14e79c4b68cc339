#include "homctl/config.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "homctl/reference_system.hpp"

namespace homctl {

namespace {

using nlohmann::json;

Matrix matrix_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw std::invalid_argument("config: " + where + " must be a nested numeric array");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument("config: ragged rows in " + where);
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
  }
  return m;
}

Vector vector_from(const json& j, const std::string& where) {
  if (!j.is_array()) {
    throw std::invalid_argument("config: " + where + " must be a numeric array");
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    v(k) = j.at(static_cast<std::size_t>(k)).get<double>();
  }
  return v;
}

json matrix_to(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

json vector_to(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

PerturbationSpec perturbation_from(const json& j) {
  PerturbationSpec pert;
  const std::string kind = j.value("kind", "none");
  if (kind == "none") {
    pert.kind = PerturbationSpec::Kind::none;
  } else if (kind == "state_multiplicative") {
    pert.kind = PerturbationSpec::Kind::state_multiplicative;
    pert.channel = vector_from(j.at("channel"), "perturbation.channel");
    pert.exponent = j.at("exponent").get<double>();
    pert.q_amplitude = j.value("q_amplitude", 1.0);
    pert.q_frequency = j.value("q_frequency", 1.0);
    pert.state_index = j.value("state_index", 0);
    if (!(pert.exponent > 0.0)) {
      throw std::invalid_argument("config: perturbation.exponent must be positive");
    }
  } else if (kind == "noise_plus_additive") {
    pert.kind = PerturbationSpec::Kind::noise_plus_additive;
    pert.noise_magnitude = j.value("noise_magnitude", 0.0);
    pert.noise_hold = j.value("noise_hold", 1e-3);
    pert.noise_seed = j.value("noise_seed", std::uint64_t{1});
    if (j.contains("additive_amplitude")) {
      pert.additive_amplitude =
          vector_from(j.at("additive_amplitude"), "perturbation.additive_amplitude");
    }
    pert.additive_frequency = j.value("additive_frequency", 0.0);
  } else {
    throw std::invalid_argument("config: unknown perturbation kind '" + kind + "'");
  }
  return pert;
}

json perturbation_to(const PerturbationSpec& pert) {
  json j;
  switch (pert.kind) {
    case PerturbationSpec::Kind::none:
      j["kind"] = "none";
      break;
    case PerturbationSpec::Kind::state_multiplicative:
      j["kind"] = "state_multiplicative";
      j["channel"] = vector_to(pert.channel);
      j["exponent"] = pert.exponent;
      j["q_amplitude"] = pert.q_amplitude;
      j["q_frequency"] = pert.q_frequency;
      j["state_index"] = pert.state_index;
      break;
    case PerturbationSpec::Kind::noise_plus_additive:
      j["kind"] = "noise_plus_additive";
      j["noise_magnitude"] = pert.noise_magnitude;
      j["noise_hold"] = pert.noise_hold;
      j["noise_seed"] = pert.noise_seed;
      j["additive_amplitude"] = vector_to(pert.additive_amplitude);
      j["additive_frequency"] = pert.additive_frequency;
      break;
  }
  return j;
}

}  // namespace

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open " + path);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: parse error: ") + e.what());
  }

  ProblemConfig cfg;
  try {
    cfg.plant.A = matrix_from(j.at("plant").at("A"), "plant.A");
    cfg.plant.B = matrix_from(j.at("plant").at("B"), "plant.B");
    cfg.cone.H = matrix_from(j.at("cone").at("H"), "cone.H");
    if (j.at("cone").contains("labels")) {
      cfg.cone.labels = j.at("cone").at("labels").get<std::vector<std::string>>();
    }
    cfg.rho = j.value("rho", 4.0);
    cfg.mu = j.value("mu", -0.5);

    const json sim = j.value("sim", json::object());
    cfg.x0 = sim.contains("x0") ? vector_from(sim.at("x0"), "sim.x0")
                                : Vector(Vector::Zero(cfg.plant.A.rows()));
    cfg.sim.t_final = sim.value("t_final", 10.0);
    cfg.sim.rel_tol = sim.value("rel_tol", 1e-8);
    cfg.sim.abs_tol = sim.value("abs_tol", 1e-10);
    cfg.sim.max_step = sim.value("max_step", 0.1);
    cfg.sim.min_step = sim.value("min_step", 1e-12);
    cfg.sim.origin_clamp = sim.value("origin_clamp", 1e-9);
    cfg.sim.stride = sim.value("stride", 1e-3);
    const std::string kind = sim.value("controller", "homogeneous");
    if (kind == "linear") {
      cfg.controller_kind = ControllerKind::linear;
    } else if (kind == "homogeneous") {
      cfg.controller_kind = ControllerKind::homogeneous;
    } else if (kind == "mixed") {
      cfg.controller_kind = ControllerKind::mixed;
    } else {
      throw std::invalid_argument("config: unknown controller kind '" + kind + "'");
    }
    cfg.perturbation = perturbation_from(sim.value("perturbation", json::object()));

    const json sampling = j.value("sampling", json::object());
    cfg.samples = sampling.value("samples", 2048);
    cfg.seed = sampling.value("seed", std::uint64_t{1});

    const json verify = j.value("verify", json::object());
    if (verify.contains("issf_r")) {
      cfg.issf_r = vector_from(verify.at("issf_r"), "verify.issf_r");
    }
    cfg.iss_q_max = verify.value("iss_q_max", 1.0);
    cfg.out_dir = j.value("out_dir", std::string("."));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }

  validate_plant(cfg.plant);
  validate_cone(cfg.cone);
  const auto n = cfg.plant.A.rows();
  if (cfg.cone.H.cols() != n) {
    throw std::invalid_argument("config: cone dimension does not match the plant");
  }
  if (cfg.x0.size() != n) {
    throw std::invalid_argument("config: sim.x0 dimension does not match the plant");
  }
  if (!(cfg.mu >= -1.0 && cfg.mu < 0.0)) {
    throw std::invalid_argument("config: mu must lie in [-1, 0)");
  }
  if (!(cfg.rho > 0.0)) {
    throw std::invalid_argument("config: rho must be positive");
  }
  if (cfg.samples < 1) {
    throw std::invalid_argument("config: sampling.samples must be positive");
  }
  if (cfg.perturbation.kind == PerturbationSpec::Kind::state_multiplicative) {
    if (cfg.perturbation.channel.size() != n) {
      throw std::invalid_argument("config: perturbation.channel dimension mismatch");
    }
    if (!(cfg.perturbation.exponent < 1.0 + cfg.mu)) {
      throw std::invalid_argument(
          "config: perturbation.exponent must be below 1 + mu for a well-posed run");
    }
  }
  return cfg;
}

void save_config(const ProblemConfig& cfg, const std::string& path) {
  json j;
  j["plant"]["A"] = matrix_to(cfg.plant.A);
  j["plant"]["B"] = matrix_to(cfg.plant.B);
  j["cone"]["H"] = matrix_to(cfg.cone.H);
  if (!cfg.cone.labels.empty()) j["cone"]["labels"] = cfg.cone.labels;
  j["rho"] = cfg.rho;
  j["mu"] = cfg.mu;
  j["sim"]["x0"] = vector_to(cfg.x0);
  j["sim"]["t_final"] = cfg.sim.t_final;
  j["sim"]["rel_tol"] = cfg.sim.rel_tol;
  j["sim"]["abs_tol"] = cfg.sim.abs_tol;
  j["sim"]["max_step"] = cfg.sim.max_step;
  j["sim"]["min_step"] = cfg.sim.min_step;
  j["sim"]["origin_clamp"] = cfg.sim.origin_clamp;
  j["sim"]["stride"] = cfg.sim.stride;
  switch (cfg.controller_kind) {
    case ControllerKind::linear:
      j["sim"]["controller"] = "linear";
      break;
    case ControllerKind::homogeneous:
      j["sim"]["controller"] = "homogeneous";
      break;
    case ControllerKind::mixed:
      j["sim"]["controller"] = "mixed";
      break;
  }
  j["sim"]["perturbation"] = perturbation_to(cfg.perturbation);
  j["sampling"]["samples"] = cfg.samples;
  j["sampling"]["seed"] = cfg.seed;
  if (cfg.issf_r.size() > 0) j["verify"]["issf_r"] = vector_to(cfg.issf_r);
  j["verify"]["iss_q_max"] = cfg.iss_q_max;
  j["out_dir"] = cfg.out_dir;

  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_config: cannot open " + path);
  }
  out << j.dump(2) << "\n";
}

ProblemConfig reference_config() {
  ProblemConfig cfg;
  cfg.plant = refsys::plant();
  cfg.cone = refsys::design_cone();
  cfg.rho = refsys::synthesis_rho();
  cfg.mu = refsys::degree_mu();
  cfg.x0 = refsys::default_x0();
  cfg.issf_r = refsys::issf_offset_r();
  return cfg;
}

}  // namespace homctl
