#include "homctl/artifact.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace homctl {

namespace {

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s = buf;
  // Keep the document valid JSON.
  if (s == "inf") s = "1e308";
  if (s == "-inf") s = "-1e308";
  return s;
}

void write_matrix(std::ostream& out, const char* name, const Matrix& m, bool comma = true) {
  out << "  \"" << name << "\": {\"rows\": " << m.rows() << ", \"cols\": " << m.cols()
      << ", \"data\": [";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i + j > 0) out << ", ";
      out << number(m(i, j));
    }
  }
  out << "]}" << (comma ? "," : "") << "\n";
}

Matrix read_matrix(const nlohmann::json& j, const char* name) {
  if (!j.contains(name)) {
    throw std::invalid_argument(std::string("artifact: missing matrix ") + name);
  }
  const auto& mj = j.at(name);
  const Eigen::Index rows = mj.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = mj.at("cols").get<Eigen::Index>();
  const auto data = mj.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols || rows < 1 || cols < 1) {
    throw std::invalid_argument(std::string("artifact: bad dimensions for ") + name);
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = data[static_cast<std::size_t>(i * cols + j)];
    }
  }
  return m;
}

}  // namespace

void save_controller(const HomogeneousController& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_controller: cannot open " + path);
  }
  out << "{\n";
  out << "  \"format\": \"homctl-controller/1\",\n";
  write_matrix(out, "A", c.plant.A);
  write_matrix(out, "B", c.plant.B);
  write_matrix(out, "K", c.K);
  write_matrix(out, "K0", c.K0);
  write_matrix(out, "G0", c.G0);
  write_matrix(out, "Y0", c.Y0);
  write_matrix(out, "Gd", c.dilation.generator);
  write_matrix(out, "P", c.dilation.weight);
  out << "  \"mu\": " << number(c.mu) << ",\n";
  out << "  \"mu_range\": [" << number(c.mu_lower) << ", 0],\n";
  out << "  \"tau_min\": " << number(c.tau_min) << "\n";
  out << "}\n";
}

HomogeneousController load_controller(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_controller: cannot open " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("load_controller: parse error: ") + e.what());
  }
  HomogeneousController c;
  c.plant.A = read_matrix(j, "A");
  c.plant.B = read_matrix(j, "B");
  validate_plant(c.plant);
  c.K = read_matrix(j, "K");
  c.K0 = read_matrix(j, "K0");
  c.G0 = read_matrix(j, "G0");
  c.Y0 = read_matrix(j, "Y0");
  const Matrix gd = read_matrix(j, "Gd");
  const Matrix p = read_matrix(j, "P");
  if (!j.contains("mu")) {
    throw std::invalid_argument("load_controller: missing mu");
  }
  c.mu = j.at("mu").get<double>();
  if (j.contains("mu_range")) {
    c.mu_lower = j.at("mu_range").at(0).get<double>();
  }
  if (j.contains("tau_min")) {
    c.tau_min = j.at("tau_min").get<double>();
  }
  const int n = c.plant.dim();
  if (c.K.cols() != n || c.K0.cols() != n || c.K.rows() != c.plant.inputs() ||
      c.G0.rows() != n || c.G0.cols() != n) {
    throw std::invalid_argument("load_controller: matrix dimensions do not match the plant");
  }
  c.dilation = make_dilation(gd, p);
  return c;
}

}  // namespace homctl
