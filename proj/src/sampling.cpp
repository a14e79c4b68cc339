#include "sampling.hpp"

#include <cmath>

namespace homctl::detail {

Vector halton_gaussian(std::uint64_t index, int dim) {
  Vector g(dim);
  for (int k = 0; k < dim; k += 2) {
    const double u1 = std::max(halton(index, kPrimes[k]), 1e-12);
    const double u2 = halton(index, kPrimes[k + 1]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    g(k) = radius * std::cos(2.0 * M_PI * u2);
    if (k + 1 < dim) g(k + 1) = radius * std::sin(2.0 * M_PI * u2);
  }
  return g;
}

std::vector<Vector> weighted_sphere_samples(const Matrix& weight, int count,
                                            std::uint64_t seed) {
  const int n = static_cast<int>(weight.rows());
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  const std::uint64_t offset = seed_offset(seed);
  for (int i = 0; i < count; ++i) {
    Vector g = halton_gaussian(offset + static_cast<std::uint64_t>(i), n);
    const double wn = std::sqrt(g.dot(weight * g));
    if (wn < 1e-12) continue;
    out.push_back(g / wn);
  }
  return out;
}

std::vector<Vector> weighted_ball_samples(const Matrix& weight, int count,
                                          std::uint64_t seed) {
  const int n = static_cast<int>(weight.rows());
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  const std::uint64_t offset = seed_offset(seed ^ 0x5bd1e995ULL);
  const int radius_base = kPrimes[((n + 1) / 2) * 2];  // first unused prime
  for (int i = 0; i < count; ++i) {
    const std::uint64_t idx = offset + static_cast<std::uint64_t>(i);
    Vector g = halton_gaussian(idx, n);
    const double wn = std::sqrt(g.dot(weight * g));
    if (wn < 1e-12) continue;
    const double r = std::pow(halton(idx, radius_base), 1.0 / n);
    out.push_back((r / wn) * g);
  }
  return out;
}

}  // namespace homctl::detail
