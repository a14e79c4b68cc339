#pragma once

// Deterministic low-discrepancy sampling helpers (internal).

#include <cstdint>
#include <vector>

#include "homctl/numerics.hpp"

namespace homctl::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Uniform value in [-1, 1], a pure function of (seed, bin, component).
inline double hash_uniform(std::uint64_t seed, std::uint64_t bin, int component) {
  const std::uint64_t h =
      splitmix64(seed ^ splitmix64(bin * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(component)));
  return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

inline double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
  }
  return r;
}

inline constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

/// Standard-normal vector from Halton coordinates (Box-Muller on prime pairs).
Vector halton_gaussian(std::uint64_t index, int dim);

/// Sequence index offset derived from a seed (rotates the Halton sequence).
inline std::uint64_t seed_offset(std::uint64_t seed) {
  return 1 + (seed % 1000003ULL) * 7919ULL;
}

/// count points on the weighted unit sphere {x : x^T P x = 1}.
std::vector<Vector> weighted_sphere_samples(const Matrix& weight, int count,
                                            std::uint64_t seed);

/// count points in the weighted unit ball.
std::vector<Vector> weighted_ball_samples(const Matrix& weight, int count,
                                          std::uint64_t seed);

}  // namespace homctl::detail
