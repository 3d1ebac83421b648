#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "glap/vec.hpp"

namespace glap {

// splitmix64 output function (Steele, Lea & Flood; constants as in Vigna's
// reference implementation): z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
// z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31. It is a bijection on
// 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seed for replication `replication` of an experiment with master seed
// `master`: mix64(master + (replication + 1) * 0x9E3779B97F4A7C15).
// The golden-ratio increment is odd, so for a fixed master distinct
// replications map to distinct pre-images and hence distinct seeds.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication) {
  return mix64(master + (replication + 1) * 0x9E3779B97F4A7C15ULL);
}

// Thin wrapper around mt19937_64 with platform-independent conversions; the
// standard distributions are implementation-defined, so they are avoided.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform point in the closed unit ball of R^d by rejection from the cube.
  Vec unit_ball(std::size_t dim) {
    Vec v(dim);
    for (;;) {
      double r2 = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        v[i] = uniform(-1.0, 1.0);
        r2 += v[i] * v[i];
      }
      if (r2 <= 1.0) return v;
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace glap
