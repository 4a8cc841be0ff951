#pragma once

// Deterministic random streams. The engine is std::mt19937_64 (bit-exact per
// the standard); all distribution transforms are hand-rolled so draws are
// reproducible across standard libraries. Streams for parallel replications
// are derived from a base seed with a SplitMix64 mix, so results never depend
// on scheduling.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "sarcv/common.hpp"

namespace sarcv {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Seed of stream `stream` under base seed `base` (stream 0 != base).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return mix64(base ^ mix64(stream + 0x51ed2701u));
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0, 1); 53 bits, never exactly 0 or 1.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal, Box-Muller with one cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double exponential(double mean) {
    require(mean > 0.0, "exponential: mean must be positive");
    return -mean * std::log(uniform());
  }

  // Knuth's product method; chunked so the running product never underflows.
  int poisson(double mean) {
    require(mean >= 0.0, "poisson: mean must be nonnegative");
    int count = 0;
    while (mean > 40.0) {
      count += poisson_small(40.0);
      mean -= 40.0;
    }
    return count + poisson_small(mean);
  }

  Vector normal_vector(Index dim) {
    Vector v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = normal();
    return v;
  }

  Vector unit_sphere(Index dim) {
    Vector v = normal_vector(dim);
    double n = v.norm();
    while (n == 0.0) {  // astronomically unlikely; keeps the draw well defined
      v = normal_vector(dim);
      n = v.norm();
    }
    return v / n;
  }

 private:
  int poisson_small(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    int k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sarcv
