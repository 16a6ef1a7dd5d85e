#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tesslab {

/// Deterministic random stream. Replicate streams are derived from a master
/// seed by a SplitMix64 scramble so that replicate i is independent of the
/// worker that happens to run it. All variates are generated from raw 64-bit
/// draws (never from std::*_distribution, whose output is
/// implementation-defined), so identical seeds give identical doubles on any
/// platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  static Rng for_replicate(std::uint64_t master, std::uint64_t replicate) {
    return Rng(mix(master + 0x9E3779B97F4A7C15ULL * (replicate + 1)));
  }

  std::uint64_t raw() { return gen_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(raw() >> 11) * 0x1.0p-53; }

  /// Uniform on [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform angle in [0, 2*pi).
  double angle() { return uniform() * 6.283185307179586476925286766559; }

  /// Exact Poisson variate. Knuth's product method for small means; larger
  /// means are split in two, which is distribution-exact by superposition.
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 30.0) {
      const double half = 0.5 * mean;
      return poisson(half) + poisson(mean - half);
    }
    const double limit = std::exp(-mean);
    int k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

  /// Exponential variate with the given rate.
  double exponential(double rate) {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return -std::log1p(-u) / rate;
  }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
  }

  std::mt19937_64 gen_;
};

}  // namespace tesslab
