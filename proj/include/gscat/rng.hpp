#pragma once
// Seedable, splittable random number generation with a pinned algorithm
// identity: std::mt19937_64 engines seeded through SplitMix64, uniform doubles
// as (x >> 11) * 2^-53, Gaussians by the Marsaglia polar method. Sequences are
// reproducible bit-for-bit across runs for a given (seed, stream) pair.
// std::normal_distribution is deliberately avoided: its algorithm is
// implementation-defined.

#include <cmath>
#include <cstdint>
#include <random>

namespace gscat {

// SplitMix64 finalizer; decorrelates nearby seeds and stream ids.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Independent stream derived from (seed, stream); used one-per-walk-chain so
  // that a chain's draws do not depend on which window or thread touches it.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(splitmix64(seed) ^ splitmix64(stream_id * 0x9e3779b97f4a7c15ull + 1));
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (lo, hi].
  double uniform(double lo, double hi) { return hi - (hi - lo) * uniform(); }

  // Standard normal, Marsaglia polar method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t bits() { return engine_(); }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection to keep the draw unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gscat
