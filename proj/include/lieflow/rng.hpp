#pragma once
#include <cstdint>

#include "lieflow/rational.hpp"

namespace lieflow {

/// splitmix64: tiny, deterministic across platforms, good enough for sampling
/// test points.  Each sample index gets its own stream so results do not
/// depend on thread scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0,1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Inclusive integer range.
  long uniform_int(long lo, long hi) {
    return lo + static_cast<long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  /// Random rational in [-1,1]: p/q with q in 1..8, p in -q..q.
  Rational rational_pm1() {
    long q = uniform_int(1, 8);
    long p = uniform_int(-q, q);
    return rat(p, q);
  }

  /// Independent stream derived from (seed, index).
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    Rng mix(seed ^ (0x632be59bd9b4e019ull * (index + 1)));
    mix.next();
    return mix;
  }

 private:
  std::uint64_t state_;
};

}  // namespace lieflow
