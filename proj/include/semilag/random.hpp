#pragma once

#include <cstdint>
#include <random>

namespace semilag {

/// Seeded RNG with a fixed uniform mapping. std::uniform_real_distribution
/// is implementation-defined, so sampling goes through the raw 64-bit
/// stream to keep audits and property tests reproducible everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double unit() { return (gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  std::uint64_t bits() { return gen_(); }

  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) { return n ? gen_() % n : 0; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace semilag
