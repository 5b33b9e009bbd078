#pragma once

#include <cstdint>
#include <random>

namespace spreach {

/// Seeded generator with a platform-independent uniform double.
/// std::uniform_real_distribution is implementation-defined, so uniform()
/// maps the raw 64-bit stream to [0,1) by hand; outputs are reproducible
/// across standard libraries for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0,1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Derive an independent stream id from a base seed and indices.
  /// splitmix64 finalizer; stable across platforms.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t x = seed;
    x ^= a + 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x ^= b + 0x94d049bb133111ebull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace spreach
