#pragma once

#include <cstdint>

namespace macp {

/// Independent streams derived from one user seed. Each consumer draws from
/// its own stream so adding draws in one place never shifts another.
enum class RngStream : std::uint64_t {
  kSelection = 1,
  kCoefficientInit = 2,
  kLowRankInit = 3,
  kRandomSpectral = 4,
  kModelWeights = 5,
  kDataset = 6,
};

/// xoshiro256** seeded through splitmix64. Output is identical on every
/// platform for a given seed, which the std:: distributions do not guarantee.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, RngStream stream);

  std::uint64_t next_u64();
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller (no cached second variate).
  double normal();

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace macp
