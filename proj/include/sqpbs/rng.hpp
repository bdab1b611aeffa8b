#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sqpbs {

/// Deterministic random stream backed by std::mt19937_64.
///
/// Every derived quantity (uniform doubles, bounded integers, bits) is
/// computed here from raw 64-bit words rather than through the standard
/// distributions, whose output is implementation-defined. Identical seeds
/// therefore produce identical sequences on every conforming toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  int bit() { return static_cast<int>(next_u64() >> 63); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Seed for an independent stream, derived by SplitMix64 mixing.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle of [0, size).
std::vector<std::size_t> random_permutation(std::size_t size, Rng& rng);

/// Mask with exactly `count` true entries, uniform over all such masks.
std::vector<bool> random_subset_mask(std::size_t total, std::size_t count, Rng& rng);

}  // namespace sqpbs
