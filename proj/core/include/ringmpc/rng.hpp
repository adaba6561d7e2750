#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ringmpc {

/// Deterministic seeded randomness stream. Every source of randomness in the
/// library flows through one of these so that runs are replayable from a seed.
/// fork() derives an independent child stream, letting each protocol party
/// own its own tape.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  /// Uniform value in [0, n) by rejection sampling. n must be positive.
  uint64_t below(uint64_t n);

  /// Uniform bit.
  int bit() { return static_cast<int>(next_u64() >> 63); }

  /// Independent child stream keyed by a tag and an index.
  Rng fork(std::string_view tag, uint64_t index = 0) const;

  uint64_t seed() const { return seed_; }

 private:
  uint64_t seed_;
  std::mt19937_64 gen_;
};

/// SplitMix64 finalizer, used for seed expansion and tag mixing.
uint64_t mix64(uint64_t x);

}  // namespace ringmpc
