// bat/include/bat/rng.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_RNG_H_
#define BAT_RNG_H_

#include <cstdint>

namespace bat {

// Counter-based generator: output i is a SplitMix64 finalizer applied to
// key + i * gamma. Split() derives an independent stream from the key, so
// results never depend on how many numbers a sibling stream consumed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : key_(Mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  Rng Split(uint64_t stream) const;

  uint64_t NextU64();
  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [lo, hi] inclusive.
  int64_t UniformInt(int64_t lo, int64_t hi);
  // Standard normal via Box-Muller; two uniforms per call, no caching.
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

  uint64_t counter() const { return counter_; }

  static uint64_t Mix(uint64_t z);

 private:
  struct FromKey {};
  Rng(FromKey, uint64_t key) : key_(key) {}

  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace bat

#endif  // BAT_RNG_H_
