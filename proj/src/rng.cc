// bat/src/rng.cc
//
// Copyright (c)  2026  bat-lattice authors

#include "bat/rng.h"

#include <cmath>
#include <numbers>

namespace bat {

namespace {
constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
}

uint64_t Rng::Mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng Rng::Split(uint64_t stream) const {
  return Rng(FromKey{}, Mix(key_ ^ Mix(stream + kGamma)));
}

uint64_t Rng::NextU64() {
  ++counter_;
  return Mix(key_ + counter_ * kGamma);
}

double Rng::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

int64_t Rng::UniformInt(int64_t lo, int64_t hi) {
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<int64_t>(NextU64());
  // Rejection sampling keeps the draw unbiased.
  uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  uint64_t r;
  do {
    r = NextU64();
  } while (r >= limit);
  return lo + static_cast<int64_t>(r % span);
}

double Rng::Normal() {
  double u1 = 1.0 - Uniform();  // (0, 1]
  double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace bat
