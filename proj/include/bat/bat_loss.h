// bat/include/bat/bat_loss.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_BAT_LOSS_H_
#define BAT_BAT_LOSS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "bat/lattice.h"
#include "bat/memory.h"

namespace bat {

// Per-frame band of label rows [starts[t], starts[t] + width - 1].
//
// Normally width = r_d + r_u + 2. When that would cover every row (width >=
// U+1) the band degenerates to the full lattice: width = U+1, all starts 0.
struct BandWindow {
  std::vector<int64_t> starts;
  int64_t width = 1;
  int64_t num_labels = 0;  // U
  int32_t r_d = 0;
  int32_t r_u = 0;

  int64_t NumFrames() const { return static_cast<int64_t>(starts.size()); }
  bool Contains(int64_t t, int64_t u) const {
    return u >= starts[t] && u < starts[t] + width;
  }
  bool IsFullCover() const { return width == num_labels + 1; }
};

// Band width for the given radii, before degeneration to the full lattice.
inline int64_t BandWidth(int32_t r_d, int32_t r_u) {
  return static_cast<int64_t>(r_d) + r_u + 2;
}

// Builds the window around a boundary sequence C (one entry per frame):
//
//   o_t = clamp(C_t - r_d, 0, U+1-S), then o_1 = 0, a forward sweep keeping
//   0 <= o_t - o_{t-1} <= 1, o_T = U+1-S, and a backward sweep raising
//   o_t to at least o_{t+1} - 1.
//
// The endpoint forcing guarantees an in-band path from (0, 0) to (T-1, U).
// Throws kBandInfeasible when U > T + r_d + r_u.
BandWindow BuildWindow(std::span<const int64_t> boundary, int64_t num_labels,
                       int32_t r_d, int32_t r_u);

// Wraps externally supplied window starts (e.g. from a file); validates them.
BandWindow MakeWindow(std::vector<int64_t> starts, int64_t width,
                      int64_t num_labels);

// Throws kInvalidWindow if any BandWindow invariant is violated.
void ValidateWindow(const BandWindow &window);

// Log-probs stored only inside the band: shape (T, S, V+1), where row (t, j)
// holds u = starts[t] + j. Rows outside the band carry probability 0 and are
// never materialized.
template <typename Real>
struct BandedLattice {
  BandWindow window;
  Tensor<Real> log_probs;

  int64_t NumFrames() const { return log_probs.Dim(0); }
  int64_t NumSymbols() const { return log_probs.Dim(2); }
};

template <typename Real>
BandedLattice<Real> GatherBand(const LogitLattice<Real> &full,
                               const BandWindow &window);

// Writes a banded (T, S, V+1) tensor into a zero (T, U+1, V+1) tensor.
template <typename Real>
Tensor<Real> ScatterBand(const Tensor<Real> &banded, const BandWindow &window);

// Banded alpha/beta, both (T, S) in the banded row layout.
template <typename Real>
Tensor<double> BatForward(const BandedLattice<Real> &lattice,
                          const LabelSeq &labels);
template <typename Real>
Tensor<double> BatBackward(const BandedLattice<Real> &lattice,
                           const LabelSeq &labels);

// Transducer loss restricted to the band. The gradient has the banded
// (T, S, V+1) layout. Out-of-band transitions contribute probability 0; a
// band with no surviving path yields loss = +inf, feasible = false.
template <typename Real>
LossResult<Real> BatLoss(const BandedLattice<Real> &lattice,
                         const LabelSeq &labels,
                         MemoryTracker *tracker = nullptr);

}  // namespace bat

#endif  // BAT_BAT_LOSS_H_
