// bat/src/bat_loss.cc
//
// Copyright (c)  2026  bat-lattice authors

#include "bat/bat_loss.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bat/log_math.h"

namespace bat {

BandWindow BuildWindow(std::span<const int64_t> boundary, int64_t num_labels,
                       int32_t r_d, int32_t r_u) {
  const int64_t T = static_cast<int64_t>(boundary.size());
  const int64_t U = num_labels;
  if (T < 1) Throw(ErrorCode::kDimMismatch, "boundary sequence is empty");
  if (r_d < 0 || r_u < 0 || U < 0)
    Throw(ErrorCode::kInvalidInput, "band radii and U must be nonnegative");
  if (U > T + r_d + r_u)
    Throw(ErrorCode::kBandInfeasible,
          "band infeasible: U=" + std::to_string(U) + " > T+R_d+R_u=" +
              std::to_string(T + r_d + r_u));

  BandWindow w;
  w.num_labels = U;
  w.r_d = r_d;
  w.r_u = r_u;
  const int64_t S = BandWidth(r_d, r_u);
  if (S >= U + 1) {
    w.width = U + 1;
    w.starts.assign(T, 0);
    return w;
  }
  w.width = S;
  const int64_t max_start = U + 1 - S;
  auto &o = w.starts;
  o.resize(T);
  for (int64_t t = 0; t < T; ++t)
    o[t] = std::clamp<int64_t>(boundary[t] - r_d, 0, max_start);
  o[0] = 0;
  for (int64_t t = 1; t < T; ++t)
    o[t] = std::clamp<int64_t>(o[t], o[t - 1], o[t - 1] + 1);
  o[T - 1] = max_start;
  for (int64_t t = T - 2; t >= 0; --t) o[t] = std::max(o[t], o[t + 1] - 1);
  return w;
}

void ValidateWindow(const BandWindow &w) {
  const int64_t T = w.NumFrames();
  const int64_t U = w.num_labels;
  auto fail = [](const std::string &why) {
    Throw(ErrorCode::kInvalidWindow, "invalid band window: " + why);
  };
  if (T < 1) fail("no frames");
  if (w.width < 1 || w.width > U + 1) fail("width out of range");
  if (w.width < 2 && !w.IsFullCover()) fail("width < 2 admits no label step");
  if (w.starts[0] != 0) fail("first window must start at row 0");
  if (w.starts[T - 1] != std::max<int64_t>(0, U + 1 - w.width))
    fail("last window must end at row U");
  for (int64_t t = 1; t < T; ++t) {
    int64_t step = w.starts[t] - w.starts[t - 1];
    if (step < 0 || step > 1) fail("window starts must step by 0 or 1");
  }
  for (int64_t t = 0; t < T; ++t)
    if (w.starts[t] + w.width - 1 > U) fail("window exceeds row U");
}

BandWindow MakeWindow(std::vector<int64_t> starts, int64_t width,
                      int64_t num_labels) {
  BandWindow w;
  w.starts = std::move(starts);
  w.width = width;
  w.num_labels = num_labels;
  // Radii are not recoverable from the starts; record the symmetric split.
  int64_t radii = std::max<int64_t>(0, width - 2);
  w.r_d = static_cast<int32_t>(radii / 2);
  w.r_u = static_cast<int32_t>(radii - radii / 2);
  ValidateWindow(w);
  return w;
}

template <typename Real>
BandedLattice<Real> GatherBand(const LogitLattice<Real> &full,
                               const BandWindow &window) {
  ValidateWindow(window);
  const int64_t T = full.NumFrames();
  const int64_t V1 = full.NumSymbols();
  if (window.NumFrames() != T || full.NumRows() != window.num_labels + 1)
    Throw(ErrorCode::kDimMismatch, "window does not match lattice shape");
  BandedLattice<Real> banded;
  banded.window = window;
  banded.log_probs = Tensor<Real>({T, window.width, V1});
  for (int64_t t = 0; t < T; ++t)
    for (int64_t j = 0; j < window.width; ++j) {
      auto src = full.log_probs().Row(t, window.starts[t] + j);
      std::copy(src.begin(), src.end(), banded.log_probs.Row(t, j).begin());
    }
  return banded;
}

template <typename Real>
Tensor<Real> ScatterBand(const Tensor<Real> &banded, const BandWindow &window) {
  ValidateWindow(window);
  if (banded.NumAxes() != 3 || banded.Dim(0) != window.NumFrames() ||
      banded.Dim(1) != window.width)
    Throw(ErrorCode::kDimMismatch, "banded tensor does not match window");
  const int64_t T = banded.Dim(0);
  const int64_t V1 = banded.Dim(2);
  Tensor<Real> full({T, window.num_labels + 1, V1}, Real(0));
  for (int64_t t = 0; t < T; ++t)
    for (int64_t j = 0; j < window.width; ++j) {
      auto src = banded.Row(t, j);
      std::copy(src.begin(), src.end(),
                full.Row(t, window.starts[t] + j).begin());
    }
  return full;
}

namespace {

template <typename Real>
void CheckBanded(const BandedLattice<Real> &lattice, const LabelSeq &labels) {
  const auto &w = lattice.window;
  ValidateWindow(w);
  const auto &lp = lattice.log_probs;
  if (lp.NumAxes() != 3 || lp.Dim(0) != w.NumFrames() || lp.Dim(1) != w.width ||
      lp.Dim(2) < 2)
    Throw(ErrorCode::kDimMismatch, "banded lattice must have shape (T, S, V+1)");
  if (labels.size() != w.num_labels)
    Throw(ErrorCode::kDimMismatch,
          "window was built for U=" + std::to_string(w.num_labels) +
              " but the label sequence has " + std::to_string(labels.size()));
  labels.CheckVocab(lp.Dim(2) - 1);
}

}  // namespace

template <typename Real>
Tensor<double> BatForward(const BandedLattice<Real> &lattice,
                          const LabelSeq &labels) {
  CheckBanded(lattice, labels);
  const auto &lp = lattice.log_probs;
  const auto &o = lattice.window.starts;
  const int64_t T = lattice.NumFrames();
  const int64_t R = lattice.window.width;

  Tensor<double> alpha({T, R}, kNegInf);
  alpha(0, 0) = 0;
  for (int64_t j = 1; j < R; ++j)
    alpha(0, j) = alpha(0, j - 1) + lp(0, j - 1, labels[j - 1]);

  for (int64_t t = 1; t < T; ++t) {
    // Row j at frame t is row j + shift at frame t-1.
    const int64_t shift = o[t] - o[t - 1];
    for (int64_t j = 0; j < R; ++j) {
      const int64_t u = o[t] + j;
      double no_emit = kNegInf;
      if (j + shift < R)
        no_emit = alpha(t - 1, j + shift) + lp(t - 1, j + shift, kBlank);
      double emit = kNegInf;
      if (j > 0) emit = alpha(t, j - 1) + lp(t, j - 1, labels[u - 1]);
      alpha(t, j) = LogSumExp(no_emit, emit);
    }
  }
  return alpha;
}

template <typename Real>
Tensor<double> BatBackward(const BandedLattice<Real> &lattice,
                           const LabelSeq &labels) {
  CheckBanded(lattice, labels);
  const auto &lp = lattice.log_probs;
  const auto &o = lattice.window.starts;
  const int64_t T = lattice.NumFrames();
  const int64_t R = lattice.window.width;

  Tensor<double> beta({T, R}, kNegInf);
  beta(T - 1, R - 1) = lp(T - 1, R - 1, kBlank);
  for (int64_t j = R - 2; j >= 0; --j)
    beta(T - 1, j) =
        beta(T - 1, j + 1) + lp(T - 1, j, labels[o[T - 1] + j]);

  for (int64_t t = T - 2; t >= 0; --t) {
    // Row j at frame t is row j - shift at frame t+1.
    const int64_t shift = o[t + 1] - o[t];
    for (int64_t j = R - 1; j >= 0; --j) {
      double no_emit = kNegInf;
      if (j - shift >= 0)
        no_emit = beta(t + 1, j - shift) + lp(t, j, kBlank);
      double emit = kNegInf;
      if (j + 1 < R) emit = beta(t, j + 1) + lp(t, j, labels[o[t] + j]);
      beta(t, j) = LogSumExp(no_emit, emit);
    }
  }
  return beta;
}

template <typename Real>
LossResult<Real> BatLoss(const BandedLattice<Real> &lattice,
                         const LabelSeq &labels, MemoryTracker *tracker) {
  const int64_t T = lattice.NumFrames();
  const int64_t R = lattice.window.width;
  TrackedBytes recursion_bytes(tracker, 2 * sizeof(double) * T * R);

  Tensor<double> alpha = BatForward(lattice, labels);
  Tensor<double> beta = BatBackward(lattice, labels);
  const auto &lp = lattice.log_probs;
  const auto &o = lattice.window.starts;

  LossResult<Real> result;
  result.grad = Tensor<Real>(lp.Dims(), Real(0));
  const double log_z = beta(0, 0);
  result.log_likelihood = log_z;
  if (log_z == kNegInf || std::isnan(log_z)) {
    result.loss = std::numeric_limits<double>::infinity();
    result.feasible = false;
    return result;
  }
  result.loss = -log_z;

  auto &grad = result.grad;
  for (int64_t t = 0; t < T; ++t) {
    const int64_t shift = t + 1 < T ? o[t + 1] - o[t] : 0;
    for (int64_t j = 0; j < R; ++j) {
      const double a = alpha(t, j);
      if (a == kNegInf) continue;
      if (t + 1 < T) {
        if (j - shift >= 0)
          grad(t, j, kBlank) = static_cast<Real>(-std::exp(
              a + beta(t + 1, j - shift) + lp(t, j, kBlank) - log_z));
      } else if (j == R - 1) {
        grad(t, j, kBlank) =
            static_cast<Real>(-std::exp(a + lp(t, j, kBlank) - log_z));
      }
      if (j + 1 < R) {
        const int32_t y = labels[o[t] + j];
        grad(t, j, y) = static_cast<Real>(
            -std::exp(a + beta(t, j + 1) + lp(t, j, y) - log_z));
      }
    }
  }
  return result;
}

#define BAT_INSTANTIATE(Real)                                                \
  template BandedLattice<Real> GatherBand(const LogitLattice<Real> &,        \
                                          const BandWindow &);               \
  template Tensor<Real> ScatterBand(const Tensor<Real> &, const BandWindow &); \
  template Tensor<double> BatForward(const BandedLattice<Real> &,            \
                                     const LabelSeq &);                      \
  template Tensor<double> BatBackward(const BandedLattice<Real> &,           \
                                      const LabelSeq &);                     \
  template LossResult<Real> BatLoss(const BandedLattice<Real> &,             \
                                    const LabelSeq &, MemoryTracker *);

BAT_INSTANTIATE(float)
BAT_INSTANTIATE(double)

#undef BAT_INSTANTIATE

}  // namespace bat
