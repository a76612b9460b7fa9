// bat/src/rnnt_loss.cc
//
// Copyright (c)  2026  bat-lattice authors

#include "bat/rnnt_loss.h"

#include <cmath>
#include <string>

#include "bat/log_math.h"

namespace bat {

template <typename Real>
void CheckLatticeLabels(const LogitLattice<Real> &lattice,
                        const LabelSeq &labels) {
  if (lattice.NumRows() != labels.size() + 1)
    Throw(ErrorCode::kDimMismatch,
          "lattice has " + std::to_string(lattice.NumRows()) +
              " label rows but the label sequence needs " +
              std::to_string(labels.size() + 1));
  labels.CheckVocab(lattice.NumSymbols() - 1);
}

template <typename Real>
Tensor<double> RnntForward(const LogitLattice<Real> &lattice,
                           const LabelSeq &labels) {
  CheckLatticeLabels(lattice, labels);
  const auto &lp = lattice.log_probs();
  const int64_t T = lattice.NumFrames();
  const int64_t U = labels.size();

  Tensor<double> alpha({T, U + 1}, kNegInf);
  alpha(0, 0) = 0;
  for (int64_t u = 1; u <= U; ++u)
    alpha(0, u) = alpha(0, u - 1) + lp(0, u - 1, labels[u - 1]);

  for (int64_t t = 1; t < T; ++t) {
    alpha(t, 0) = alpha(t - 1, 0) + lp(t - 1, 0, kBlank);
    for (int64_t u = 1; u <= U; ++u) {
      double no_emit = alpha(t - 1, u) + lp(t - 1, u, kBlank);
      double emit = alpha(t, u - 1) + lp(t, u - 1, labels[u - 1]);
      alpha(t, u) = LogSumExp(no_emit, emit);
    }
  }
  return alpha;
}

template <typename Real>
Tensor<double> RnntBackward(const LogitLattice<Real> &lattice,
                            const LabelSeq &labels) {
  CheckLatticeLabels(lattice, labels);
  const auto &lp = lattice.log_probs();
  const int64_t T = lattice.NumFrames();
  const int64_t U = labels.size();

  Tensor<double> beta({T, U + 1}, kNegInf);
  beta(T - 1, U) = lp(T - 1, U, kBlank);
  for (int64_t u = U - 1; u >= 0; --u)
    beta(T - 1, u) = beta(T - 1, u + 1) + lp(T - 1, u, labels[u]);

  for (int64_t t = T - 2; t >= 0; --t) {
    beta(t, U) = beta(t + 1, U) + lp(t, U, kBlank);
    for (int64_t u = U - 1; u >= 0; --u) {
      double no_emit = beta(t + 1, u) + lp(t, u, kBlank);
      double emit = beta(t, u + 1) + lp(t, u, labels[u]);
      beta(t, u) = LogSumExp(no_emit, emit);
    }
  }
  return beta;
}

template <typename Real>
LossResult<Real> RnntLoss(const LogitLattice<Real> &lattice,
                          const LabelSeq &labels, MemoryTracker *tracker) {
  const int64_t T = lattice.NumFrames();
  const int64_t U = labels.size();
  TrackedBytes recursion_bytes(tracker, 2 * sizeof(double) * T * (U + 1));

  Tensor<double> alpha = RnntForward(lattice, labels);
  Tensor<double> beta = RnntBackward(lattice, labels);
  const auto &lp = lattice.log_probs();

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
    for (int64_t u = 0; u <= U; ++u) {
      const double a = alpha(t, u);
      if (a == kNegInf) continue;
      if (t + 1 < T) {
        grad(t, u, kBlank) = static_cast<Real>(
            -std::exp(a + beta(t + 1, u) + lp(t, u, kBlank) - log_z));
      } else if (u == U) {
        // Terminal blank: beta(T, U) is taken as log 1.
        grad(t, u, kBlank) =
            static_cast<Real>(-std::exp(a + lp(t, u, kBlank) - log_z));
      }
      if (u < U) {
        const int32_t y = labels[u];
        grad(t, u, y) = static_cast<Real>(
            -std::exp(a + beta(t, u + 1) + lp(t, u, y) - log_z));
      }
    }
  }
  return result;
}

#define BAT_INSTANTIATE(Real)                                                \
  template void CheckLatticeLabels(const LogitLattice<Real> &,               \
                                   const LabelSeq &);                        \
  template Tensor<double> RnntForward(const LogitLattice<Real> &,            \
                                      const LabelSeq &);                     \
  template Tensor<double> RnntBackward(const LogitLattice<Real> &,           \
                                       const LabelSeq &);                    \
  template LossResult<Real> RnntLoss(const LogitLattice<Real> &,             \
                                     const LabelSeq &, MemoryTracker *);

BAT_INSTANTIATE(float)
BAT_INSTANTIATE(double)

#undef BAT_INSTANTIATE

}  // namespace bat
