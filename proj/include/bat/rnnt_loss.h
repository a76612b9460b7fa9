// bat/include/bat/rnnt_loss.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_RNNT_LOSS_H_
#define BAT_RNNT_LOSS_H_

#include "bat/lattice.h"
#include "bat/memory.h"

namespace bat {

/*
  Full-lattice transducer loss. Frames are 0-based here: alpha(0, 0) = 0 and
  the terminal blank leaves from (T-1, U).

    alpha(t, u) = lse(alpha(t-1, u) + blank(t-1, u),
                      alpha(t, u-1) + label(t, u-1))
    beta(t, u)  = lse(beta(t+1, u) + blank(t, u),
                      beta(t, u+1) + label(t, u))
    beta(T-1, U) = blank(T-1, U)

  where label(t, u) is the log-prob of y_{u+1} at (t, u).
 */

// Returns alpha as a (T, U+1) tensor of log-probabilities.
template <typename Real>
Tensor<double> RnntForward(const LogitLattice<Real> &lattice,
                           const LabelSeq &labels);

// Returns beta as a (T, U+1) tensor; beta(0, 0) is the total log-likelihood.
template <typename Real>
Tensor<double> RnntBackward(const LogitLattice<Real> &lattice,
                            const LabelSeq &labels);

// Loss and gradient w.r.t. every log-prob entry. Entries that are neither the
// blank nor the next label at (t, u) get zero gradient. When no path has
// nonzero probability, returns loss = +inf, feasible = false, zero gradient.
//
// If `tracker` is given, the alpha/beta buffers are accounted against it.
template <typename Real>
LossResult<Real> RnntLoss(const LogitLattice<Real> &lattice,
                          const LabelSeq &labels,
                          MemoryTracker *tracker = nullptr);

// Throws kDimMismatch unless the lattice has U+1 rows for `labels`.
template <typename Real>
void CheckLatticeLabels(const LogitLattice<Real> &lattice,
                        const LabelSeq &labels);

}  // namespace bat

#endif  // BAT_RNNT_LOSS_H_
