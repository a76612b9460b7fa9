// bat/include/bat/lattice.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_LATTICE_H_
#define BAT_LATTICE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "bat/tensor.h"

namespace bat {

inline constexpr int32_t kBlank = 0;

// Target token ids y_1..y_U, each in [1, V]. Blank (0) is rejected.
class LabelSeq {
 public:
  LabelSeq() = default;
  explicit LabelSeq(std::vector<int32_t> tokens);

  int64_t size() const { return static_cast<int64_t>(tokens_.size()); }
  bool empty() const { return tokens_.empty(); }
  int32_t operator[](int64_t u) const { return tokens_[u]; }
  const std::vector<int32_t> &tokens() const { return tokens_; }

  // Throws kInvalidInput if any token exceeds `vocab` (non-blank count).
  void CheckVocab(int64_t vocab) const;

  static LabelSeq FromTensor(const Tensor<int64_t> &t);
  Tensor<int64_t> ToTensor() const;

  bool operator==(const LabelSeq &) const = default;

 private:
  std::vector<int32_t> tokens_;
};

// Normalized log-probabilities of shape (T, U+1, V+1); column 0 is blank.
template <typename Real>
class LogitLattice {
 public:
  explicit LogitLattice(Tensor<Real> log_probs);

  int64_t NumFrames() const { return log_probs_.Dim(0); }
  int64_t NumRows() const { return log_probs_.Dim(1); }
  int64_t NumSymbols() const { return log_probs_.Dim(2); }

  const Tensor<Real> &log_probs() const { return log_probs_; }
  Tensor<Real> &log_probs() { return log_probs_; }

 private:
  Tensor<Real> log_probs_;
};

template <typename Real>
struct LossResult {
  double loss = 0;            // -log Pr(y|x), nats; +inf when infeasible
  double log_likelihood = 0;  // log Pr(y|x)
  bool feasible = true;
  Tensor<Real> grad;  // d loss / d log-prob, same layout as the input
};

}  // namespace bat

#endif  // BAT_LATTICE_H_
