// bat/src/lattice.cc
//
// Copyright (c)  2026  bat-lattice authors

#include "bat/lattice.h"

#include <string>

namespace bat {

LabelSeq::LabelSeq(std::vector<int32_t> tokens) : tokens_(std::move(tokens)) {
  for (int32_t y : tokens_)
    if (y <= kBlank)
      Throw(ErrorCode::kInvalidInput,
            "label sequence contains blank or negative id " + std::to_string(y));
}

void LabelSeq::CheckVocab(int64_t vocab) const {
  for (int32_t y : tokens_)
    if (y > vocab)
      Throw(ErrorCode::kInvalidInput, "label id " + std::to_string(y) +
                                          " exceeds vocabulary size " +
                                          std::to_string(vocab));
}

LabelSeq LabelSeq::FromTensor(const Tensor<int64_t> &t) {
  if (t.NumAxes() != 1)
    Throw(ErrorCode::kDimMismatch, "labels must be a 1-D tensor");
  std::vector<int32_t> tokens;
  tokens.reserve(t.NumElements());
  for (int64_t v : t.Data()) tokens.push_back(static_cast<int32_t>(v));
  return LabelSeq(std::move(tokens));
}

Tensor<int64_t> LabelSeq::ToTensor() const {
  std::vector<int64_t> data(tokens_.begin(), tokens_.end());
  return Tensor<int64_t>({size()}, std::move(data));
}

template <typename Real>
LogitLattice<Real>::LogitLattice(Tensor<Real> log_probs)
    : log_probs_(std::move(log_probs)) {
  if (log_probs_.NumAxes() != 3)
    Throw(ErrorCode::kDimMismatch, "lattice must have shape (T, U+1, V+1)");
  if (log_probs_.Dim(0) < 1 || log_probs_.Dim(1) < 1 || log_probs_.Dim(2) < 2)
    Throw(ErrorCode::kDimMismatch,
          "lattice needs T >= 1, U+1 >= 1 and at least one non-blank symbol");
}

template class LogitLattice<float>;
template class LogitLattice<double>;

}  // namespace bat
