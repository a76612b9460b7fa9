// bat/include/bat/cif.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_CIF_H_
#define BAT_CIF_H_

#include <cstdint>
#include <span>
#include <vector>

#include "bat/lattice.h"
#include "bat/tensor.h"

namespace bat {

inline constexpr double kCifThreshold = 1.0;
// Scaled weights are capped just below 1 before boundary generation so that
// ceil(cumsum) never jumps by more than one token per frame.
inline constexpr double kCifWeightCap = 1.0 - 1e-6;

// Weight predictor: omega = sigmoid(proj . conv(h) + proj_bias), where conv
// is a full (not depthwise) same-length 1-D convolution over time with
// zero padding.
struct CifParams {
  Tensor<double> conv_weight;  // (D, D, K): [out][in][k], K odd
  Tensor<double> conv_bias;    // (D)
  Tensor<double> proj_weight;  // (D)
  Tensor<double> proj_bias;    // (1)

  static CifParams Zeros(int64_t dim, int64_t kernel);
  int64_t Dim() const { return conv_bias.Dim(0); }
  int64_t KernelWidth() const { return conv_weight.Dim(2); }
};

struct CifWeights {
  std::vector<double> raw;     // in (0, 1)
  std::vector<double> scaled;  // raw * scale_factor
  double scale_factor = 1;     // U / sum(raw)
};

// One contiguous piece of frame `frame`'s weight assigned to token `token`.
// `closes_token` marks the piece that completes the token's threshold (its
// upper end is the fixed value (token+1) * threshold rather than the running
// cumsum); `opens_mid_frame` marks a piece that starts where the previous
// token fired inside the same frame.
struct CifAllocation {
  int64_t frame = 0;
  int64_t token = 0;  // 0-based
  double portion = 0;
  bool closes_token = false;
  bool opens_mid_frame = false;
};

struct FiredEmbeddings {
  Tensor<double> integrated;  // (U, D)
  std::vector<CifAllocation> allocation;
};

// Per-frame raw weights for encoder output h (T, D).
std::vector<double> CifPredictWeights(const Tensor<double> &h,
                                      const CifParams &params);

struct CifPredictGrads {
  CifParams params;     // same shapes as the input params
  Tensor<double> grad_h;  // (T, D)
};

// Backprop of d loss / d raw through sigmoid, projection, and convolution.
CifPredictGrads CifPredictWeightsBackward(const Tensor<double> &h,
                                          const CifParams &params,
                                          std::span<const double> grad_raw);

// scaled_t = raw_t * U / sum(raw). Throws kDegenerateWeights if sum < 1e-8.
CifWeights CifScale(std::span<const double> raw, int64_t num_labels);

// Caps every weight at `cap`, pushing the excess forward (then backward for
// whatever reaches the last frame) so the total is preserved whenever
// T * cap >= total. Weights are not changed when already <= cap.
std::vector<double> ClampScaledWeights(std::span<const double> weights,
                                       double cap = kCifWeightCap);

// C_t = ceil(cumsum(w)_t / threshold), 1-based token index of frame t.
// Cumsums within 1e-9 above an integer are treated as that integer.
std::vector<int64_t> CifBoundary(std::span<const double> weights,
                                 double threshold = kCifThreshold);

// Integrate-and-fire over scaled weights. Produces exactly `num_labels`
// firings; a final token short of the threshold by < 1e-6 (rounding) is
// fired at the end. Throws kFireCountMismatch otherwise.
FiredEmbeddings CifFire(std::span<const double> scaled, const Tensor<double> &h,
                        int64_t num_labels, double threshold = kCifThreshold);

struct CifCeResult {
  double loss = 0;
  Tensor<double> grad_weight;      // (V, D)
  Tensor<double> grad_bias;        // (V)
  Tensor<double> grad_integrated;  // (U, D)
};

// Mean over tokens of -log softmax(W e_u + b)[y_u - 1]; the classifier covers
// the V non-blank tokens only.
CifCeResult CifCeLoss(const Tensor<double> &integrated, const LabelSeq &labels,
                      const Tensor<double> &clf_weight,
                      const Tensor<double> &clf_bias);

struct CifQuantityResult {
  double loss = 0;
  std::vector<double> grad_raw;
};

// |sum(raw) - U|; subgradient sign(sum - U) per frame, 0 at a tie.
CifQuantityResult CifQuantityLoss(std::span<const double> raw,
                                  int64_t num_labels);

struct CifBackwardResult {
  std::vector<double> grad_raw;  // (T)
  Tensor<double> grad_h;         // (T, D)
};

// Gradient of a loss on the fired embeddings w.r.t. raw weights and h, with
// the allocation pattern held fixed (the almost-everywhere derivative of the
// piecewise-linear map). Includes the U / sum(raw) scaling term.
CifBackwardResult CifBackward(const Tensor<double> &grad_integrated,
                              const std::vector<CifAllocation> &allocation,
                              const Tensor<double> &h,
                              const CifWeights &weights);

}  // namespace bat

#endif  // BAT_CIF_H_
