// bat/include/bat/model.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_MODEL_H_
#define BAT_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bat/bat_loss.h"
#include "bat/cif.h"
#include "bat/lattice.h"
#include "bat/rng.h"

namespace bat {

struct ModelDims {
  int64_t input_dim = 20;
  // Number of past frames stacked in front of x_t before the encoder; the
  // encoder stays causal. 0 gives a purely per-frame encoder.
  int64_t context = 2;
  int64_t hidden_dim = 64;  // D, encoder output and CIF width
  int64_t pred_dim = 32;    // D_p
  int64_t joint_dim = 128;  // D_j
  int64_t vocab = 20;       // V non-blank tokens
  int64_t cif_kernel = 3;

  int64_t StackedInputDim() const { return input_dim * (context + 1); }
  bool operator==(const ModelDims &) const = default;
};

// softmax[W_out tanh(W_enc h_t + W_pred g_u + b)]
struct JointParams {
  Tensor<double> w_enc;   // (D_j, D)
  Tensor<double> w_pred;  // (D_j, D_p)
  Tensor<double> w_out;   // (V+1, D_j)
  Tensor<double> bias;    // (D_j)
};

struct ToyModel {
  ModelDims dims;
  Tensor<double> enc_weight;  // (D, D_in * (context + 1))
  Tensor<double> enc_bias;    // (D)
  Tensor<double> embedding;   // (V+1, D_p); row 0 is the blank / start state
  JointParams joint;
  CifParams cif;
  Tensor<double> clf_weight;  // (V, D), CIF cross-entropy head
  Tensor<double> clf_bias;    // (V)

  static ToyModel Zeros(const ModelDims &dims);
  static ToyModel Init(const ModelDims &dims, uint64_t seed);

  // Fixed order; names line up with ParameterNames().
  std::vector<Tensor<double> *> Parameters();
  std::vector<const Tensor<double> *> Parameters() const;
  static const std::vector<std::string> &ParameterNames();

  // this += scale * other (same dims).
  void AddScaled(const ToyModel &other, double scale);
  int64_t NumParameters() const;
};

void SaveModel(const ToyModel &model, const std::string &path);
ToyModel LoadModel(const std::string &path);

// h = tanh(W [x_{t-c}; ...; x_t] + b), zero padding before frame 0. (T, D)
Tensor<double> Encode(const ToyModel &model, const Tensor<double> &x);

// g_u = embedding[y_u] with y_0 = blank; (U+1, D_p). Row u depends on
// labels[0..u-1] only.
Tensor<double> PredictorStates(const ToyModel &model, const LabelSeq &labels);

// Pre-softmax joint scores for one (h_t, g_u) pair, V+1 entries.
std::vector<double> JointLogits(const ToyModel &model, std::span<const double> h_t,
                                std::span<const double> g_u);

// Normalized log-probs over the whole (T, U+1) grid.
LogitLattice<double> ForwardFull(const ToyModel &model, const Tensor<double> &x,
                                 const LabelSeq &labels,
                                 int64_t *joint_evals = nullptr);

// Joint evaluated only for in-band cells: exactly T * window.width calls.
BandedLattice<double> ForwardBanded(const ToyModel &model,
                                    const Tensor<double> &x,
                                    const LabelSeq &labels,
                                    const BandWindow &window,
                                    int64_t *joint_evals = nullptr);

// Token boundary used for the band: ceil-cumsum of the scaled and clamped
// CIF weights. All zeros when there are no labels.
std::vector<int64_t> AlignmentBoundary(std::span<const double> raw_weights,
                                       int64_t num_labels);

enum class TrainMode { kFull, kBat };

TrainMode ParseTrainMode(const std::string &s);
const char *TrainModeName(TrainMode mode);

struct LossConfig {
  TrainMode mode = TrainMode::kBat;
  int32_t r_d = 2;
  int32_t r_u = 2;
  double lambda_trans = 1.0;  // weight of the transducer (BAT or RNN-T) loss
  double lambda_ce = 1.0;
  double lambda_qua = 1.0;
};

struct LossBreakdown {
  double total = 0;
  double trans = 0;
  double ce = 0;
  double qua = 0;
  int64_t joint_evals = 0;
  bool feasible = true;
};

struct BackwardResult {
  LossBreakdown losses;
  BandWindow window;  // bat mode only
  ToyModel grads;
};

// lambda_trans * L_trans + lambda_ce * L_ce + lambda_qua * L_qua and the
// gradient w.r.t. every parameter. The band (bat mode) is rebuilt from the
// current CIF weights; no gradient flows through the boundary itself.
// Throws kBandInfeasible when the band cannot hold a path.
BackwardResult BackwardTotal(const ToyModel &model, const Tensor<double> &x,
                             const LabelSeq &labels, const LossConfig &cfg);

}  // namespace bat

#endif  // BAT_MODEL_H_
