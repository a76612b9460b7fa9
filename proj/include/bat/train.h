// bat/include/bat/train.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_TRAIN_H_
#define BAT_TRAIN_H_

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "bat/dataset.h"
#include "bat/model.h"

namespace bat {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0;  // decoupled, applied as w -= lr * wd * w
};

class Adam {
 public:
  Adam(const ModelDims &dims, const AdamConfig &cfg);
  void Step(ToyModel &model, const ToyModel &grad);
  int64_t steps() const { return step_; }
  void set_lr(double lr) { cfg_.lr = lr; }

 private:
  AdamConfig cfg_;
  ToyModel m_;
  ToyModel v_;
  int64_t step_ = 0;
};

struct TrainConfig {
  LossConfig loss;
  AdamConfig adam;
  uint64_t seed = 1;     // batch order
  int64_t epochs = 12;
  int64_t batch_size = 8;
  int64_t max_steps = 0;   // 0: no cap beyond epochs
  // Learning rate decays linearly from adam.lr to adam.lr * final_lr_scale
  // over the run; 1 keeps it constant.
  double final_lr_scale = 1.0;
  int64_t eval_every = 100;  // token error on the eval set; 0 disables
  int threads = 1;
};

struct TrainLogRow {
  int64_t step = 0;  // 1-based optimizer step
  double loss_total = 0;  // batch means per utterance
  double loss_trans = 0;
  double loss_ce = 0;
  double loss_qua = 0;
  double token_err = 0;  // NaN when not evaluated at this step
  int64_t joint_evals = 0;
  int64_t band_cells = 0;  // sum of T * width over the batch (T * (U+1) in full mode)
};

struct TrainResult {
  std::vector<TrainLogRow> log;
  int64_t steps = 0;
  int64_t skipped = 0;  // infeasible utterances left out of a batch
};

// Deterministic for a fixed config: batch gradients are summed with a
// fixed-shape pairwise tree whatever the thread count.
TrainResult Train(ToyModel &model, const std::vector<Utterance> &train,
                  const std::vector<Utterance> &eval, const TrainConfig &cfg,
                  const std::function<void(const TrainLogRow &)> &on_row = {});

// step,loss_total,loss_trans,loss_ce,loss_qua,token_err
const char *TrainLogHeader();
std::string FormatTrainLogRow(const TrainLogRow &row);

}  // namespace bat

#endif  // BAT_TRAIN_H_
