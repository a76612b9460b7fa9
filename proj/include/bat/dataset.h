// bat/include/bat/dataset.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_DATASET_H_
#define BAT_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "bat/lattice.h"
#include "bat/tensor.h"

namespace bat {

struct Utterance {
  std::string id;
  Tensor<double> feats;             // (T, D_in)
  LabelSeq labels;
  std::vector<int64_t> end_frames;  // 0-based last frame of each token
};

// Each token is k noisy copies of its one-hot prototype (dimension y - 1).
struct SynthSpec {
  int64_t vocab = 20;
  int64_t input_dim = 20;  // >= vocab; extra dims carry noise only
  int64_t min_tokens = 3;
  int64_t max_tokens = 8;
  int64_t min_frames = 2;  // frames per token
  int64_t max_frames = 5;
  double noise = 0.3;      // per-dimension Gaussian stddev
  // Immediate repeats are indistinguishable from a longer token in the
  // features, so they are excluded unless asked for.
  bool allow_repeats = false;
};

std::vector<Utterance> SynthTask(uint64_t seed, int64_t num_utts,
                                 const SynthSpec &spec);

// Manifest: one JSON object per line
//   {"utt", "frames", "offset", "tokens", "end_frames", "feats"}
// where `feats` names a BAT1 (sum T, D_in) f64 tensor relative to the
// manifest directory and `offset` is the utterance's first row in it.
void SaveDataset(const std::vector<Utterance> &data,
                 const std::string &manifest_path);
std::vector<Utterance> LoadDataset(const std::string &manifest_path);

}  // namespace bat

#endif  // BAT_DATASET_H_
