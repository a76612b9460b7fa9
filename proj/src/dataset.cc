// bat/src/dataset.cc
//
// Copyright (c)  2026  bat-lattice authors

#include "bat/dataset.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "bat/rng.h"
#include "bat/tensor_io.h"
#include "json.hpp"

namespace bat {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<Utterance> SynthTask(uint64_t seed, int64_t num_utts,
                                 const SynthSpec &spec) {
  if (spec.vocab < 1 || spec.input_dim < spec.vocab || spec.min_tokens < 1 ||
      spec.max_tokens < spec.min_tokens || spec.min_frames < 1 ||
      spec.max_frames < spec.min_frames || spec.noise < 0 || num_utts < 0)
    Throw(ErrorCode::kInvalidInput, "invalid synthetic task spec");
  if (!spec.allow_repeats && spec.vocab < 2 && spec.max_tokens > 1)
    Throw(ErrorCode::kInvalidInput, "need vocab >= 2 without repeats");

  const Rng root(seed);
  std::vector<Utterance> data;
  data.reserve(num_utts);
  for (int64_t n = 0; n < num_utts; ++n) {
    // One stream per utterance, so utterance n does not depend on how many
    // draws earlier ones made.
    Rng rng = root.Split(static_cast<uint64_t>(n));
    Utterance utt;
    char id[32];
    std::snprintf(id, sizeof(id), "utt%06lld", static_cast<long long>(n));
    utt.id = id;

    const int64_t U = rng.UniformInt(spec.min_tokens, spec.max_tokens);
    std::vector<int32_t> tokens;
    std::vector<int64_t> lengths;
    int64_t T = 0;
    for (int64_t u = 0; u < U; ++u) {
      int32_t y;
      do {
        y = static_cast<int32_t>(rng.UniformInt(1, spec.vocab));
      } while (!spec.allow_repeats && !tokens.empty() && y == tokens.back());
      tokens.push_back(y);
      lengths.push_back(rng.UniformInt(spec.min_frames, spec.max_frames));
      T += lengths.back();
      utt.end_frames.push_back(T - 1);
    }
    utt.feats = Tensor<double>({T, spec.input_dim});
    int64_t t = 0;
    for (int64_t u = 0; u < U; ++u)
      for (int64_t k = 0; k < lengths[u]; ++k, ++t) {
        auto row = utt.feats.Row(t);
        for (auto &v : row) v = spec.noise > 0 ? rng.Normal(0, spec.noise) : 0.0;
        row[tokens[u] - 1] += 1.0;
      }
    utt.labels = LabelSeq(std::move(tokens));
    data.push_back(std::move(utt));
  }
  return data;
}

void SaveDataset(const std::vector<Utterance> &data,
                 const std::string &manifest_path) {
  int64_t total = 0, dim = data.empty() ? 1 : data[0].feats.Dim(1);
  for (const auto &u : data) {
    if (u.feats.Dim(1) != dim)
      Throw(ErrorCode::kDimMismatch, "utterances differ in feature dim");
    total += u.feats.Dim(0);
  }
  Tensor<double> feats({total, dim});
  const std::string feats_name =
      fs::path(manifest_path).filename().string() + ".feats.bat1";
  std::ofstream out(manifest_path);
  if (!out) Throw(ErrorCode::kIo, "cannot write " + manifest_path);
  int64_t offset = 0;
  for (const auto &u : data) {
    std::copy(u.feats.Storage().begin(), u.feats.Storage().end(),
              feats.Storage().begin() + offset * dim);
    json rec = {{"utt", u.id},
                {"frames", u.feats.Dim(0)},
                {"offset", offset},
                {"tokens", u.labels.tokens()},
                {"end_frames", u.end_frames},
                {"feats", feats_name}};
    out << rec.dump() << "\n";
    offset += u.feats.Dim(0);
  }
  if (!out) Throw(ErrorCode::kIo, "write failed: " + manifest_path);
  WriteTensor((fs::path(manifest_path).parent_path() / feats_name).string(),
              feats);
}

std::vector<Utterance> LoadDataset(const std::string &manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) Throw(ErrorCode::kIo, "cannot open " + manifest_path);
  const fs::path dir = fs::path(manifest_path).parent_path();
  std::map<std::string, Tensor<double>> feats_cache;
  std::vector<Utterance> data;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json rec = json::parse(line);
      const std::string feats_name = rec.at("feats");
      auto it = feats_cache.find(feats_name);
      if (it == feats_cache.end())
        it = feats_cache
                 .emplace(feats_name,
                          ConvertTensor<double>(ReadTensor((dir / feats_name).string())))
                 .first;
      const Tensor<double> &all = it->second;
      if (all.NumAxes() != 2)
        Throw(ErrorCode::kBadDims, feats_name + " must be 2-D");
      const int64_t frames = rec.at("frames"), offset = rec.at("offset");
      if (frames < 1 || offset < 0 || offset + frames > all.Dim(0))
        Throw(ErrorCode::kDimMismatch, "utterance rows outside " + feats_name);
      const int64_t dim = all.Dim(1);
      Utterance u;
      u.id = rec.at("utt");
      u.feats = Tensor<double>(
          {frames, dim},
          std::vector<double>(all.Storage().begin() + offset * dim,
                              all.Storage().begin() + (offset + frames) * dim));
      u.labels = LabelSeq(rec.at("tokens").get<std::vector<int32_t>>());
      u.end_frames = rec.at("end_frames").get<std::vector<int64_t>>();
      if (static_cast<int64_t>(u.end_frames.size()) != u.labels.size())
        Throw(ErrorCode::kDimMismatch, u.id + ": end_frames length != tokens");
      data.push_back(std::move(u));
    } catch (const json::exception &e) {
      Throw(ErrorCode::kInvalidInput, manifest_path + ":" +
                                          std::to_string(line_no) + ": " + e.what());
    }
  }
  return data;
}

}  // namespace bat
