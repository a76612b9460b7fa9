// bat/src/decode.cc
//
// Copyright (c)  2026  bat-lattice authors

#include "bat/decode.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "bat/format.h"

namespace bat {

DecodeResult GreedyDecode(const ToyModel &model, const Tensor<double> &x,
                          int max_symbols_per_frame, double frame_ms) {
  if (max_symbols_per_frame < 1)
    Throw(ErrorCode::kInvalidInput, "max_symbols_per_frame must be >= 1");
  auto h = Encode(model, x);
  std::vector<int32_t> hyp;
  DecodeResult res;
  res.trace.frame_ms = frame_ms;
  auto state = model.embedding.Row(kBlank);
  for (int64_t t = 0; t < h.Dim(0); ++t) {
    for (int emitted = 0; emitted < max_symbols_per_frame; ++emitted) {
      auto scores = JointLogits(model, h.Row(t), state);
      // max_element returns the first maximum: blank (index 0) wins ties.
      auto best = static_cast<int32_t>(
          std::max_element(scores.begin(), scores.end()) - scores.begin());
      if (best == kBlank) break;
      hyp.push_back(best);
      res.trace.events.push_back({best, t, FrameEndMs(t, frame_ms)});
      state = model.embedding.Row(best);
    }
  }
  res.hypothesis = LabelSeq(std::move(hyp));
  return res;
}

int64_t EditDistance(std::span<const int32_t> ref, std::span<const int32_t> hyp) {
  std::vector<int64_t> prev(hyp.size() + 1), cur(hyp.size() + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    cur[0] = static_cast<int64_t>(i);
    for (std::size_t j = 1; j <= hyp.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                         prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[hyp.size()];
}

double TokenErrorRate(const ToyModel &model, const std::vector<Utterance> &data,
                      int max_symbols_per_frame) {
  int64_t errors = 0, total = 0;
  for (const auto &u : data) {
    auto r = GreedyDecode(model, u.feats, max_symbols_per_frame);
    errors += EditDistance(u.labels.tokens(), r.hypothesis.tokens());
    total += u.labels.size();
  }
  if (total == 0) Throw(ErrorCode::kEmptySet, "no reference tokens");
  return static_cast<double>(errors) / static_cast<double>(total);
}

double NearestRankPercentile(std::vector<double> values, double p) {
  if (values.empty()) Throw(ErrorCode::kEmptySet, "percentile of empty set");
  if (!(p > 0 && p <= 100))
    Throw(ErrorCode::kInvalidInput, "percentile must be in (0, 100]");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(
      std::ceil(p / 100.0 * static_cast<double>(values.size()) - 1e-12));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

LatencyReport LatencyMetrics(const std::vector<EmissionTrace> &traces,
                             std::span<const double> ref_end_ms,
                             const std::vector<std::string> &ids) {
  if (traces.size() != ref_end_ms.size() ||
      (!ids.empty() && ids.size() != traces.size()))
    Throw(ErrorCode::kDimMismatch, "one reference end time per trace");
  LatencyReport report;
  std::vector<double> prs;
  double et_sum = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    if (traces[i].events.empty()) {
      ++report.num_empty;
      continue;
    }
    UttLatency u;
    if (!ids.empty()) u.utt = ids[i];
    u.last_emission_ms = traces[i].events.back().time_ms;
    u.ref_end_ms = ref_end_ms[i];
    u.pr_ms = u.last_emission_ms - u.ref_end_ms;
    et_sum += u.last_emission_ms;
    prs.push_back(u.pr_ms);
    report.per_utt.push_back(u);
  }
  if (prs.empty()) Throw(ErrorCode::kEmptySet, "no utterance emitted a token");
  report.num_utts = static_cast<int64_t>(prs.size());
  report.avg_et_ms = et_sum / static_cast<double>(prs.size());
  report.pr50_ms = NearestRankPercentile(prs, 50);
  report.pr90_ms = NearestRankPercentile(prs, 90);
  return report;
}

void WriteAlignmentCsv(const EmissionTrace &trace, const std::string &path) {
  std::ofstream out(path);
  if (!out) Throw(ErrorCode::kIo, "cannot write " + path);
  out << "frame,token_index,token_id\n";
  for (std::size_t i = 0; i < trace.events.size(); ++i)
    out << trace.events[i].frame << "," << i << "," << trace.events[i].token
        << "\n";
  if (!out) Throw(ErrorCode::kIo, "write failed: " + path);
}

EmissionTrace ReadAlignmentCsv(const std::string &path, double frame_ms) {
  std::ifstream in(path);
  if (!in) Throw(ErrorCode::kIo, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "frame,token_index,token_id")
    Throw(ErrorCode::kInvalidInput, path + ": unexpected alignment header");
  EmissionTrace trace;
  trace.frame_ms = frame_ms;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    long long frame, index, token;
    char c1, c2;
    if (!(row >> frame >> c1 >> index >> c2 >> token) || c1 != ',' || c2 != ',' ||
        index != static_cast<long long>(trace.events.size()))
      Throw(ErrorCode::kInvalidInput, path + ": bad row '" + line + "'");
    trace.events.push_back({static_cast<int32_t>(token), frame,
                            FrameEndMs(frame, frame_ms)});
  }
  return trace;
}

void WriteTracesCsv(const std::vector<std::string> &ids,
                    const std::vector<EmissionTrace> &traces,
                    const std::string &path) {
  if (ids.size() != traces.size())
    Throw(ErrorCode::kDimMismatch, "one id per trace");
  std::ofstream out(path);
  if (!out) Throw(ErrorCode::kIo, "cannot write " + path);
  out << "utt,frame,time_ms,token_index,token_id\n";
  for (std::size_t n = 0; n < traces.size(); ++n)
    for (std::size_t i = 0; i < traces[n].events.size(); ++i) {
      const auto &e = traces[n].events[i];
      out << ids[n] << "," << e.frame << "," << FormatNumber(e.time_ms) << ","
          << i << "," << e.token << "\n";
    }
  if (!out) Throw(ErrorCode::kIo, "write failed: " + path);
}

std::vector<EmissionTrace> ReadTracesCsv(const std::string &path,
                                         const std::vector<std::string> &ids,
                                         double frame_ms) {
  std::ifstream in(path);
  if (!in) Throw(ErrorCode::kIo, "cannot open " + path);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t n = 0; n < ids.size(); ++n) index[ids[n]] = n;
  std::vector<EmissionTrace> traces(ids.size());
  for (auto &tr : traces) tr.frame_ms = frame_ms;
  std::string line;
  if (!std::getline(in, line) || line != "utt,frame,time_ms,token_index,token_id")
    Throw(ErrorCode::kInvalidInput, path + ": unexpected traces header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    auto it = index.find(line.substr(0, comma));
    if (comma == std::string::npos || it == index.end())
      Throw(ErrorCode::kInvalidInput, path + ": unknown utterance in '" + line + "'");
    auto &events = traces[it->second].events;
    std::istringstream row(line.substr(comma + 1));
    long long frame, token_index, token;
    double ms;
    char c1, c2, c3;
    if (!(row >> frame >> c1 >> ms >> c2 >> token_index >> c3 >> token) ||
        c1 != ',' || c2 != ',' || c3 != ',' ||
        token_index != static_cast<long long>(events.size()) ||
        (!events.empty() && frame < events.back().frame))
      Throw(ErrorCode::kInvalidInput, path + ": bad row '" + line + "'");
    events.push_back({static_cast<int32_t>(token), frame, ms});
  }
  return traces;
}

void WriteLatencyReportCsv(const LatencyReport &r, const std::string &path) {
  std::ofstream out(path);
  if (!out) Throw(ErrorCode::kIo, "cannot write " + path);
  out << "metric,value\n"
      << "avg_et_ms," << FormatNumber(r.avg_et_ms) << "\n"
      << "pr50_ms," << FormatNumber(r.pr50_ms) << "\n"
      << "pr90_ms," << FormatNumber(r.pr90_ms) << "\n"
      << "num_utts," << r.num_utts << "\n"
      << "num_empty," << r.num_empty << "\n";
  if (!out) Throw(ErrorCode::kIo, "write failed: " + path);
}

}  // namespace bat
