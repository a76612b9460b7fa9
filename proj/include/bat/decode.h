// bat/include/bat/decode.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_DECODE_H_
#define BAT_DECODE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bat/dataset.h"
#include "bat/model.h"

namespace bat {

// Frames are 0-based; the clock counts from utterance start, so frame t
// ends at (t + 1) * frame_ms.
struct EmissionEvent {
  int32_t token = 0;
  int64_t frame = 0;
  double time_ms = 0;

  bool operator==(const EmissionEvent &) const = default;
};

struct EmissionTrace {
  std::vector<EmissionEvent> events;
  double frame_ms = 10;
};

inline double FrameEndMs(int64_t frame, double frame_ms) {
  return static_cast<double>(frame + 1) * frame_ms;
}

struct DecodeResult {
  LabelSeq hypothesis;
  EmissionTrace trace;
};

// Streaming greedy search: at frame t, take the argmax of the joint for
// (h_t, g_u); a non-blank advances u and stays on t, blank advances t.
// Ties go to the lowest index, so blank wins any tie. At most
// `max_symbols_per_frame` tokens are emitted per frame.
DecodeResult GreedyDecode(const ToyModel &model, const Tensor<double> &x,
                          int max_symbols_per_frame = 10, double frame_ms = 10);

int64_t EditDistance(std::span<const int32_t> ref, std::span<const int32_t> hyp);

// Total edit distance of greedy hypotheses over total reference tokens.
double TokenErrorRate(const ToyModel &model, const std::vector<Utterance> &data,
                      int max_symbols_per_frame = 10);

struct UttLatency {
  std::string utt;
  double last_emission_ms = 0;
  double ref_end_ms = 0;
  double pr_ms = 0;  // negative when the last token comes before the end
};

struct LatencyReport {
  double avg_et_ms = 0;
  double pr50_ms = 0;
  double pr90_ms = 0;
  int64_t num_utts = 0;   // utterances with at least one emission
  int64_t num_empty = 0;  // excluded: nothing emitted
  std::vector<UttLatency> per_utt;
};

// Nearest rank: the ceil(p / 100 * N)-th smallest value (1-based rank).
double NearestRankPercentile(std::vector<double> values, double p);

// ids may be empty (per-utt names are then left blank). Throws kEmptySet if
// every trace is empty.
LatencyReport LatencyMetrics(const std::vector<EmissionTrace> &traces,
                             std::span<const double> ref_end_ms,
                             const std::vector<std::string> &ids = {});

// CSV with header frame,token_index,token_id; token_index counts emissions.
void WriteAlignmentCsv(const EmissionTrace &trace, const std::string &path);
EmissionTrace ReadAlignmentCsv(const std::string &path, double frame_ms);

// Multi-utterance traces: utt,frame,time_ms,token_index,token_id.
void WriteTracesCsv(const std::vector<std::string> &ids,
                    const std::vector<EmissionTrace> &traces,
                    const std::string &path);

// Reads a WriteTracesCsv file back, one trace per id in `ids` (empty when an
// id has no rows). Rows naming an unknown utterance are an error.
std::vector<EmissionTrace> ReadTracesCsv(const std::string &path,
                                         const std::vector<std::string> &ids,
                                         double frame_ms);

// metric,value rows; `%.9g` formatting.
void WriteLatencyReportCsv(const LatencyReport &report, const std::string &path);

}  // namespace bat

#endif  // BAT_DECODE_H_
