// bat/include/bat/bench.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_BENCH_H_
#define BAT_BENCH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "bat/tensor.h"

namespace bat {

struct BenchConfig {
  int64_t n = 1;  // utterances per batch
  int64_t t = 200;
  int64_t u = 50;
  int64_t v = 500;
  int32_t r_d = 2;
  int32_t r_u = 2;
  DType dtype = DType::kF32;
  int repeats = 9;
  int warmup = 1;
  uint64_t seed = 1;
};

struct KernelStats {
  std::string name;  // "full" or "banded"
  int64_t rows = 0;  // U+1 or S
  int64_t lattice_bytes = 0;
  int64_t peak_tracked_bytes = 0;
  double loss_sum = 0;  // sum over the batch, identical on every repeat
  std::vector<double> times_ms;
  double median_ms = 0;
  double min_ms = 0;
  double max_ms = 0;
};

struct BenchReport {
  BenchConfig config;
  int64_t s = 0;  // band width actually used
  KernelStats full;
  KernelStats banded;

  double MemoryRatio() const {
    return static_cast<double>(full.peak_tracked_bytes) /
           static_cast<double>(banded.peak_tracked_bytes);
  }
  double TimeRatio() const { return full.median_ms / banded.median_ms; }
};

// Both kernels see the same synthetic batch: additive logits
// enc[t] + pred[u] normalized per cell, then loss and gradient. One repeat
// times materialization plus forward-backward for the whole batch. Memory is
// the tracked peak of lattice, gradient and alpha/beta buffers.
// Throws kBandInfeasible when u > t + r_d + r_u.
BenchReport RunBench(const BenchConfig &cfg);

enum class ReportFormat { kCsv, kText };

// The CSV holds only deterministic fields (config, byte counts, losses), so
// two runs with the same config give identical files; wall times go to the
// timing CSV or the text report.
void EmitReport(const BenchReport &report, const std::string &path,
                ReportFormat format);
std::string FormatReport(const BenchReport &report, ReportFormat format);
void EmitTimingCsv(const BenchReport &report, const std::string &path);

struct BenchCsvRow {
  std::string kernel;
  int64_t n = 0, t = 0, u = 0, v = 0, s = 0, rows = 0;
  int32_t r_d = 0, r_u = 0;
  std::string dtype;
  int64_t lattice_bytes = 0;
  int64_t peak_tracked_bytes = 0;
  double loss_sum = 0;
};

std::vector<BenchCsvRow> ParseBenchCsv(const std::string &text);

}  // namespace bat

#endif  // BAT_BENCH_H_
