// bat/src/bench.cc
//
// Copyright (c)  2026  bat-lattice authors

#include "bat/bench.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "bat/bat_loss.h"
#include "bat/cif.h"
#include "bat/format.h"
#include "bat/log_math.h"
#include "bat/memory.h"
#include "bat/rng.h"
#include "bat/rnnt_loss.h"

namespace bat {

namespace {

struct BenchItem {
  Tensor<double> enc;   // (T, V+1)
  Tensor<double> pred;  // (U+1, V+1)
  LabelSeq labels;
  BandWindow window;
};

std::vector<BenchItem> MakeBatch(const BenchConfig &cfg) {
  const Rng root(cfg.seed);
  std::vector<BenchItem> items;
  for (int64_t i = 0; i < cfg.n; ++i) {
    Rng rng = root.Split(static_cast<uint64_t>(i));
    BenchItem it;
    it.enc = Tensor<double>({cfg.t, cfg.v + 1});
    it.pred = Tensor<double>({cfg.u + 1, cfg.v + 1});
    for (auto &x : it.enc.Data()) x = rng.Normal();
    for (auto &x : it.pred.Data()) x = rng.Normal();
    std::vector<int32_t> y(cfg.u);
    for (auto &k : y) k = static_cast<int32_t>(rng.UniformInt(1, cfg.v));
    it.labels = LabelSeq(std::move(y));
    std::vector<int64_t> boundary(cfg.t, 0);
    if (cfg.u > 0) {
      std::vector<double> w(cfg.t);
      for (auto &x : w) x = rng.Uniform(0.05, 1.0);
      boundary = CifBoundary(ClampScaledWeights(CifScale(w, cfg.u).scaled));
    }
    it.window = BuildWindow(boundary, cfg.u, cfg.r_d, cfg.r_u);
    items.push_back(std::move(it));
  }
  return items;
}

// Normalized log-probs for rows starts[t] .. starts[t] + rows - 1.
template <typename Real>
Tensor<Real> Materialize(const BenchItem &it, const std::vector<int64_t> &starts,
                         int64_t rows) {
  const int64_t T = it.enc.Dim(0);
  const int64_t V1 = it.enc.Dim(1);
  Tensor<Real> out({T, rows, V1});
  std::vector<double> cell(V1);
  for (int64_t t = 0; t < T; ++t)
    for (int64_t r = 0; r < rows; ++r) {
      auto e = it.enc.Row(t);
      auto p = it.pred.Row(starts[t] + r);
      for (int64_t k = 0; k < V1; ++k) cell[k] = e[k] + p[k];
      LogSoftmaxInPlace(cell);
      std::copy(cell.begin(), cell.end(), out.Row(t, r).begin());
    }
  return out;
}

// One pass over the batch; returns the summed loss.
template <typename Real>
double RunKernel(const std::vector<BenchItem> &batch, bool banded,
                 MemoryTracker *tracker) {
  std::vector<Tensor<Real>> lattices;
  std::vector<TrackedBytes> held;
  for (const auto &it : batch) {
    const int64_t T = it.enc.Dim(0);
    const int64_t rows = banded ? it.window.width : it.labels.size() + 1;
    std::vector<int64_t> starts =
        banded ? it.window.starts : std::vector<int64_t>(T, 0);
    lattices.push_back(Materialize<Real>(it, starts, rows));
    held.emplace_back(tracker, lattices.back().NumBytes());
  }
  double total = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    // The gradient has the lattice's shape; account for it up front.
    TrackedBytes grad_bytes(tracker, lattices[i].NumBytes());
    if (banded) {
      BandedLattice<Real> lat{batch[i].window, std::move(lattices[i])};
      total += BatLoss(lat, batch[i].labels, tracker).loss;
    } else {
      LogitLattice<Real> lat(std::move(lattices[i]));
      total += RnntLoss(lat, batch[i].labels, tracker).loss;
    }
  }
  return total;
}

template <typename Real>
KernelStats Measure(const std::vector<BenchItem> &batch, const BenchConfig &cfg,
                    bool banded) {
  KernelStats k;
  k.name = banded ? "banded" : "full";
  k.rows = banded ? batch.front().window.width : cfg.u + 1;
  k.lattice_bytes = cfg.n * cfg.t * k.rows * (cfg.v + 1) *
                    static_cast<int64_t>(sizeof(Real));
  for (int i = 0; i < cfg.warmup; ++i) RunKernel<Real>(batch, banded, nullptr);
  for (int i = 0; i < cfg.repeats; ++i) {
    MemoryTracker tracker;
    auto start = std::chrono::steady_clock::now();
    double loss = RunKernel<Real>(batch, banded, &tracker);
    auto stop = std::chrono::steady_clock::now();
    k.times_ms.push_back(
        std::chrono::duration<double, std::milli>(stop - start).count());
    k.peak_tracked_bytes = static_cast<int64_t>(tracker.Peak());
    k.loss_sum = loss;
  }
  std::vector<double> sorted = k.times_ms;
  std::sort(sorted.begin(), sorted.end());
  k.median_ms = sorted[sorted.size() / 2];
  k.min_ms = sorted.front();
  k.max_ms = sorted.back();
  return k;
}

const char *kCsvHeader =
    "kernel,n,t,u,v,s,r_d,r_u,dtype,rows,lattice_bytes,peak_tracked_bytes,"
    "loss_sum";

}  // namespace

BenchReport RunBench(const BenchConfig &cfg) {
  if (cfg.n < 1 || cfg.t < 1 || cfg.u < 1 || cfg.v < 1 || cfg.r_d < 0 ||
      cfg.r_u < 0 || cfg.repeats < 3 || cfg.warmup < 0)
    Throw(ErrorCode::kInvalidInput,
          "bench needs n, t, u, v >= 1, radii >= 0 and repeats >= 3");
  if (cfg.dtype != DType::kF32 && cfg.dtype != DType::kF64)
    Throw(ErrorCode::kInvalidInput, "bench dtype must be f32 or f64");
  auto batch = MakeBatch(cfg);
  BenchReport r;
  r.config = cfg;
  r.s = batch.front().window.width;
  if (cfg.dtype == DType::kF32) {
    r.full = Measure<float>(batch, cfg, false);
    r.banded = Measure<float>(batch, cfg, true);
  } else {
    r.full = Measure<double>(batch, cfg, false);
    r.banded = Measure<double>(batch, cfg, true);
  }
  return r;
}

std::string FormatReport(const BenchReport &r, ReportFormat format) {
  const auto &c = r.config;
  std::ostringstream out;
  if (format == ReportFormat::kCsv) {
    out << kCsvHeader << "\n";
    for (const KernelStats *k : {&r.full, &r.banded})
      out << k->name << "," << c.n << "," << c.t << "," << c.u << "," << c.v
          << "," << r.s << "," << c.r_d << "," << c.r_u << ","
          << DTypeName(c.dtype) << "," << k->rows << "," << k->lattice_bytes
          << "," << k->peak_tracked_bytes << "," << FormatNumber(k->loss_sum)
          << "\n";
    return out.str();
  }
  out << "config: n=" << c.n << " t=" << c.t << " u=" << c.u << " v=" << c.v
      << " r_d=" << c.r_d << " r_u=" << c.r_u << " s=" << r.s
      << " dtype=" << DTypeName(c.dtype) << " repeats=" << c.repeats
      << " warmup=" << c.warmup << " seed=" << c.seed << "\n";
  for (const KernelStats *k : {&r.full, &r.banded})
    out << k->name << ": rows=" << k->rows << " median_ms="
        << FormatNumber(k->median_ms) << " min_ms=" << FormatNumber(k->min_ms)
        << " max_ms=" << FormatNumber(k->max_ms)
        << " lattice_bytes=" << k->lattice_bytes
        << " peak_tracked_bytes=" << k->peak_tracked_bytes
        << " loss_sum=" << FormatNumber(k->loss_sum) << "\n";
  out << "memory_ratio(full/banded)=" << FormatNumber(r.MemoryRatio())
      << " time_ratio(full/banded)=" << FormatNumber(r.TimeRatio()) << "\n";
  return out.str();
}

void EmitReport(const BenchReport &report, const std::string &path,
                ReportFormat format) {
  std::ofstream out(path);
  if (!out) Throw(ErrorCode::kIo, "cannot write " + path);
  out << FormatReport(report, format);
  if (!out) Throw(ErrorCode::kIo, "write failed: " + path);
}

void EmitTimingCsv(const BenchReport &report, const std::string &path) {
  std::ofstream out(path);
  if (!out) Throw(ErrorCode::kIo, "cannot write " + path);
  out << "kernel,repeat,ms\n";
  for (const KernelStats *k : {&report.full, &report.banded})
    for (std::size_t i = 0; i < k->times_ms.size(); ++i)
      out << k->name << "," << i << "," << FormatNumber(k->times_ms[i]) << "\n";
  for (const KernelStats *k : {&report.full, &report.banded})
    out << k->name << ",median," << FormatNumber(k->median_ms) << "\n";
  if (!out) Throw(ErrorCode::kIo, "write failed: " + path);
}

std::vector<BenchCsvRow> ParseBenchCsv(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    Throw(ErrorCode::kInvalidInput, "unexpected bench CSV header");
  std::vector<BenchCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream cells(line);
    for (std::string cell; std::getline(cells, cell, ',');) f.push_back(cell);
    if (f.size() != 13) Throw(ErrorCode::kInvalidInput, "bad bench row: " + line);
    try {
      BenchCsvRow r;
      r.kernel = f[0];
      r.n = std::stoll(f[1]);
      r.t = std::stoll(f[2]);
      r.u = std::stoll(f[3]);
      r.v = std::stoll(f[4]);
      r.s = std::stoll(f[5]);
      r.r_d = std::stoi(f[6]);
      r.r_u = std::stoi(f[7]);
      r.dtype = f[8];
      r.rows = std::stoll(f[9]);
      r.lattice_bytes = std::stoll(f[10]);
      r.peak_tracked_bytes = std::stoll(f[11]);
      r.loss_sum = std::stod(f[12]);
      rows.push_back(r);
    } catch (const std::logic_error &) {
      Throw(ErrorCode::kInvalidInput, "bad bench row: " + line);
    }
  }
  return rows;
}

}  // namespace bat
