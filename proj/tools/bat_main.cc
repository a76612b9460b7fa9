// bat/tools/bat_main.cc
//
// Copyright (c)  2026  bat-lattice authors
//
// Command-line front end. Exit codes: 0 ok, 1 usage, 2 data error,
// 3 infeasible band, 4 gradient check above tolerance.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bat/bat_loss.h"
#include "bat/bench.h"
#include "bat/cif.h"
#include "bat/dataset.h"
#include "bat/decode.h"
#include "bat/format.h"
#include "bat/log_math.h"
#include "bat/model.h"
#include "bat/rnnt_loss.h"
#include "bat/tensor_io.h"
#include "bat/train.h"
#include "bat/version.h"

namespace {

using namespace bat;  // NOLINT

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitCheckFailed = 4;

struct Globals {
  uint64_t seed = 1;
  int threads = 1;
  std::string config;
};

// ---------------------------------------------------------------------------
// Config file: `key=value` lines, '#' comments. Each key is a long flag name
// and is appended as --key=value unless that flag is already on the command
// line, which gives flags > config > defaults.

std::string Trim(const std::string &s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<std::string> FindConfigPath(const std::vector<std::string> &args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

std::vector<std::string> MergeConfig(std::vector<std::string> args) {
  auto path = FindConfigPath(args);
  if (!path) return args;
  std::ifstream in(*path);
  if (!in) Throw(ErrorCode::kIo, "cannot open config " + *path);
  std::set<std::string> given;
  for (const auto &a : args)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') - 2));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      Throw(ErrorCode::kInvalidInput,
            *path + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = Trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key = key.substr(2);
    if (key.empty() || key == "config")
      Throw(ErrorCode::kInvalidInput,
            *path + ":" + std::to_string(lineno) + ": bad key");
    if (given.count(key)) continue;
    args.push_back("--" + key + "=" + Trim(line.substr(eq + 1)));
  }
  return args;
}

// ---------------------------------------------------------------------------

LabelSeq ReadLabels(const std::string &path) {
  AnyTensor t = ReadTensor(path);
  if (DTypeOfAny(t) != DType::kI64 || DimsOfAny(t).size() != 1)
    Throw(ErrorCode::kBadDims, path + ": labels must be a 1-D i64 tensor");
  const auto &v = std::get<Tensor<int64_t>>(t).Storage();
  std::vector<int32_t> y;
  for (int64_t k : v) {
    if (k < 1 || k > INT32_MAX)
      Throw(ErrorCode::kInvalidInput, path + ": label ids must be >= 1");
    y.push_back(static_cast<int32_t>(k));
  }
  return LabelSeq(std::move(y));
}

std::vector<double> ReadVector(const std::string &path) {
  AnyTensor t = ReadTensor(path);
  if (DimsOfAny(t).size() != 1)
    Throw(ErrorCode::kBadDims, path + ": expected a 1-D tensor");
  return ConvertTensor<double>(t).Storage();
}

template <typename>
struct ElemOf;
template <typename R>
struct ElemOf<Tensor<R>> {
  using type = R;
};

void PrintLoss(double loss) { std::cout << FormatNumber(loss) << "\n"; }

// ---------------------------------------------------------------------------
// loss / bat-loss

struct LossArgs {
  std::string lattice;
  std::string labels;
  std::string grad_out;
  std::string window;
  std::string cif_weights;
  int32_t r_d = 2;
  int32_t r_u = 2;
};

int RunLoss(const LossArgs &a) {
  AnyTensor lat = ReadTensor(a.lattice);
  LabelSeq y = ReadLabels(a.labels);
  return std::visit(
      [&](auto &t) -> int {
        using Real = typename ElemOf<std::decay_t<decltype(t)>>::type;
        if constexpr (std::is_same_v<Real, int64_t>) {
          Throw(ErrorCode::kBadDims, a.lattice + ": lattice must be f32 or f64");
        } else {
          auto r = RnntLoss(LogitLattice<Real>(std::move(t)), y);
          PrintLoss(r.loss);
          if (!a.grad_out.empty()) WriteTensor(a.grad_out, r.grad);
        }
        return kExitOk;
      },
      lat);
}

int RunBatLoss(const LossArgs &a) {
  AnyTensor lat = ReadTensor(a.lattice);
  LabelSeq y = ReadLabels(a.labels);
  const auto &dims = DimsOfAny(lat);
  if (dims.size() != 3)
    Throw(ErrorCode::kBadDims, a.lattice + ": lattice must have 3 axes");
  const int64_t T = dims[0], U = y.size();
  if (U > T + a.r_d + a.r_u)
    Throw(ErrorCode::kBandInfeasible,
          "band infeasible: U=" + std::to_string(U) +
              " > T+R_d+R_u=" + std::to_string(T + a.r_d + a.r_u));

  BandWindow window;
  if (!a.window.empty()) {
    AnyTensor s = ReadTensor(a.window);
    if (DTypeOfAny(s) != DType::kI64 || DimsOfAny(s).size() != 1)
      Throw(ErrorCode::kBadDims, a.window + ": window must be a 1-D i64 tensor");
    window = MakeWindow(std::get<Tensor<int64_t>>(s).Storage(), dims[1], U);
  } else {
    auto raw = ReadVector(a.cif_weights);
    if (static_cast<int64_t>(raw.size()) != T)
      Throw(ErrorCode::kDimMismatch, "one CIF weight per frame expected");
    window = BuildWindow(AlignmentBoundary(raw, U), U, a.r_d, a.r_u);
  }

  return std::visit(
      [&](auto &t) -> int {
        using Real = typename ElemOf<std::decay_t<decltype(t)>>::type;
        if constexpr (std::is_same_v<Real, int64_t>) {
          Throw(ErrorCode::kBadDims, a.lattice + ": lattice must be f32 or f64");
        } else {
          BandedLattice<Real> banded;
          if (!a.window.empty()) {
            banded = BandedLattice<Real>{window, std::move(t)};
          } else {
            banded = GatherBand(LogitLattice<Real>(std::move(t)), window);
          }
          auto r = BatLoss(banded, y);
          PrintLoss(r.loss);
          if (!a.grad_out.empty()) WriteTensor(a.grad_out, r.grad);
        }
        return kExitOk;
      },
      lat);
}

// ---------------------------------------------------------------------------
// check-grad

struct CheckGradArgs {
  int64_t t = 4;
  int64_t u = 3;
  int64_t v = 3;
  double step = 1e-5;
  double tolerance = 1e-4;
};

double MaxRelErr(const std::vector<double> &a, const std::vector<double> &b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-6});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

// Central differences of `loss` over every entry of `x`.
template <typename F>
std::vector<double> NumericGrad(Tensor<double> x, double step, F loss) {
  std::vector<double> g(x.Storage().size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double keep = x.Data()[i];
    x.Data()[i] = keep + step;
    const double up = loss(x);
    x.Data()[i] = keep - step;
    const double down = loss(x);
    x.Data()[i] = keep;
    g[i] = (up - down) / (2 * step);
  }
  return g;
}

int RunCheckGrad(const CheckGradArgs &a, uint64_t seed) {
  if (a.t < 1 || a.u < 0 || a.v < 1)
    Throw(ErrorCode::kInvalidInput, "check-grad needs t >= 1, u >= 0, v >= 1");
  Rng rng(seed);
  Tensor<double> lp({a.t, a.u + 1, a.v + 1});
  for (int64_t t = 0; t < a.t; ++t)
    for (int64_t u = 0; u <= a.u; ++u) {
      auto row = lp.Row(t, u);
      for (auto &x : row) x = rng.Uniform(-3, 3);
      LogSoftmaxInPlace(row);
    }
  std::vector<int32_t> y(a.u);
  for (auto &k : y) k = static_cast<int32_t>(rng.UniformInt(1, a.v));
  LabelSeq labels(std::move(y));

  auto full = RnntLoss(LogitLattice<double>(lp), labels);
  auto fd = NumericGrad(lp, a.step, [&](const Tensor<double> &x) {
    return RnntLoss(LogitLattice<double>(x), labels).loss;
  });
  double worst = MaxRelErr(full.grad.Storage(), fd);
  std::cout << "rnnt_loss " << FormatNumber(worst) << "\n";

  // Narrowest band that fits, around the boundary of random CIF weights.
  if (a.u > 0 && a.u <= a.t) {
    std::vector<double> raw(a.t);
    for (auto &w : raw) w = rng.Uniform(0.05, 1.0);
    auto window = BuildWindow(AlignmentBoundary(raw, a.u), a.u, 0, 0);
    auto banded = GatherBand(LogitLattice<double>(lp), window);
    auto r = BatLoss(banded, labels);
    if (r.feasible) {
      auto bfd = NumericGrad(banded.log_probs, a.step, [&](const Tensor<double> &x) {
        return BatLoss(BandedLattice<double>{window, x}, labels).loss;
      });
      double err = MaxRelErr(r.grad.Storage(), bfd);
      std::cout << "bat_loss " << FormatNumber(err) << "\n";
      worst = std::max(worst, err);
    }
  }
  std::cout << "max_rel_err " << FormatNumber(worst) << "\n";
  return worst < a.tolerance ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------
// synth / train / decode / latency

struct SynthArgs {
  int64_t n = 100;
  std::string out;
  SynthSpec spec;
};

int RunSynth(const SynthArgs &a, uint64_t seed) {
  SaveDataset(SynthTask(seed, a.n, a.spec), a.out);
  std::cout << "wrote " << a.n << " utterances to " << a.out << "\n";
  return kExitOk;
}

struct TrainArgs {
  std::string data;
  std::string eval_data;
  std::string mode = "bat";
  std::string log;
  std::string model_out;
  int64_t vocab = 20;
  ModelDims dims;
  TrainConfig cfg;
};

int RunTrain(TrainArgs a, const Globals &g) {
  a.cfg.loss.mode = ParseTrainMode(a.mode);
  a.cfg.seed = g.seed;
  a.cfg.threads = g.threads;
  auto train = LoadDataset(a.data);
  std::vector<Utterance> eval;
  if (!a.eval_data.empty()) eval = LoadDataset(a.eval_data);
  if (train.empty()) Throw(ErrorCode::kEmptySet, a.data + ": no utterances");

  a.dims.vocab = a.vocab;
  a.dims.input_dim = train.front().feats.Dim(1);
  for (const auto *set : {&train, &eval})
    for (const auto &u : *set)
      for (int32_t k : u.labels.tokens())
        if (k > a.vocab)
          Throw(ErrorCode::kInvalidInput,
                u.id + ": token " + std::to_string(k) + " exceeds --vocab");

  ToyModel model = ToyModel::Init(a.dims, g.seed);
  std::ofstream log_file;
  std::ostream *log = &std::cout;
  if (!a.log.empty()) {
    log_file.open(a.log);
    if (!log_file) Throw(ErrorCode::kIo, "cannot write " + a.log);
    log = &log_file;
  }
  *log << TrainLogHeader() << "\n";
  auto result = Train(model, train, eval, a.cfg, [&](const TrainLogRow &row) {
    *log << FormatTrainLogRow(row) << "\n";
  });
  log->flush();
  if (!a.model_out.empty()) SaveModel(model, a.model_out);
  if (!a.log.empty()) {
    std::cout << "steps " << result.steps << "\n";
    std::cout << "skipped " << result.skipped << "\n";
    if (!result.log.empty()) {
      const auto &last = result.log.back();
      std::cout << "final_loss " << FormatNumber(last.loss_total) << "\n";
      if (!std::isnan(last.token_err))
        std::cout << "token_err " << FormatNumber(last.token_err) << "\n";
    }
  }
  return kExitOk;
}

struct DecodeArgs {
  std::string model;
  std::string data;
  std::string out;
  std::string report;
  std::string traces;
  double frame_ms = 10;
  int max_symbols = 10;
};

std::vector<double> RefEnds(const std::vector<Utterance> &data, double frame_ms) {
  std::vector<double> ends;
  for (const auto &u : data)
    ends.push_back(u.end_frames.empty() ? 0 : FrameEndMs(u.end_frames.back(), frame_ms));
  return ends;
}

std::vector<std::string> Ids(const std::vector<Utterance> &data) {
  std::vector<std::string> ids;
  for (const auto &u : data) ids.push_back(u.id);
  return ids;
}

void PrintLatency(const LatencyReport &r) {
  std::cout << "avg_et_ms " << FormatNumber(r.avg_et_ms) << "\n"
            << "pr50_ms " << FormatNumber(r.pr50_ms) << "\n"
            << "pr90_ms " << FormatNumber(r.pr90_ms) << "\n"
            << "num_utts " << r.num_utts << "\n"
            << "num_empty " << r.num_empty << "\n";
}

int RunDecode(const DecodeArgs &a) {
  ToyModel model = LoadModel(a.model);
  auto data = LoadDataset(a.data);
  std::vector<EmissionTrace> traces;
  int64_t errors = 0, ref_tokens = 0;
  for (const auto &u : data) {
    auto r = GreedyDecode(model, u.feats, a.max_symbols, a.frame_ms);
    errors += EditDistance(u.labels.tokens(), r.hypothesis.tokens());
    ref_tokens += u.labels.size();
    traces.push_back(std::move(r.trace));
  }
  if (!a.out.empty()) WriteTracesCsv(Ids(data), traces, a.out);
  std::cout << "token_err "
            << FormatNumber(ref_tokens ? static_cast<double>(errors) / ref_tokens : 0)
            << "\n";
  auto report = LatencyMetrics(traces, RefEnds(data, a.frame_ms), Ids(data));
  PrintLatency(report);
  if (!a.report.empty()) WriteLatencyReportCsv(report, a.report);
  return kExitOk;
}

int RunLatency(const DecodeArgs &a) {
  auto data = LoadDataset(a.data);
  auto ids = Ids(data);
  auto traces = ReadTracesCsv(a.traces, ids, a.frame_ms);
  auto report = LatencyMetrics(traces, RefEnds(data, a.frame_ms), ids);
  PrintLatency(report);
  if (!a.report.empty()) WriteLatencyReportCsv(report, a.report);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench / dump-cif

struct BenchArgs {
  BenchConfig cfg;
  std::string dtype = "f32";
  std::string format = "csv";
  std::string out;
  std::string timing_out;
};

int RunBenchCommand(BenchArgs a, uint64_t seed) {
  if (a.dtype == "f32") {
    a.cfg.dtype = DType::kF32;
  } else if (a.dtype == "f64") {
    a.cfg.dtype = DType::kF64;
  } else {
    Throw(ErrorCode::kInvalidInput, "--dtype must be f32 or f64");
  }
  a.cfg.seed = seed;
  auto report = RunBench(a.cfg);
  const auto format = a.format == "text" ? ReportFormat::kText : ReportFormat::kCsv;
  if (a.out.empty()) {
    std::cout << FormatReport(report, format);
  } else {
    EmitReport(report, a.out, format);
    std::cout << FormatReport(report, ReportFormat::kText);
  }
  if (!a.timing_out.empty()) EmitTimingCsv(report, a.timing_out);
  return kExitOk;
}

struct DumpCifArgs {
  std::string weights;
  int64_t u = 1;
  std::string out;
};

int RunDumpCif(const DumpCifArgs &a) {
  auto raw = ReadVector(a.weights);
  if (raw.empty()) Throw(ErrorCode::kBadDims, a.weights + ": no weights");
  auto scaled = CifScale(raw, a.u).scaled;
  auto boundary = AlignmentBoundary(raw, a.u);
  std::ofstream file;
  std::ostream *out = &std::cout;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) Throw(ErrorCode::kIo, "cannot write " + a.out);
    out = &file;
  }
  *out << "t,omega_raw,omega_scaled,C_t\n";
  for (std::size_t t = 0; t < raw.size(); ++t)
    *out << t << "," << FormatNumber(raw[t]) << "," << FormatNumber(scaled[t]) << ","
         << boundary[t] << "\n";
  if (!*out) Throw(ErrorCode::kIo, "write failed: " + a.out);
  return kExitOk;
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBandInfeasible:
      return kExitInfeasible;
    default:
      return kExitData;
  }
}

int Main(int argc, char **argv) {
  CLI::App app{"Transducer losses over full and band-restricted lattices", "bat"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();

  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--threads", g.threads, "Worker threads (training)")
      ->check(CLI::PositiveNumber);
  app.add_option("--config", g.config,
                 "File of key=value lines; flags on the command line win");

  LossArgs loss;
  auto *loss_cmd = app.add_subcommand("loss", "Full transducer loss of a lattice");
  loss_cmd->add_option("--lattice", loss.lattice, "BAT1 log-probs (T, U+1, V+1)")
      ->required();
  loss_cmd->add_option("--labels", loss.labels, "BAT1 i64 label ids (U)")->required();
  loss_cmd->add_option("--grad-out", loss.grad_out, "Write d loss / d log-probs");

  LossArgs bat;
  auto *bat_cmd = app.add_subcommand("bat-loss", "Band-restricted transducer loss");
  bat_cmd->add_option("--lattice", bat.lattice,
                      "BAT1 log-probs: banded (T, S, V+1) with --window, "
                      "full (T, U+1, V+1) with --cif-weights")
      ->required();
  bat_cmd->add_option("--labels", bat.labels, "BAT1 i64 label ids (U)")->required();
  auto *win = bat_cmd->add_option("--window", bat.window, "BAT1 i64 window starts (T)");
  auto *cif = bat_cmd->add_option("--cif-weights", bat.cif_weights,
                                  "BAT1 raw CIF weights (T); the band is built from them");
  win->excludes(cif);
  cif->excludes(win);
  bat_cmd->add_option("--rd", bat.r_d, "Band radius below the boundary")
      ->check(CLI::NonNegativeNumber);
  bat_cmd->add_option("--ru", bat.r_u, "Band radius above the boundary")
      ->check(CLI::NonNegativeNumber);
  bat_cmd->add_option("--grad-out", bat.grad_out, "Write the banded gradient");

  CheckGradArgs check;
  auto *check_cmd =
      app.add_subcommand("check-grad", "Compare kernel gradients to finite differences");
  check_cmd->add_option("--t", check.t, "Frames");
  check_cmd->add_option("--u", check.u, "Labels");
  check_cmd->add_option("--v", check.v, "Vocabulary size without blank");
  check_cmd->add_option("--step", check.step, "Central difference step");
  check_cmd->add_option("--tolerance", check.tolerance, "Largest accepted relative error");

  SynthArgs synth;
  auto *synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset");
  synth_cmd->add_option("--n", synth.n, "Utterances")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--out", synth.out, "Manifest path")->required();
  synth_cmd->add_option("--vocab", synth.spec.vocab, "Token ids 1..vocab");
  synth_cmd->add_option("--input-dim", synth.spec.input_dim, "Feature dimension");
  synth_cmd->add_option("--min-tokens", synth.spec.min_tokens, "Fewest tokens per utterance");
  synth_cmd->add_option("--max-tokens", synth.spec.max_tokens, "Most tokens per utterance");
  synth_cmd->add_option("--min-frames", synth.spec.min_frames, "Fewest frames per token");
  synth_cmd->add_option("--max-frames", synth.spec.max_frames, "Most frames per token");
  synth_cmd->add_option("--noise", synth.spec.noise, "Gaussian noise stddev");
  synth_cmd->add_flag("--allow-repeats", synth.spec.allow_repeats,
                      "Allow a token to follow itself");

  TrainArgs train;
  auto *train_cmd = app.add_subcommand("train", "Train the toy transducer");
  train_cmd->add_option("--data", train.data, "Training manifest")->required();
  train_cmd->add_option("--eval-data", train.eval_data, "Manifest for token error");
  train_cmd->add_option("--mode", train.mode, "full or bat")
      ->check(CLI::IsMember({"full", "bat"}));
  train_cmd->add_option("--rd", train.cfg.loss.r_d, "Band radius below the boundary")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--ru", train.cfg.loss.r_u, "Band radius above the boundary")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--epochs", train.cfg.epochs, "Passes over the data");
  train_cmd->add_option("--max-steps", train.cfg.max_steps, "Step cap, 0 for none");
  train_cmd->add_option("--batch-size", train.cfg.batch_size, "Utterances per step")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", train.cfg.adam.lr, "Adam learning rate");
  train_cmd->add_option("--final-lr-scale", train.cfg.final_lr_scale,
                        "Learning rate at the last step, relative to --lr");
  train_cmd->add_option("--weight-decay", train.cfg.adam.weight_decay,
                        "Decoupled weight decay");
  train_cmd->add_option("--eval-every", train.cfg.eval_every,
                        "Steps between token error evaluations, 0 to disable");
  train_cmd->add_option("--lambda-trans", train.cfg.loss.lambda_trans,
                        "Transducer loss weight");
  train_cmd->add_option("--lambda-ce", train.cfg.loss.lambda_ce, "CIF CE loss weight");
  train_cmd->add_option("--lambda-qua", train.cfg.loss.lambda_qua,
                        "CIF quantity loss weight");
  train_cmd->add_option("--vocab", train.vocab, "Token ids 1..vocab")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--context", train.dims.context, "Past frames stacked by the encoder")
      ->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--hidden-dim", train.dims.hidden_dim, "Encoder width")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--pred-dim", train.dims.pred_dim, "Predictor width")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--joint-dim", train.dims.joint_dim, "Joint hidden width")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--cif-kernel", train.dims.cif_kernel, "CIF convolution width (odd)")
      ->check(CLI::PositiveNumber);
  train_cmd->add_option("--log", train.log, "Training log CSV (stdout if absent)");
  train_cmd->add_option("--model-out", train.model_out, "Where to save the model");

  DecodeArgs decode;
  auto *decode_cmd = app.add_subcommand("decode", "Greedy decoding with emission latency");
  decode_cmd->add_option("--model", decode.model, "Model JSON")->required();
  decode_cmd->add_option("--data", decode.data, "Manifest")->required();
  decode_cmd->add_option("--frame-ms", decode.frame_ms, "Frame duration")
      ->check(CLI::PositiveNumber);
  decode_cmd->add_option("--max-symbols", decode.max_symbols, "Emissions per frame cap")
      ->check(CLI::PositiveNumber);
  decode_cmd->add_option("--out", decode.out, "Emission traces CSV");
  decode_cmd->add_option("--report", decode.report, "Latency report CSV");

  DecodeArgs latency;
  auto *latency_cmd = app.add_subcommand("latency", "Latency metrics of saved traces");
  latency_cmd->add_option("--traces", latency.traces, "Traces CSV from decode")->required();
  latency_cmd->add_option("--data", latency.data, "Manifest with reference end frames")
      ->required();
  latency_cmd->add_option("--frame-ms", latency.frame_ms, "Frame duration")
      ->check(CLI::PositiveNumber);
  latency_cmd->add_option("--report", latency.report, "Latency report CSV");

  BenchArgs bench;
  auto *bench_cmd = app.add_subcommand("bench", "Time and memory of full vs banded loss");
  bench_cmd->add_option("--n", bench.cfg.n, "Utterances per batch");
  bench_cmd->add_option("--t", bench.cfg.t, "Frames");
  bench_cmd->add_option("--u", bench.cfg.u, "Labels");
  bench_cmd->add_option("--v", bench.cfg.v, "Vocabulary size without blank");
  bench_cmd->add_option("--rd", bench.cfg.r_d, "Band radius below the boundary");
  bench_cmd->add_option("--ru", bench.cfg.r_u, "Band radius above the boundary");
  bench_cmd->add_option("--dtype", bench.dtype, "f32 or f64")
      ->check(CLI::IsMember({"f32", "f64"}));
  bench_cmd->add_option("--repeats", bench.cfg.repeats, "Timed repeats (>= 3)");
  bench_cmd->add_option("--warmup", bench.cfg.warmup, "Untimed repeats first");
  bench_cmd->add_option("--format", bench.format, "csv or text")
      ->check(CLI::IsMember({"csv", "text"}));
  bench_cmd->add_option("--out", bench.out, "Report path (stdout if absent)");
  bench_cmd->add_option("--timing-out", bench.timing_out, "Per-repeat wall times CSV");

  DumpCifArgs dump;
  auto *dump_cmd = app.add_subcommand("dump-cif", "CIF weights and boundary as CSV");
  dump_cmd->add_option("--weights", dump.weights, "BAT1 raw CIF weights (T)")->required();
  dump_cmd->add_option("--u", dump.u, "Number of labels")->check(CLI::PositiveNumber);
  dump_cmd->add_option("--out", dump.out, "CSV path (stdout if absent)");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = MergeConfig(std::move(args));
  } catch (const Error &e) {
    std::cerr << "error: code=" << ErrorCodeName(e.code()) << " exit=" << kExitUsage
              << " message=" << e.what() << "\n";
    return kExitUsage;
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
  try {
    app.parse(args);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*loss_cmd) return RunLoss(loss);
    if (*bat_cmd) {
      if (bat.window.empty() && bat.cif_weights.empty()) {
        std::cerr << "error: code=Usage exit=1 message=bat-loss needs --window or "
                     "--cif-weights\n";
        return kExitUsage;
      }
      return RunBatLoss(bat);
    }
    if (*check_cmd) return RunCheckGrad(check, g.seed);
    if (*synth_cmd) return RunSynth(synth, g.seed);
    if (*train_cmd) return RunTrain(train, g);
    if (*decode_cmd) return RunDecode(decode);
    if (*latency_cmd) return RunLatency(latency);
    if (*bench_cmd) return RunBenchCommand(bench, g.seed);
    if (*dump_cmd) return RunDumpCif(dump);
  } catch (const Error &e) {
    const int code = ExitCodeFor(e.code());
    std::cerr << "error: code=" << ErrorCodeName(e.code()) << " exit=" << code
              << " message=" << e.what() << "\n";
    return code;
  } catch (const std::exception &e) {
    std::cerr << "error: code=Internal exit=" << kExitData << " message=" << e.what()
              << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char **argv) { return Main(argc, argv); }
