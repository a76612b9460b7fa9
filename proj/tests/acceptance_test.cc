// bat/tests/acceptance_test.cc
//
// Copyright (c)  2026  bat-lattice authors
//
// One PASS/FAIL line per acceptance criterion. Arguments select criteria by
// number (default: all); the exit status is nonzero if any selected one fails.
// Criteria 9-11 train ten toy models and take a while.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bat/bat_loss.h"
#include "bat/bench.h"
#include "bat/cif.h"
#include "bat/dataset.h"
#include "bat/decode.h"
#include "bat/format.h"
#include "bat/log_math.h"
#include "bat/model.h"
#include "bat/rnnt_loss.h"
#include "bat/train.h"
#include "oracle/path_enumeration.h"

namespace bat {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// Collects failures; the first few are kept for the report line.
class Verdict {
 public:
  void Check(bool ok, const std::string &what) {
    if (ok) return;
    ++failures_;
    if (notes_.size() < 3) notes_.push_back(what);
  }
  bool ok() const { return failures_ == 0; }
  std::string Notes() const {
    std::string s;
    for (const auto &n : notes_) s += (s.empty() ? "" : "; ") + n;
    if (failures_ > static_cast<int64_t>(notes_.size()))
      s += "; +" + std::to_string(failures_ - notes_.size()) + " more";
    return s;
  }

 private:
  int64_t failures_ = 0;
  std::vector<std::string> notes_;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome Finish(const Verdict &v, const std::string &summary) {
  return {v.ok(), v.ok() ? summary : summary + "; " + v.Notes()};
}

std::string Num(double x) { return FormatNumber(x); }

std::vector<int64_t> RandomBoundary(Rng &rng, int64_t T, int64_t U) {
  std::vector<double> raw(T);
  for (auto &w : raw) w = rng.Uniform(0.05, 1.0);
  return CifBoundary(ClampScaledWeights(CifScale(raw, U).scaled));
}

// Smallest distance of an interior cumsum from an integer.
double CumsumMargin(std::span<const double> w) {
  double cs = 0, margin = 1;
  for (std::size_t t = 0; t + 1 < w.size(); ++t) {
    cs += w[t];
    margin = std::min(margin, std::abs(cs - std::round(cs)));
  }
  return margin;
}

// ---------------------------------------------------------------------------

Outcome OracleEquivalence() {
  auto start = Clock::now();
  Rng rng(1);
  Verdict v;
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    int64_t T = rng.UniformInt(1, 4), U = rng.UniformInt(0, 3), V = rng.UniformInt(1, 3);
    auto lp = oracle::RandomLattice(rng, T, U, V);
    auto y = oracle::RandomLabels(rng, U, V);
    double diff = std::abs(RnntLoss(LogitLattice<double>(lp), y).loss -
                           oracle::RnntLossBruteForce(lp, y));
    worst = std::max(worst, diff);
    v.Check(diff <= 1e-9, "instance " + std::to_string(i) + " off by " + Num(diff));
  }
  double secs = Seconds(start);
  v.Check(secs < 10, "took " + Num(secs) + " s");
  return Finish(v, "200 instances, max |diff| " + Num(worst) + ", " + Num(secs) + " s");
}

Outcome DiagonalIdentity() {
  Rng rng(2);
  Verdict v;
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    int64_t T = rng.UniformInt(1, 8), U = rng.UniformInt(0, 6);
    LogitLattice<double> lat(oracle::RandomLattice(rng, T, U, 4));
    auto y = oracle::RandomLabels(rng, U, 4);
    auto alpha = RnntForward(lat, y);
    auto beta = RnntBackward(lat, y);
    const double log_z = alpha(T - 1, U) + lat.log_probs()(T - 1, U, kBlank);
    for (int64_t n = 0; n <= T - 1 + U; ++n) {
      double acc = kNegInf;
      for (int64_t t = 0; t < T; ++t) {
        int64_t u = n - t;
        if (u >= 0 && u <= U) acc = LogSumExp(acc, alpha(t, u) + beta(t, u));
      }
      worst = std::max(worst, std::abs(acc - log_z));
      v.Check(std::abs(acc - log_z) <= 1e-9,
              "instance " + std::to_string(i) + " diagonal " + std::to_string(n));
    }
  }
  return Finish(v, "100 instances, max |diff| " + Num(worst));
}

Outcome GradientChecks() {
  auto start = Clock::now();
  Verdict v;
  std::map<std::string, double> worst;
  auto record = [&](const std::string &name, double err) {
    worst[name] = std::max(worst[name], err);
    v.Check(err < 1e-4, name + " rel err " + Num(err));
  };
  Rng rng(3);

  for (int i = 0; i < 30; ++i) {
    int64_t T = rng.UniformInt(1, 4), U = rng.UniformInt(0, 3), V = rng.UniformInt(1, 3);
    auto lp = oracle::RandomLattice(rng, T, U, V);
    auto y = oracle::RandomLabels(rng, U, V);
    auto r = RnntLoss(LogitLattice<double>(lp), y);
    auto fd = oracle::CentralDifference(
        [&](const std::vector<double> &x) {
          return RnntLoss(LogitLattice<double>(Tensor<double>(lp.Dims(), x)), y).loss;
        },
        lp.Storage(), 1e-5);
    record("rnnt_loss", oracle::MaxRelativeError(r.grad.Storage(), fd));
  }

  for (int i = 0; i < 30; ++i) {
    int64_t U = rng.UniformInt(1, 4), T = U + rng.UniformInt(0, 4);
    auto lp = oracle::RandomLattice(rng, T, U, 3);
    auto y = oracle::RandomLabels(rng, U, 3);
    auto w = BuildWindow(RandomBoundary(rng, T, U), U, 0, 1);
    auto banded = GatherBand(LogitLattice<double>(lp), w);
    auto r = BatLoss(banded, y);
    auto fd = oracle::CentralDifference(
        [&](const std::vector<double> &x) {
          return BatLoss(BandedLattice<double>{w, Tensor<double>(banded.log_probs.Dims(), x)},
                         y)
              .loss;
        },
        banded.log_probs.Storage(), 1e-5);
    record("bat_loss", oracle::MaxRelativeError(r.grad.Storage(), fd));
  }

  auto matrix = [&](int64_t rows, int64_t cols) {
    Tensor<double> m({rows, cols});
    for (auto &x : m.Data()) x = rng.Normal();
    return m;
  };

  for (int i = 0; i < 10; ++i) {
    const int64_t U = rng.UniformInt(1, 4), D = 4, V = 5;
    auto e = matrix(U, D), w = matrix(V, D);
    Tensor<double> b({V});
    for (auto &x : b.Data()) x = rng.Normal();
    auto y = oracle::RandomLabels(rng, U, V);
    auto r = CifCeLoss(e, y, w, b);
    auto fd_w = oracle::CentralDifference(
        [&](const std::vector<double> &x) {
          return CifCeLoss(e, y, Tensor<double>(w.Dims(), x), b).loss;
        },
        w.Storage(), 1e-5);
    auto fd_b = oracle::CentralDifference(
        [&](const std::vector<double> &x) {
          return CifCeLoss(e, y, w, Tensor<double>(b.Dims(), x)).loss;
        },
        b.Storage(), 1e-5);
    auto fd_e = oracle::CentralDifference(
        [&](const std::vector<double> &x) {
          return CifCeLoss(Tensor<double>(e.Dims(), x), y, w, b).loss;
        },
        e.Storage(), 1e-5);
    record("cif_ce_loss", oracle::MaxRelativeError(r.grad_weight.Storage(), fd_w));
    record("cif_ce_loss", oracle::MaxRelativeError(r.grad_bias.Storage(), fd_b));
    record("cif_ce_loss", oracle::MaxRelativeError(r.grad_integrated.Storage(), fd_e));
  }

  for (int i = 0; i < 40; ++i) {
    const int64_t U = rng.UniformInt(1, 4), T = U + rng.UniformInt(1, 6), D = 3;
    std::vector<double> raw(T);
    do {
      for (auto &w : raw) w = rng.Uniform(0.05, 0.95);
    } while (CumsumMargin(CifScale(raw, U).scaled) < 1e-3);
    auto h = matrix(T, D), G = matrix(U, D);
    auto objective = [&](const std::vector<double> &r, const Tensor<double> &hh) {
      auto e = CifFire(CifScale(r, U).scaled, hh, U).integrated;
      return std::inner_product(e.Data().begin(), e.Data().end(), G.Data().begin(), 0.0);
    };
    auto weights = CifScale(raw, U);
    auto back = CifBackward(G, CifFire(weights.scaled, h, U).allocation, h, weights);
    auto fd_raw = oracle::CentralDifference(
        [&](const std::vector<double> &x) { return objective(x, h); }, raw, 1e-5);
    auto fd_h = oracle::CentralDifference(
        [&](const std::vector<double> &x) {
          return objective(raw, Tensor<double>(h.Dims(), x));
        },
        h.Storage(), 1e-5);
    record("cif_backward", oracle::MaxRelativeError(back.grad_raw, fd_raw));
    record("cif_backward", oracle::MaxRelativeError(back.grad_h.Storage(), fd_h));
  }

  ModelDims d;
  d.input_dim = 3;
  d.context = 1;
  d.hidden_dim = 4;
  d.pred_dim = 3;
  d.joint_dim = 5;
  d.vocab = 3;
  const int64_t T = 5;
  const LabelSeq y({2, 3});
  for (auto mode : {TrainMode::kFull, TrainMode::kBat}) {
    LossConfig cfg;
    cfg.mode = mode;
    cfg.r_d = 0;
    cfg.r_u = 0;
    for (uint64_t seed = 1, found = 0; found < 3; ++seed) {
      ToyModel m = ToyModel::Init(d, seed);
      Rng prng(seed + 500);
      for (auto *p : m.Parameters())
        for (auto &x : p->Data()) x += prng.Normal(0, 0.3);
      Tensor<double> x({T, d.input_dim});
      for (auto &e : x.Data()) e = prng.Normal();
      auto scaled = CifScale(CifPredictWeights(Encode(m, x), m.cif), y.size()).scaled;
      if (CumsumMargin(scaled) < 1e-3 || CumsumMargin(ClampScaledWeights(scaled)) < 1e-3)
        continue;
      ++found;
      auto r = BackwardTotal(m, x, y, cfg);
      auto params = m.Parameters();
      auto grads = r.grads.Parameters();
      for (std::size_t p = 0; p < params.size(); ++p) {
        auto fd = oracle::CentralDifference(
            [&](const std::vector<double> &vals) {
              ToyModel q = m;
              *q.Parameters()[p] = Tensor<double>(params[p]->Dims(), vals);
              return BackwardTotal(q, x, y, cfg).losses.total;
            },
            params[p]->Storage(), 1e-5);
        record("backward_total", oracle::MaxRelativeError(grads[p]->Storage(), fd));
      }
    }
  }

  double secs = Seconds(start);
  v.Check(secs < 60, "took " + Num(secs) + " s");
  std::string summary;
  for (const auto &[name, err] : worst) summary += name + " " + Num(err) + ", ";
  return Finish(v, summary + Num(secs) + " s");
}

Outcome BandEquivalence() {
  Rng rng(4);
  Verdict v;
  double worst_loss = 0, worst_grad = 0;
  for (int i = 0; i < 100; ++i) {
    int64_t U = rng.UniformInt(0, 6), T = std::max<int64_t>(1, U) + rng.UniformInt(0, 6);
    LogitLattice<double> lat(oracle::RandomLattice(rng, T, U, 4));
    auto y = oracle::RandomLabels(rng, U, 4);
    // Any radii with S >= U + 1 cover the whole lattice.
    int32_t rd = static_cast<int32_t>(rng.UniformInt(0, U));
    int32_t ru = static_cast<int32_t>(std::max<int64_t>(0, U - 1 - rd) + rng.UniformInt(0, 2));
    auto c = U > 0 ? RandomBoundary(rng, T, U) : std::vector<int64_t>(T, 0);
    auto w = BuildWindow(c, U, rd, ru);
    v.Check(w.IsFullCover(), "window not full cover");
    auto full = RnntLoss(lat, y);
    auto band = BatLoss(GatherBand(lat, w), y);
    auto scattered = ScatterBand(band.grad, w);
    double dl = std::abs(full.loss - band.loss);
    double dg = 0;
    for (std::size_t k = 0; k < scattered.Storage().size(); ++k)
      dg = std::max(dg, std::abs(scattered.Storage()[k] - full.grad.Storage()[k]));
    worst_loss = std::max(worst_loss, dl);
    worst_grad = std::max(worst_grad, dg);
    v.Check(dl <= 1e-9 && dg <= 1e-9, "instance " + std::to_string(i));
  }
  return Finish(v, "100 instances, max loss diff " + Num(worst_loss) + ", max grad diff " +
                       Num(worst_grad));
}

Outcome BandMonotonicity() {
  Rng rng(5);
  Verdict v;
  int64_t comparisons = 0;
  for (int i = 0; i < 50; ++i) {
    int64_t U = rng.UniformInt(1, 8), T = U + rng.UniformInt(0, 10);
    LogitLattice<double> lat(oracle::RandomLattice(rng, T, U, 4));
    auto y = oracle::RandomLabels(rng, U, 4);
    auto c = RandomBoundary(rng, T, U);
    std::map<std::pair<int32_t, int32_t>, double> loss;
    for (int32_t rd = 0; rd <= 3; ++rd)
      for (int32_t ru = 0; ru <= 3; ++ru)
        loss[{rd, ru}] = BatLoss(GatherBand(lat, BuildWindow(c, U, rd, ru)), y).loss;
    for (const auto &[small, ls] : loss)
      for (const auto &[large, ll] : loss) {
        if (large.first < small.first || large.second < small.second || large == small)
          continue;
        ++comparisons;
        v.Check(ll <= ls + 1e-12, "instance " + std::to_string(i) + " radii (" +
                                      std::to_string(large.first) + "," +
                                      std::to_string(large.second) + ") lost mass");
      }
  }
  return Finish(v, "50 instances, " + std::to_string(comparisons) + " nested radius pairs");
}

Outcome CifInvariants() {
  Rng rng(6);
  Verdict v;
  double worst = 0;
  for (int i = 0; i < 500; ++i) {
    int64_t U = rng.UniformInt(1, 12), T = U + rng.UniformInt(0, 30);
    std::vector<double> raw(T);
    for (auto &w : raw) w = rng.Uniform(0.01, 1.0);
    auto scaled = CifScale(raw, U).scaled;
    auto c = CifBoundary(ClampScaledWeights(scaled));
    bool steps_ok = c[0] >= 0 && c[0] <= 1;
    for (int64_t t = 1; t < T; ++t)
      steps_ok = steps_ok && (c[t] - c[t - 1] == 0 || c[t] - c[t - 1] == 1);
    v.Check(steps_ok, "boundary step outside {0,1} in vector " + std::to_string(i));
    v.Check(c.back() == U, "C_T != U in vector " + std::to_string(i));

    auto fired = CifFire(scaled, Tensor<double>({T, 1}, 1.0), U);
    std::vector<double> per_token(U, 0);
    std::set<int64_t> tokens;
    for (const auto &a : fired.allocation) {
      per_token[a.token] += a.portion;
      tokens.insert(a.token);
    }
    v.Check(fired.integrated.Dim(0) == U && static_cast<int64_t>(tokens.size()) == U,
            "firing count != U in vector " + std::to_string(i));
    for (double s : per_token) {
      worst = std::max(worst, std::abs(s - kCifThreshold));
      v.Check(std::abs(s - kCifThreshold) <= 1e-6,
              "token weight " + Num(s) + " in vector " + std::to_string(i));
    }
  }
  return Finish(v, "500 weight vectors, max |token weight - 1| " + Num(worst));
}

Outcome WindowConstruction() {
  Verdict v;
  auto fig = BuildWindow(std::vector<int64_t>{1, 1, 1, 2, 2, 3, 3, 4, 4, 4}, 4, 1, 1);
  v.Check(fig.starts == std::vector<int64_t>{0, 0, 0, 1, 1, 1, 1, 1, 1, 1},
          "example alignment gave a different window");
  Rng rng(7);
  int64_t infeasible = 0;
  for (int i = 0; i < 2000; ++i) {
    int64_t T = rng.UniformInt(1, 15), U = rng.UniformInt(0, 20);
    int32_t rd = static_cast<int32_t>(rng.UniformInt(0, 3));
    int32_t ru = static_cast<int32_t>(rng.UniformInt(0, 3));
    std::vector<int64_t> c(T);
    if (U <= T && U > 0) {
      c = RandomBoundary(rng, T, U);
    } else {
      for (auto &x : c) x = rng.UniformInt(0, U);
      std::sort(c.begin(), c.end());
    }
    const bool expect_infeasible = U > T + rd + ru;
    bool raised = false;
    BandWindow w;
    try {
      w = BuildWindow(c, U, rd, ru);
    } catch (const Error &e) {
      raised = e.code() == ErrorCode::kBandInfeasible;
    }
    v.Check(raised == expect_infeasible, "infeasibility mismatch at T=" + std::to_string(T) +
                                             " U=" + std::to_string(U));
    if (raised) {
      ++infeasible;
      continue;
    }
    const int64_t S = w.width;
    bool ok = w.starts[0] == 0 && w.starts[T - 1] == U + 1 - S;
    for (int64_t t = 1; t < T; ++t) {
      int64_t step = w.starts[t] - w.starts[t - 1];
      ok = ok && (step == 0 || step == 1);
    }
    v.Check(ok, "window invariant broken at instance " + std::to_string(i));
  }
  return Finish(v, "example window matches; 2000 random windows, " +
                       std::to_string(infeasible) + " infeasible");
}

// ---------------------------------------------------------------------------

BenchConfig DefaultBenchConfig() {
  BenchConfig c;
  c.n = 1;
  c.t = 200;
  c.u = 50;
  c.v = 500;
  c.r_d = 2;
  c.r_u = 2;
  c.dtype = DType::kF32;
  c.repeats = 9;
  c.warmup = 1;
  c.seed = 1;
  return c;
}

std::string first_bench_csv;

Outcome MemoryAnalog() {
  auto start = Clock::now();
  Verdict v;
  auto r = RunBench(DefaultBenchConfig());
  first_bench_csv = FormatReport(r, ReportFormat::kCsv);
  v.Check(r.s == 6, "band width " + std::to_string(r.s));
  // 6/51 exactly, compared in integers.
  v.Check(r.banded.peak_tracked_bytes * 51 == r.full.peak_tracked_bytes * 6,
          "tracked memory ratio " + Num(r.MemoryRatio()));
  v.Check(r.full.lattice_bytes == 200LL * 51 * 501 * 4 &&
              r.banded.lattice_bytes == 200LL * 6 * 501 * 4,
          "lattice bytes differ from the analytic count");
  const double time_ratio = r.banded.median_ms / r.full.median_ms;
  v.Check(time_ratio <= 0.5, "banded/full time " + Num(time_ratio));
  double secs = Seconds(start);
  v.Check(secs < 120, "took " + Num(secs) + " s");
  return Finish(v, "banded/full memory " + std::to_string(r.banded.peak_tracked_bytes) + "/" +
                       std::to_string(r.full.peak_tracked_bytes) + " = " +
                       Num(1 / r.MemoryRatio()) + ", time " + Num(r.banded.median_ms) +
                       "/" + Num(r.full.median_ms) + " ms, " + Num(secs) + " s");
}

// ---------------------------------------------------------------------------
// Toy training. All runs share one dataset; the seed picks the initial
// parameters and the batch order.

const std::vector<Utterance> &TrainSet() {
  static const auto data = SynthTask(1001, 2000, SynthSpec{});
  return data;
}

const std::vector<Utterance> &HeldOut() {
  static const auto data = SynthTask(2002, 500, SynthSpec{});
  return data;
}

struct RecipeRun {
  std::vector<std::string> log;
  double token_err = 0;
  int64_t steps = 0;
  double seconds = 0;
  bool evals_match_band = true;
  ToyModel model;
};

TrainConfig Recipe(TrainMode mode, uint64_t seed) {
  TrainConfig cfg;
  cfg.loss.mode = mode;
  cfg.loss.r_d = 2;
  cfg.loss.r_u = 2;
  cfg.adam.lr = 1e-2;
  cfg.adam.weight_decay = 0.1;
  cfg.final_lr_scale = 0.05;
  cfg.batch_size = 8;
  cfg.epochs = 12;
  cfg.max_steps = 3000;
  cfg.eval_every = 1000;
  cfg.seed = seed;
  return cfg;
}

RecipeRun TrainRecipe(TrainMode mode, uint64_t seed) {
  auto start = Clock::now();
  RecipeRun run;
  run.model = ToyModel::Init(ModelDims{}, seed);
  auto result = Train(run.model, TrainSet(), HeldOut(), Recipe(mode, seed));
  run.seconds = Seconds(start);
  run.steps = result.steps;
  for (const auto &row : result.log) {
    run.log.push_back(FormatTrainLogRow(row));
    run.evals_match_band = run.evals_match_band && row.joint_evals == row.band_cells;
  }
  run.token_err = result.log.empty() ? 1.0 : result.log.back().token_err;
  std::fprintf(stderr, "  trained %s seed %llu: %lld steps, token error %s, %s s\n",
               TrainModeName(mode), static_cast<unsigned long long>(seed),
               static_cast<long long>(run.steps), Num(run.token_err).c_str(),
               Num(run.seconds).c_str());
  return run;
}

std::map<std::pair<TrainMode, uint64_t>, RecipeRun> runs;

const RecipeRun &Run(TrainMode mode, uint64_t seed) {
  auto key = std::make_pair(mode, seed);
  auto it = runs.find(key);
  if (it == runs.end()) it = runs.emplace(key, TrainRecipe(mode, seed)).first;
  return it->second;
}

Outcome ToyTraining() {
  Verdict v;
  std::string summary;
  for (auto mode : {TrainMode::kFull, TrainMode::kBat}) {
    const auto &run = Run(mode, 1);
    const std::string name = TrainModeName(mode);
    v.Check(run.steps <= 3000, name + " ran " + std::to_string(run.steps) + " steps");
    v.Check(run.token_err <= 0.05, name + " token error " + Num(run.token_err));
    v.Check(run.seconds < 600, name + " took " + Num(run.seconds) + " s");
    summary += name + " " + Num(100 * run.token_err) + "% in " + std::to_string(run.steps) +
               " steps (" + Num(run.seconds) + " s), ";
  }
  const auto &bat = Run(TrainMode::kBat, 1);
  v.Check(bat.evals_match_band, "logged joint evaluations differ from band cells");
  // Independent count: every utterance evaluates T * min(S, U + 1) cells.
  LossConfig cfg = Recipe(TrainMode::kBat, 1).loss;
  int64_t checked = 0;
  for (const auto &u : HeldOut()) {
    if (checked == 200) break;
    auto r = BackwardTotal(bat.model, u.feats, u.labels, cfg);
    const int64_t S = std::min<int64_t>(BandWidth(cfg.r_d, cfg.r_u), u.labels.size() + 1);
    v.Check(r.losses.joint_evals == u.feats.Dim(0) * S, u.id + " joint evaluations");
    ++checked;
  }
  return Finish(v, summary + "bat joint evals == T*S on every step and " +
                       std::to_string(checked) + " spot checks");
}

double Median(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  return n % 2 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

Outcome LatencyDirection() {
  Verdict v;
  std::map<TrainMode, std::vector<double>> avg_et;
  std::vector<double> ref_end;
  for (const auto &u : HeldOut()) ref_end.push_back(FrameEndMs(u.end_frames.back(), 10));
  for (auto mode : {TrainMode::kFull, TrainMode::kBat})
    for (uint64_t seed = 1; seed <= 5; ++seed) {
      const auto &run = Run(mode, seed);
      std::vector<EmissionTrace> traces;
      for (const auto &u : HeldOut()) traces.push_back(GreedyDecode(run.model, u.feats).trace);
      auto rep = LatencyMetrics(traces, ref_end);
      v.Check(rep.pr50_ms <= rep.pr90_ms, "PR50 > PR90");
      avg_et[mode].push_back(rep.avg_et_ms);
    }
  const double full = Median(avg_et[TrainMode::kFull]);
  const double bat = Median(avg_et[TrainMode::kBat]);
  v.Check(bat <= full, "bat median avg ET above full");
  // Not a check: how many correct greedy paths of the full model already lie
  // inside the band built from its own CIF boundary. If all do, the band
  // removes nothing the full model relies on.
  const auto &ref = Run(TrainMode::kFull, 1);
  const LossConfig band = Recipe(TrainMode::kBat, 1).loss;
  int64_t correct = 0, inside = 0;
  for (const auto &u : HeldOut()) {
    auto r = GreedyDecode(ref.model, u.feats);
    if (r.hypothesis != u.labels) continue;
    ++correct;
    const int64_t U = u.labels.size();
    auto raw = CifPredictWeights(Encode(ref.model, u.feats), ref.model.cif);
    auto w = BuildWindow(AlignmentBoundary(raw, U), U, band.r_d, band.r_u);
    bool ok = true;
    std::size_t k = 0;
    for (int64_t t = 0; t < u.feats.Dim(0); ++t) {
      ok = ok && w.Contains(t, k);
      for (; k < r.trace.events.size() && r.trace.events[k].frame == t; ++k)
        ok = ok && w.Contains(t, k + 1);
    }
    inside += ok;
  }
  auto list = [](const std::vector<double> &x) {
    std::string s;
    for (double e : x) s += (s.empty() ? "" : " ") + Num(e);
    return s;
  };
  return Finish(v, "median avg ET bat " + Num(bat) + " ms vs full " + Num(full) +
                       " ms (bat: " + list(avg_et[TrainMode::kBat]) +
                       "; full: " + list(avg_et[TrainMode::kFull]) + "); full seed 1: " +
                       std::to_string(inside) + "/" + std::to_string(correct) +
                       " correct greedy paths inside the band");
}

Outcome Determinism() {
  Verdict v;
  const auto &first = Run(TrainMode::kBat, 1);
  auto again = TrainRecipe(TrainMode::kBat, 1);
  v.Check(first.log == again.log, "training logs differ");
  for (std::size_t i = 0; i < first.model.Parameters().size(); ++i)
    v.Check(*first.model.Parameters()[i] == *again.model.Parameters()[i],
            "parameters differ");
  if (first_bench_csv.empty())
    first_bench_csv = FormatReport(RunBench(DefaultBenchConfig()), ReportFormat::kCsv);
  auto csv = FormatReport(RunBench(DefaultBenchConfig()), ReportFormat::kCsv);
  v.Check(csv == first_bench_csv, "bench CSVs differ");
  return Finish(v, std::to_string(first.log.size()) + " log rows and " +
                       std::to_string(std::count(csv.begin(), csv.end(), '\n')) +
                       " bench CSV lines identical across two runs");
}

struct Criterion {
  int number;
  const char *name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace bat

int main(int argc, char **argv) {
  using namespace bat;  // NOLINT
  const std::vector<Criterion> all = {
      {1, "oracle equivalence", OracleEquivalence},
      {2, "diagonal identity", DiagonalIdentity},
      {3, "gradient checks", GradientChecks},
      {4, "band equivalence", BandEquivalence},
      {5, "band monotonicity", BandMonotonicity},
      {6, "CIF invariants", CifInvariants},
      {7, "window construction", WindowConstruction},
      {8, "memory and time analog", MemoryAnalog},
      {9, "toy training", ToyTraining},
      {10, "latency direction", LatencyDirection},
      {11, "determinism", Determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto &c : all) {
    if (!selected.empty() && !selected.count(c.number)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %2d [PRIMARY] %-24s %s  %s\n", c.number, c.name,
                o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
