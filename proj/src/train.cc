// bat/src/train.cc
//
// Copyright (c)  2026  bat-lattice authors

#include "bat/train.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>

#include "bat/decode.h"
#include "bat/format.h"

namespace bat {

namespace {

struct ItemResult {
  std::optional<ToyModel> grads;  // empty when the utterance was skipped
  LossBreakdown losses;
  int64_t band_cells = 0;
};

ItemResult RunItem(const ToyModel &model, const Utterance &utt,
                   const LossConfig &cfg) {
  ItemResult item;
  auto r = BackwardTotal(model, utt.feats, utt.labels, cfg);
  item.losses = r.losses;
  const int64_t T = utt.feats.Dim(0);
  item.band_cells =
      T * (cfg.mode == TrainMode::kBat ? r.window.width : utt.labels.size() + 1);
  if (r.losses.feasible && std::isfinite(r.losses.total))
    item.grads = std::move(r.grads);
  return item;
}

// Sums items[i].grads with the pairing (0,1) (2,3) ... then (0,2) ... so the
// floating-point result depends only on the batch contents.
std::optional<ToyModel> TreeReduce(std::vector<ItemResult> &items) {
  std::size_t n = items.size();
  for (std::size_t stride = 1; stride < n; stride *= 2)
    for (std::size_t i = 0; i + stride < n; i += 2 * stride) {
      auto &a = items[i].grads;
      auto &b = items[i + stride].grads;
      if (!b) continue;
      if (!a)
        a = std::move(b);
      else
        a->AddScaled(*b, 1.0);
    }
  return n == 0 ? std::nullopt : std::move(items[0].grads);
}

}  // namespace

Adam::Adam(const ModelDims &dims, const AdamConfig &cfg)
    : cfg_(cfg), m_(ToyModel::Zeros(dims)), v_(ToyModel::Zeros(dims)) {}

void Adam::Step(ToyModel &model, const ToyModel &grad) {
  ++step_;
  const double c1 = 1 - std::pow(cfg_.beta1, static_cast<double>(step_));
  const double c2 = 1 - std::pow(cfg_.beta2, static_cast<double>(step_));
  auto params = model.Parameters();
  auto grads = grad.Parameters();
  auto ms = m_.Parameters();
  auto vs = v_.Parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto w = params[p]->Data();
    auto g = grads[p]->Data();
    auto m = ms[p]->Data();
    auto v = vs[p]->Data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1 - cfg_.beta2) * g[i] * g[i];
      w[i] -= cfg_.lr * ((m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.eps) +
                         cfg_.weight_decay * w[i]);
    }
  }
}

TrainResult Train(ToyModel &model, const std::vector<Utterance> &train,
                  const std::vector<Utterance> &eval, const TrainConfig &cfg,
                  const std::function<void(const TrainLogRow &)> &on_row) {
  if (train.empty()) Throw(ErrorCode::kEmptySet, "empty training set");
  if (cfg.batch_size < 1 || cfg.epochs < 0 || cfg.max_steps < 0 ||
      cfg.threads < 1 || cfg.eval_every < 0)
    Throw(ErrorCode::kInvalidInput, "invalid training config");

  Adam adam(model.dims, cfg.adam);
  const Rng root(cfg.seed);
  const auto N = static_cast<int64_t>(train.size());
  const int64_t steps_per_epoch = (N + cfg.batch_size - 1) / cfg.batch_size;
  int64_t total_steps = cfg.epochs * steps_per_epoch;
  if (cfg.max_steps > 0) total_steps = std::min(total_steps, cfg.max_steps);

  TrainResult result;
  std::vector<int64_t> order(N);
  for (int64_t step = 0; step < total_steps; ++step) {
    const int64_t epoch = step / steps_per_epoch;
    if (step % steps_per_epoch == 0) {
      std::iota(order.begin(), order.end(), 0);
      Rng rng = root.Split(static_cast<uint64_t>(epoch));
      for (int64_t i = N - 1; i > 0; --i)
        std::swap(order[i], order[rng.UniformInt(0, i)]);
    }
    const int64_t begin = (step % steps_per_epoch) * cfg.batch_size;
    const int64_t end = std::min(N, begin + cfg.batch_size);
    const int64_t B = end - begin;

    std::vector<ItemResult> items(B);
    auto work = [&](int64_t lo, int64_t hi) {
      for (int64_t i = lo; i < hi; ++i)
        items[i] = RunItem(model, train[order[begin + i]], cfg.loss);
    };
    if (cfg.threads == 1 || B == 1) {
      work(0, B);
    } else {
      const int64_t nt = std::min<int64_t>(cfg.threads, B);
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(nt);
      for (int64_t k = 0; k < nt; ++k)
        pool.emplace_back([&, k] {
          try {
            work(B * k / nt, B * (k + 1) / nt);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        });
      for (auto &th : pool) th.join();
      for (auto &e : errors)
        if (e) std::rethrow_exception(e);
    }

    TrainLogRow row;
    row.step = step + 1;
    int64_t used = 0;
    for (const auto &it : items) {
      row.joint_evals += it.losses.joint_evals;
      row.band_cells += it.band_cells;
      if (!it.grads) {
        ++result.skipped;
        continue;
      }
      ++used;
      row.loss_total += it.losses.total;
      row.loss_trans += it.losses.trans;
      row.loss_ce += it.losses.ce;
      row.loss_qua += it.losses.qua;
    }
    auto grad = TreeReduce(items);
    if (used > 0) {
      const double inv = 1.0 / static_cast<double>(used);
      row.loss_total *= inv;
      row.loss_trans *= inv;
      row.loss_ce *= inv;
      row.loss_qua *= inv;
      for (auto *p : grad->Parameters())
        for (auto &v : p->Data()) v *= inv;
      const double progress =
          total_steps > 1 ? static_cast<double>(step) / (total_steps - 1) : 0.0;
      adam.set_lr(cfg.adam.lr * (1 - (1 - cfg.final_lr_scale) * progress));
      adam.Step(model, *grad);
    }

    row.token_err = std::numeric_limits<double>::quiet_NaN();
    const bool last = step + 1 == total_steps;
    if (!eval.empty() &&
        (last || (cfg.eval_every > 0 && (step + 1) % cfg.eval_every == 0)))
      row.token_err = TokenErrorRate(model, eval);
    result.log.push_back(row);
    if (on_row) on_row(row);
  }
  result.steps = total_steps;
  return result;
}

const char *TrainLogHeader() {
  return "step,loss_total,loss_trans,loss_ce,loss_qua,token_err";
}

std::string FormatTrainLogRow(const TrainLogRow &row) {
  std::string s = std::to_string(row.step);
  for (double v : {row.loss_total, row.loss_trans, row.loss_ce, row.loss_qua})
    s += "," + FormatNumber(v);
  s += ",";
  if (!std::isnan(row.token_err)) s += FormatNumber(row.token_err);
  return s;
}

}  // namespace bat
