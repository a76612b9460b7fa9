// bat/src/model.cc
//
// Copyright (c)  2026  bat-lattice authors

#include "bat/model.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bat/log_math.h"
#include "bat/rnnt_loss.h"
#include "json.hpp"

namespace bat {

namespace {

using nlohmann::json;

void FillNormal(Tensor<double> &t, Rng rng, double stddev) {
  for (auto &v : t.Data()) v = rng.Normal(0, stddev);
}

void Axpy(Tensor<double> &dst, const Tensor<double> &src, double a) {
  auto d = dst.Data();
  auto s = src.Data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += a * s[i];
}

// Rows of the joint that are materialized: frame t covers
// u = starts[t] .. starts[t] + rows - 1.
struct JointCache {
  std::vector<int64_t> starts;
  int64_t rows = 0;
  Tensor<double> act;        // (T, R, D_j), tanh outputs
  Tensor<double> log_probs;  // (T, R, V+1)
};

JointCache RunJoint(const ToyModel &m, const Tensor<double> &h,
                    const Tensor<double> &g, std::vector<int64_t> starts,
                    int64_t rows, int64_t *joint_evals) {
  const auto &jp = m.joint;
  const int64_t T = h.Dim(0);
  const int64_t U1 = g.Dim(0);
  const int64_t D = m.dims.hidden_dim;
  const int64_t Dp = m.dims.pred_dim;
  const int64_t Dj = m.dims.joint_dim;
  const int64_t V1 = m.dims.vocab + 1;

  // W_enc h_t + b and W_pred g_u are shared by every cell of a frame / row.
  Tensor<double> enc_proj({T, Dj});
  for (int64_t t = 0; t < T; ++t)
    for (int64_t j = 0; j < Dj; ++j) {
      double acc = jp.bias(j);
      for (int64_t i = 0; i < D; ++i) acc += jp.w_enc(j, i) * h(t, i);
      enc_proj(t, j) = acc;
    }
  Tensor<double> pred_proj({U1, Dj});
  for (int64_t u = 0; u < U1; ++u)
    for (int64_t j = 0; j < Dj; ++j) {
      double acc = 0;
      for (int64_t i = 0; i < Dp; ++i) acc += jp.w_pred(j, i) * g(u, i);
      pred_proj(u, j) = acc;
    }

  JointCache c;
  c.starts = std::move(starts);
  c.rows = rows;
  c.act = Tensor<double>({T, rows, Dj});
  c.log_probs = Tensor<double>({T, rows, V1});
  for (int64_t t = 0; t < T; ++t)
    for (int64_t r = 0; r < rows; ++r) {
      const int64_t u = c.starts[t] + r;
      auto a = c.act.Row(t, r);
      for (int64_t j = 0; j < Dj; ++j)
        a[j] = std::tanh(enc_proj(t, j) + pred_proj(u, j));
      auto out = c.log_probs.Row(t, r);
      for (int64_t k = 0; k < V1; ++k) {
        auto w = jp.w_out.Row(k);
        double acc = 0;
        for (int64_t j = 0; j < Dj; ++j) acc += w[j] * a[j];
        out[k] = acc;
      }
      LogSoftmaxInPlace(out);
    }
  if (joint_evals != nullptr) *joint_evals += T * rows;
  return c;
}

// Backprop of `scale` * d loss / d log_probs through softmax and the joint.
// Accumulates into grads.joint, grad_h (T, D) and grad_g (U+1, D_p).
void JointBackward(const ToyModel &m, const Tensor<double> &h,
                   const Tensor<double> &g, const JointCache &c,
                   const Tensor<double> &grad_lp, double scale,
                   ToyModel &grads, Tensor<double> &grad_h,
                   Tensor<double> &grad_g) {
  const auto &jp = m.joint;
  auto &gj = grads.joint;
  const int64_t T = h.Dim(0);
  const int64_t D = m.dims.hidden_dim;
  const int64_t Dp = m.dims.pred_dim;
  const int64_t Dj = m.dims.joint_dim;
  const int64_t V1 = m.dims.vocab + 1;

  Tensor<double> pre_by_frame({T, Dj});
  Tensor<double> pre_by_row({g.Dim(0), Dj});
  std::vector<double> dlogit(V1), dpre(Dj);
  for (int64_t t = 0; t < T; ++t)
    for (int64_t r = 0; r < c.rows; ++r) {
      auto glp = grad_lp.Row(t, r);
      double total = 0;
      bool any = false;
      for (int64_t k = 0; k < V1; ++k) {
        total += glp[k];
        any = any || glp[k] != 0;
      }
      if (!any) continue;
      auto lp = c.log_probs.Row(t, r);
      for (int64_t k = 0; k < V1; ++k)
        dlogit[k] = scale * (glp[k] - std::exp(lp[k]) * total);

      auto a = c.act.Row(t, r);
      std::fill(dpre.begin(), dpre.end(), 0.0);
      for (int64_t k = 0; k < V1; ++k) {
        if (dlogit[k] == 0) continue;
        auto w = jp.w_out.Row(k);
        auto gw = gj.w_out.Row(k);
        for (int64_t j = 0; j < Dj; ++j) {
          gw[j] += dlogit[k] * a[j];
          dpre[j] += w[j] * dlogit[k];
        }
      }
      const int64_t u = c.starts[t] + r;
      for (int64_t j = 0; j < Dj; ++j) {
        dpre[j] *= 1 - a[j] * a[j];
        pre_by_frame(t, j) += dpre[j];
        pre_by_row(u, j) += dpre[j];
      }
    }

  // h_t and g_u enter every cell of their frame / row identically, so their
  // affine maps only need the per-frame and per-row sums.
  for (int64_t t = 0; t < T; ++t)
    for (int64_t j = 0; j < Dj; ++j) {
      const double d = pre_by_frame(t, j);
      if (d == 0) continue;
      gj.bias(j) += d;
      for (int64_t i = 0; i < D; ++i) {
        gj.w_enc(j, i) += d * h(t, i);
        grad_h(t, i) += jp.w_enc(j, i) * d;
      }
    }
  for (int64_t u = 0; u < g.Dim(0); ++u)
    for (int64_t j = 0; j < Dj; ++j) {
      const double d = pre_by_row(u, j);
      if (d == 0) continue;
      for (int64_t i = 0; i < Dp; ++i) {
        gj.w_pred(j, i) += d * g(u, i);
        grad_g(u, i) += jp.w_pred(j, i) * d;
      }
    }
}

void EncoderBackward(const ToyModel &m, const Tensor<double> &x,
                     const Tensor<double> &h, const Tensor<double> &grad_h,
                     ToyModel &grads) {
  const int64_t T = x.Dim(0);
  const int64_t Din = m.dims.input_dim;
  const int64_t c = m.dims.context;
  for (int64_t t = 0; t < T; ++t)
    for (int64_t o = 0; o < m.dims.hidden_dim; ++o) {
      const double d = grad_h(t, o) * (1 - h(t, o) * h(t, o));
      if (d == 0) continue;
      grads.enc_bias(o) += d;
      auto gw = grads.enc_weight.Row(o);
      for (int64_t j = 0; j <= c; ++j) {
        const int64_t s = t - c + j;
        if (s < 0) continue;
        auto xs = x.Row(s);
        for (int64_t i = 0; i < Din; ++i) gw[j * Din + i] += d * xs[i];
      }
    }
}

void CheckInput(const ToyModel &m, const Tensor<double> &x) {
  if (x.NumAxes() != 2 || x.Dim(1) != m.dims.input_dim)
    Throw(ErrorCode::kDimMismatch,
          "features must be (T, " + std::to_string(m.dims.input_dim) + ")");
  if (x.Dim(0) < 1) Throw(ErrorCode::kInvalidInput, "features have no frames");
}

json TensorToJson(const Tensor<double> &t) {
  return json{{"dims", t.Dims()}, {"data", t.Storage()}};
}

Tensor<double> TensorFromJson(const json &j, const std::vector<int64_t> &dims,
                              const std::string &name) {
  auto got = j.at("dims").get<std::vector<int64_t>>();
  if (got != dims)
    Throw(ErrorCode::kDimMismatch, "model parameter " + name + " has wrong dims");
  return Tensor<double>(dims, j.at("data").get<std::vector<double>>());
}

}  // namespace

ToyModel ToyModel::Zeros(const ModelDims &d) {
  if (d.input_dim < 1 || d.context < 0 || d.hidden_dim < 1 || d.pred_dim < 1 ||
      d.joint_dim < 1 || d.vocab < 1 || d.cif_kernel < 1 || d.cif_kernel % 2 == 0)
    Throw(ErrorCode::kInvalidInput, "invalid model dimensions");
  ToyModel m;
  m.dims = d;
  m.enc_weight = Tensor<double>({d.hidden_dim, d.StackedInputDim()});
  m.enc_bias = Tensor<double>({d.hidden_dim});
  m.embedding = Tensor<double>({d.vocab + 1, d.pred_dim});
  m.joint.w_enc = Tensor<double>({d.joint_dim, d.hidden_dim});
  m.joint.w_pred = Tensor<double>({d.joint_dim, d.pred_dim});
  m.joint.w_out = Tensor<double>({d.vocab + 1, d.joint_dim});
  m.joint.bias = Tensor<double>({d.joint_dim});
  m.cif = CifParams::Zeros(d.hidden_dim, d.cif_kernel);
  m.clf_weight = Tensor<double>({d.vocab, d.hidden_dim});
  m.clf_bias = Tensor<double>({d.vocab});
  return m;
}

ToyModel ToyModel::Init(const ModelDims &d, uint64_t seed) {
  ToyModel m = Zeros(d);
  Rng rng(seed);
  auto fan_in = [](int64_t n) { return 1.0 / std::sqrt(static_cast<double>(n)); };
  FillNormal(m.enc_weight, rng.Split(1), fan_in(d.StackedInputDim()));
  FillNormal(m.embedding, rng.Split(2), 1.0);
  FillNormal(m.joint.w_enc, rng.Split(3), fan_in(d.hidden_dim));
  FillNormal(m.joint.w_pred, rng.Split(4), fan_in(d.pred_dim));
  FillNormal(m.joint.w_out, rng.Split(5), fan_in(d.joint_dim));
  FillNormal(m.cif.conv_weight, rng.Split(6), fan_in(d.hidden_dim * d.cif_kernel));
  FillNormal(m.cif.proj_weight, rng.Split(7), fan_in(d.hidden_dim));
  FillNormal(m.clf_weight, rng.Split(8), fan_in(d.hidden_dim));
  return m;
}

std::vector<Tensor<double> *> ToyModel::Parameters() {
  return {&enc_weight,        &enc_bias,         &embedding,
          &joint.w_enc,       &joint.w_pred,     &joint.w_out,
          &joint.bias,        &cif.conv_weight,  &cif.conv_bias,
          &cif.proj_weight,   &cif.proj_bias,    &clf_weight,
          &clf_bias};
}

std::vector<const Tensor<double> *> ToyModel::Parameters() const {
  auto params = const_cast<ToyModel *>(this)->Parameters();
  return {params.begin(), params.end()};
}

const std::vector<std::string> &ToyModel::ParameterNames() {
  static const std::vector<std::string> names = {
      "enc_weight",      "enc_bias",      "embedding",  "joint_w_enc",
      "joint_w_pred",    "joint_w_out",   "joint_bias", "cif_conv_weight",
      "cif_conv_bias",   "cif_proj_weight", "cif_proj_bias", "clf_weight",
      "clf_bias"};
  return names;
}

void ToyModel::AddScaled(const ToyModel &other, double scale) {
  if (!(dims == other.dims))
    Throw(ErrorCode::kDimMismatch, "model dimensions differ");
  auto mine = Parameters();
  auto theirs = other.Parameters();
  for (std::size_t i = 0; i < mine.size(); ++i) Axpy(*mine[i], *theirs[i], scale);
}

int64_t ToyModel::NumParameters() const {
  int64_t n = 0;
  for (const auto *p : Parameters()) n += p->NumElements();
  return n;
}

void SaveModel(const ToyModel &model, const std::string &path) {
  const auto &d = model.dims;
  json j;
  j["format"] = "bat-toy-model";
  j["version"] = 1;
  j["dims"] = {{"input_dim", d.input_dim},   {"context", d.context},
               {"hidden_dim", d.hidden_dim}, {"pred_dim", d.pred_dim},
               {"joint_dim", d.joint_dim},   {"vocab", d.vocab},
               {"cif_kernel", d.cif_kernel}};
  auto params = model.Parameters();
  const auto &names = ToyModel::ParameterNames();
  for (std::size_t i = 0; i < params.size(); ++i)
    j["params"][names[i]] = TensorToJson(*params[i]);
  std::ofstream out(path);
  if (!out) Throw(ErrorCode::kIo, "cannot write " + path);
  out << j.dump() << "\n";
  if (!out) Throw(ErrorCode::kIo, "write failed: " + path);
}

ToyModel LoadModel(const std::string &path) {
  std::ifstream in(path);
  if (!in) Throw(ErrorCode::kIo, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
    if (j.at("format") != "bat-toy-model" || j.at("version") != 1)
      Throw(ErrorCode::kInvalidInput, path + " is not a toy model file");
    const auto &jd = j.at("dims");
    ModelDims d;
    d.input_dim = jd.at("input_dim");
    d.context = jd.at("context");
    d.hidden_dim = jd.at("hidden_dim");
    d.pred_dim = jd.at("pred_dim");
    d.joint_dim = jd.at("joint_dim");
    d.vocab = jd.at("vocab");
    d.cif_kernel = jd.at("cif_kernel");
    ToyModel m = ToyModel::Zeros(d);
    auto params = m.Parameters();
    const auto &names = ToyModel::ParameterNames();
    for (std::size_t i = 0; i < params.size(); ++i)
      *params[i] = TensorFromJson(j.at("params").at(names[i]), params[i]->Dims(),
                                  names[i]);
    return m;
  } catch (const json::exception &e) {
    Throw(ErrorCode::kInvalidInput, path + ": " + e.what());
  }
}

Tensor<double> Encode(const ToyModel &m, const Tensor<double> &x) {
  CheckInput(m, x);
  const int64_t T = x.Dim(0);
  const int64_t D = m.dims.hidden_dim;
  const int64_t Din = m.dims.input_dim;
  const int64_t c = m.dims.context;
  Tensor<double> h({T, D});
  for (int64_t t = 0; t < T; ++t)
    for (int64_t o = 0; o < D; ++o) {
      auto w = m.enc_weight.Row(o);
      double acc = m.enc_bias(o);
      for (int64_t j = 0; j <= c; ++j) {
        const int64_t s = t - c + j;
        if (s < 0) continue;
        auto xs = x.Row(s);
        for (int64_t i = 0; i < Din; ++i) acc += w[j * Din + i] * xs[i];
      }
      h(t, o) = std::tanh(acc);
    }
  return h;
}

Tensor<double> PredictorStates(const ToyModel &m, const LabelSeq &labels) {
  labels.CheckVocab(m.dims.vocab);
  const int64_t U = labels.size();
  Tensor<double> g({U + 1, m.dims.pred_dim});
  for (int64_t u = 0; u <= U; ++u) {
    auto src = m.embedding.Row(u == 0 ? kBlank : labels[u - 1]);
    std::copy(src.begin(), src.end(), g.Row(u).begin());
  }
  return g;
}

std::vector<double> JointLogits(const ToyModel &m, std::span<const double> h_t,
                                std::span<const double> g_u) {
  const auto &jp = m.joint;
  const int64_t Dj = m.dims.joint_dim;
  if (static_cast<int64_t>(h_t.size()) != m.dims.hidden_dim ||
      static_cast<int64_t>(g_u.size()) != m.dims.pred_dim)
    Throw(ErrorCode::kDimMismatch, "joint input dims");
  std::vector<double> a(Dj);
  for (int64_t j = 0; j < Dj; ++j) {
    double acc = jp.bias(j);
    for (std::size_t i = 0; i < h_t.size(); ++i) acc += jp.w_enc(j, i) * h_t[i];
    for (std::size_t i = 0; i < g_u.size(); ++i) acc += jp.w_pred(j, i) * g_u[i];
    a[j] = std::tanh(acc);
  }
  std::vector<double> out(m.dims.vocab + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    double acc = 0;
    for (int64_t j = 0; j < Dj; ++j) acc += jp.w_out(k, j) * a[j];
    out[k] = acc;
  }
  return out;
}

LogitLattice<double> ForwardFull(const ToyModel &m, const Tensor<double> &x,
                                 const LabelSeq &labels, int64_t *joint_evals) {
  auto h = Encode(m, x);
  auto g = PredictorStates(m, labels);
  auto c = RunJoint(m, h, g, std::vector<int64_t>(h.Dim(0), 0),
                    labels.size() + 1, joint_evals);
  return LogitLattice<double>(std::move(c.log_probs));
}

BandedLattice<double> ForwardBanded(const ToyModel &m, const Tensor<double> &x,
                                    const LabelSeq &labels,
                                    const BandWindow &window,
                                    int64_t *joint_evals) {
  ValidateWindow(window);
  auto h = Encode(m, x);
  if (window.NumFrames() != h.Dim(0) || window.num_labels != labels.size())
    Throw(ErrorCode::kDimMismatch, "window does not match utterance");
  auto g = PredictorStates(m, labels);
  auto c = RunJoint(m, h, g, window.starts, window.width, joint_evals);
  return BandedLattice<double>{window, std::move(c.log_probs)};
}

std::vector<int64_t> AlignmentBoundary(std::span<const double> raw_weights,
                                       int64_t num_labels) {
  if (num_labels == 0) return std::vector<int64_t>(raw_weights.size(), 0);
  auto scaled = CifScale(raw_weights, num_labels).scaled;
  return CifBoundary(ClampScaledWeights(scaled));
}

TrainMode ParseTrainMode(const std::string &s) {
  if (s == "full") return TrainMode::kFull;
  if (s == "bat") return TrainMode::kBat;
  Throw(ErrorCode::kInvalidInput, "mode must be full or bat, got " + s);
}

const char *TrainModeName(TrainMode mode) {
  return mode == TrainMode::kFull ? "full" : "bat";
}

BackwardResult BackwardTotal(const ToyModel &m, const Tensor<double> &x,
                             const LabelSeq &labels, const LossConfig &cfg) {
  if (cfg.lambda_trans < 0 || cfg.lambda_ce < 0 || cfg.lambda_qua < 0 ||
      cfg.r_d < 0 || cfg.r_u < 0)
    Throw(ErrorCode::kInvalidInput, "loss coefficients and radii must be >= 0");
  auto h = Encode(m, x);
  auto g = PredictorStates(m, labels);
  const int64_t T = h.Dim(0);
  const int64_t U = labels.size();
  const bool bat = cfg.mode == TrainMode::kBat;

  BackwardResult res;
  res.grads = ToyModel::Zeros(m.dims);
  Tensor<double> grad_h({T, m.dims.hidden_dim});
  Tensor<double> grad_g({U + 1, m.dims.pred_dim});

  const bool need_cif = bat || cfg.lambda_ce > 0 || cfg.lambda_qua > 0;
  std::vector<double> raw;
  if (need_cif) raw = CifPredictWeights(h, m.cif);

  std::vector<int64_t> starts(T, 0);
  int64_t rows = U + 1;
  if (bat) {
    res.window = BuildWindow(AlignmentBoundary(raw, U), U, cfg.r_d, cfg.r_u);
    starts = res.window.starts;
    rows = res.window.width;
  }

  auto cache = RunJoint(m, h, g, std::move(starts), rows,
                        &res.losses.joint_evals);
  LossResult<double> trans;
  if (bat) {
    BandedLattice<double> lat{res.window, cache.log_probs};
    trans = BatLoss(lat, labels);
  } else {
    trans = RnntLoss(LogitLattice<double>(cache.log_probs), labels);
  }
  res.losses.trans = trans.loss;
  res.losses.feasible = trans.feasible;
  if (trans.feasible && cfg.lambda_trans > 0)
    JointBackward(m, h, g, cache, trans.grad, cfg.lambda_trans, res.grads,
                  grad_h, grad_g);

  std::vector<double> grad_raw(T, 0.0);
  bool cif_grad = false;
  if (cfg.lambda_ce > 0 && U > 0) {
    auto weights = CifScale(raw, U);
    auto fired = CifFire(weights.scaled, h, U);
    auto ce = CifCeLoss(fired.integrated, labels, m.clf_weight, m.clf_bias);
    res.losses.ce = ce.loss;
    Axpy(res.grads.clf_weight, ce.grad_weight, cfg.lambda_ce);
    Axpy(res.grads.clf_bias, ce.grad_bias, cfg.lambda_ce);
    Tensor<double> grad_e = ce.grad_integrated;
    for (auto &v : grad_e.Data()) v *= cfg.lambda_ce;
    auto back = CifBackward(grad_e, fired.allocation, h, weights);
    for (int64_t t = 0; t < T; ++t) grad_raw[t] += back.grad_raw[t];
    Axpy(grad_h, back.grad_h, 1.0);
    cif_grad = true;
  }
  if (cfg.lambda_qua > 0) {
    auto q = CifQuantityLoss(raw, U);
    res.losses.qua = q.loss;
    for (int64_t t = 0; t < T; ++t) grad_raw[t] += cfg.lambda_qua * q.grad_raw[t];
    cif_grad = true;
  }
  if (cif_grad) {
    auto pg = CifPredictWeightsBackward(h, m.cif, grad_raw);
    res.grads.cif = std::move(pg.params);
    Axpy(grad_h, pg.grad_h, 1.0);
  }

  for (int64_t u = 0; u <= U; ++u) {
    auto dst = res.grads.embedding.Row(u == 0 ? kBlank : labels[u - 1]);
    auto src = grad_g.Row(u);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  EncoderBackward(m, x, h, grad_h, res.grads);

  res.losses.total = cfg.lambda_trans * res.losses.trans +
                     cfg.lambda_ce * res.losses.ce +
                     cfg.lambda_qua * res.losses.qua;
  return res;
}

}  // namespace bat
