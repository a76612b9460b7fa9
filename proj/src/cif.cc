// bat/src/cif.cc
//
// Copyright (c)  2026  bat-lattice authors

#include "bat/cif.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bat/log_math.h"

namespace bat {

namespace {

// Tail of an almost-complete last token that is still fired (rounding).
constexpr double kFireTolerance = 1e-6;
// Slack when comparing the remaining frame weight against the threshold.
constexpr double kFireSlack = 1e-12;
constexpr double kBoundaryTolerance = 1e-9;

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// conv(h) for all frames, (T, D).
Tensor<double> Convolve(const Tensor<double> &h, const CifParams &p) {
  const int64_t T = h.Dim(0);
  const int64_t D = p.Dim();
  const int64_t K = p.KernelWidth();
  const int64_t pad = K / 2;
  Tensor<double> out({T, D});
  for (int64_t t = 0; t < T; ++t)
    for (int64_t o = 0; o < D; ++o) {
      double acc = p.conv_bias(o);
      for (int64_t k = 0; k < K; ++k) {
        int64_t src = t + k - pad;
        if (src < 0 || src >= T) continue;
        for (int64_t i = 0; i < D; ++i)
          acc += p.conv_weight(o, i, k) * h(src, i);
      }
      out(t, o) = acc;
    }
  return out;
}

void CheckCifShapes(const Tensor<double> &h, const CifParams &p) {
  if (h.NumAxes() != 2 || h.Dim(1) != p.Dim())
    Throw(ErrorCode::kDimMismatch, "CIF input must be (T, D) with D = " +
                                       std::to_string(p.Dim()));
  if (p.conv_weight.NumAxes() != 3 || p.conv_weight.Dim(0) != p.Dim() ||
      p.conv_weight.Dim(1) != p.Dim() || p.KernelWidth() % 2 == 0 ||
      p.proj_weight.NumElements() != p.Dim() ||
      p.proj_bias.NumElements() != 1)
    Throw(ErrorCode::kDimMismatch, "inconsistent CIF parameter shapes");
}

}  // namespace

CifParams CifParams::Zeros(int64_t dim, int64_t kernel) {
  CifParams p;
  p.conv_weight = Tensor<double>({dim, dim, kernel});
  p.conv_bias = Tensor<double>({dim});
  p.proj_weight = Tensor<double>({dim});
  p.proj_bias = Tensor<double>({1});
  return p;
}

std::vector<double> CifPredictWeights(const Tensor<double> &h,
                                      const CifParams &params) {
  CheckCifShapes(h, params);
  Tensor<double> conv = Convolve(h, params);
  const int64_t T = h.Dim(0);
  const int64_t D = params.Dim();
  std::vector<double> omega(T);
  for (int64_t t = 0; t < T; ++t) {
    double z = params.proj_bias(0);
    for (int64_t o = 0; o < D; ++o) z += params.proj_weight(o) * conv(t, o);
    omega[t] = Sigmoid(z);
  }
  return omega;
}

CifPredictGrads CifPredictWeightsBackward(const Tensor<double> &h,
                                          const CifParams &params,
                                          std::span<const double> grad_raw) {
  CheckCifShapes(h, params);
  const int64_t T = h.Dim(0);
  const int64_t D = params.Dim();
  const int64_t K = params.KernelWidth();
  const int64_t pad = K / 2;
  if (static_cast<int64_t>(grad_raw.size()) != T)
    Throw(ErrorCode::kDimMismatch, "grad_raw length must equal T");

  Tensor<double> conv = Convolve(h, params);
  CifPredictGrads g;
  g.params = CifParams::Zeros(D, K);
  g.grad_h = Tensor<double>({T, D});

  std::vector<double> dconv(D);
  for (int64_t t = 0; t < T; ++t) {
    double z = params.proj_bias(0);
    for (int64_t o = 0; o < D; ++o) z += params.proj_weight(o) * conv(t, o);
    const double w = Sigmoid(z);
    const double dz = grad_raw[t] * w * (1 - w);
    if (dz == 0) continue;
    g.params.proj_bias(0) += dz;
    for (int64_t o = 0; o < D; ++o) {
      g.params.proj_weight(o) += dz * conv(t, o);
      dconv[o] = dz * params.proj_weight(o);
      g.params.conv_bias(o) += dconv[o];
    }
    for (int64_t k = 0; k < K; ++k) {
      int64_t src = t + k - pad;
      if (src < 0 || src >= T) continue;
      for (int64_t o = 0; o < D; ++o)
        for (int64_t i = 0; i < D; ++i) {
          g.params.conv_weight(o, i, k) += dconv[o] * h(src, i);
          g.grad_h(src, i) += params.conv_weight(o, i, k) * dconv[o];
        }
    }
  }
  return g;
}

CifWeights CifScale(std::span<const double> raw, int64_t num_labels) {
  if (num_labels < 1)
    Throw(ErrorCode::kInvalidInput, "CIF scaling needs U >= 1");
  double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
  if (!(sum >= 1e-8))
    Throw(ErrorCode::kDegenerateWeights,
          "sum of CIF weights " + std::to_string(sum) + " is below 1e-8");
  CifWeights w;
  w.raw.assign(raw.begin(), raw.end());
  w.scale_factor = static_cast<double>(num_labels) / sum;
  w.scaled.resize(raw.size());
  for (std::size_t t = 0; t < raw.size(); ++t)
    w.scaled[t] = raw[t] * w.scale_factor;
  return w;
}

std::vector<double> ClampScaledWeights(std::span<const double> weights,
                                       double cap) {
  std::vector<double> out(weights.begin(), weights.end());
  const int64_t T = static_cast<int64_t>(out.size());
  double carry = 0;
  for (int64_t t = 0; t < T; ++t) {
    double w = out[t] + carry;
    carry = std::max(0.0, w - cap);
    out[t] = carry > 0 ? cap : w;
  }
  for (int64_t t = T - 1; t >= 0 && carry > 0; --t) {
    double room = cap - out[t];
    if (room <= 0) continue;
    if (carry >= room) {
      out[t] = cap;
      carry -= room;
    } else {
      out[t] += carry;
      carry = 0;
    }
  }
  return out;
}

std::vector<int64_t> CifBoundary(std::span<const double> weights,
                                 double threshold) {
  std::vector<int64_t> c(weights.size());
  double cumsum = 0;
  for (std::size_t t = 0; t < weights.size(); ++t) {
    cumsum += weights[t];
    double level = std::ceil(cumsum / threshold - kBoundaryTolerance);
    c[t] = std::max<int64_t>(0, static_cast<int64_t>(level));
  }
  return c;
}

FiredEmbeddings CifFire(std::span<const double> scaled, const Tensor<double> &h,
                        int64_t num_labels, double threshold) {
  const int64_t T = static_cast<int64_t>(scaled.size());
  if (h.NumAxes() != 2 || h.Dim(0) != T)
    Throw(ErrorCode::kDimMismatch, "CIF fire: h must be (T, D)");
  const int64_t D = h.Dim(1);
  const int64_t U = num_labels;

  FiredEmbeddings fired;
  fired.integrated = Tensor<double>({U, D});
  auto &alloc = fired.allocation;

  int64_t token = 0;
  double acc = 0;
  double tail = 0;
  for (int64_t t = 0; t < T; ++t) {
    double rem = scaled[t];
    bool first_piece = true;
    while (rem > 0) {
      if (token == U) {
        tail += rem;
        break;
      }
      const double need = threshold - acc;
      if (rem >= need - kFireSlack) {
        alloc.push_back({t, token, need, true, !first_piece});
        rem -= need;
        acc = 0;
        ++token;
      } else {
        alloc.push_back({t, token, rem, false, !first_piece});
        acc += rem;
        rem = 0;
      }
      first_piece = false;
    }
  }
  if (token == U - 1 && threshold - acc < kFireTolerance && !alloc.empty() &&
      alloc.back().token == token) {
    alloc.back().closes_token = true;
    ++token;
  }
  if (token != U || tail > kFireTolerance)
    Throw(ErrorCode::kFireCountMismatch,
          "CIF fired " + std::to_string(token) + " tokens, expected " +
              std::to_string(U));

  for (const auto &a : alloc) {
    auto dst = fired.integrated.Row(a.token);
    auto src = h.Row(a.frame);
    for (int64_t d = 0; d < D; ++d) dst[d] += a.portion * src[d];
  }
  return fired;
}

CifCeResult CifCeLoss(const Tensor<double> &integrated, const LabelSeq &labels,
                      const Tensor<double> &clf_weight,
                      const Tensor<double> &clf_bias) {
  const int64_t U = labels.size();
  if (clf_weight.NumAxes() != 2 || clf_bias.NumElements() != clf_weight.Dim(0))
    Throw(ErrorCode::kDimMismatch, "classifier must be (V, D) with bias (V)");
  const int64_t V = clf_weight.Dim(0);
  const int64_t D = clf_weight.Dim(1);
  if (integrated.NumAxes() != 2 || integrated.Dim(0) != U ||
      integrated.Dim(1) != D)
    Throw(ErrorCode::kDimMismatch, "fired embeddings must be (U, D)");
  labels.CheckVocab(V);

  CifCeResult r;
  r.grad_weight = Tensor<double>({V, D});
  r.grad_bias = Tensor<double>({V});
  r.grad_integrated = Tensor<double>({U, D});
  if (U == 0) return r;

  const double inv_u = 1.0 / static_cast<double>(U);
  std::vector<double> logits(V);
  for (int64_t u = 0; u < U; ++u) {
    auto e = integrated.Row(u);
    for (int64_t k = 0; k < V; ++k) {
      double z = clf_bias(k);
      auto w = clf_weight.Row(k);
      for (int64_t d = 0; d < D; ++d) z += w[d] * e[d];
      logits[k] = z;
    }
    LogSoftmaxInPlace(logits);
    const int64_t target = labels[u] - 1;
    r.loss -= logits[target] * inv_u;
    for (int64_t k = 0; k < V; ++k) {
      double dz = (std::exp(logits[k]) - (k == target ? 1.0 : 0.0)) * inv_u;
      r.grad_bias(k) += dz;
      auto w = clf_weight.Row(k);
      auto gw = r.grad_weight.Row(k);
      auto ge = r.grad_integrated.Row(u);
      for (int64_t d = 0; d < D; ++d) {
        gw[d] += dz * e[d];
        ge[d] += dz * w[d];
      }
    }
  }
  return r;
}

CifQuantityResult CifQuantityLoss(std::span<const double> raw,
                                  int64_t num_labels) {
  double diff = std::accumulate(raw.begin(), raw.end(), 0.0) -
                static_cast<double>(num_labels);
  CifQuantityResult r;
  r.loss = std::abs(diff);
  double sign = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
  r.grad_raw.assign(raw.size(), sign);
  return r;
}

CifBackwardResult CifBackward(const Tensor<double> &grad_integrated,
                              const std::vector<CifAllocation> &allocation,
                              const Tensor<double> &h,
                              const CifWeights &weights) {
  const int64_t T = h.Dim(0);
  const int64_t D = h.Dim(1);
  if (static_cast<int64_t>(weights.raw.size()) != T ||
      grad_integrated.NumAxes() != 2 || grad_integrated.Dim(1) != D)
    Throw(ErrorCode::kDimMismatch, "CIF backward: inconsistent shapes");

  CifBackwardResult r;
  r.grad_h = Tensor<double>({T, D});
  r.grad_raw.assign(T, 0.0);

  // upper[t]: pieces whose upper end is cumsum_t; lower[t]: pieces whose
  // lower end is cumsum_{t-1}.
  std::vector<double> upper(T, 0.0), lower(T, 0.0);
  for (const auto &a : allocation) {
    auto ge = grad_integrated.Row(a.token);
    auto hx = h.Row(a.frame);
    auto gh = r.grad_h.Row(a.frame);
    double q = 0;
    for (int64_t d = 0; d < D; ++d) {
      gh[d] += a.portion * ge[d];
      q += ge[d] * hx[d];
    }
    if (!a.closes_token) upper[a.frame] += q;
    if (!a.opens_mid_frame) lower[a.frame] += q;
  }

  // d loss / d scaled_s = sum_{t >= s} upper[t] - sum_{t >= s+1} lower[t].
  std::vector<double> grad_scaled(T);
  double suffix_upper = 0, suffix_lower = 0;
  for (int64_t s = T - 1; s >= 0; --s) {
    suffix_upper += upper[s];
    grad_scaled[s] = suffix_upper - suffix_lower;
    suffix_lower += lower[s];
  }

  // scaled_s = raw_s * U / sum(raw).
  const double k = weights.scale_factor;
  double sum_raw = std::accumulate(weights.raw.begin(), weights.raw.end(), 0.0);
  double dot = 0;
  for (int64_t s = 0; s < T; ++s) dot += grad_scaled[s] * weights.raw[s];
  for (int64_t s = 0; s < T; ++s)
    r.grad_raw[s] = k * grad_scaled[s] - k * dot / sum_raw;
  return r;
}

}  // namespace bat
