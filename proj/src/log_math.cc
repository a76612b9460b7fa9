// bat/src/log_math.cc
//
// Copyright (c)  2026  bat-lattice authors

#include "bat/log_math.h"

#include <algorithm>

#include "bat/error.h"

namespace bat {

double LogSumExp(std::span<const double> x) {
  double m = kNegInf;
  for (double v : x) {
    if (std::isnan(v)) return v;
    m = std::max(m, v);
  }
  if (m == kNegInf) return kNegInf;
  double sum = 0;
  for (double v : x) sum += std::exp(v - m);
  return m + std::log(sum);
}

void LogSoftmaxInPlace(std::span<double> scores) {
  double m = kNegInf;
  for (double v : scores) {
    if (std::isnan(v)) Throw(ErrorCode::kInvalidInput, "NaN in log_softmax input");
    m = std::max(m, v);
  }
  double sum = 0;
  for (double v : scores) sum += std::exp(v - m);
  double log_z = m + std::log(sum);
  for (double &v : scores) v -= log_z;
}

std::vector<double> LogSoftmax(std::span<const double> scores) {
  std::vector<double> out(scores.begin(), scores.end());
  LogSoftmaxInPlace(out);
  return out;
}

}  // namespace bat
