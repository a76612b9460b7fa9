// bat/include/bat/log_math.h
//
// Copyright (c)  2026  bat-lattice authors

#ifndef BAT_LOG_MATH_H_
#define BAT_LOG_MATH_H_

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace bat {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)). kNegInf is the identity, so (-inf) - (-inf) is never
// evaluated.
inline double LogSumExp(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// log(sum(exp(x))) over a span; kNegInf for an empty or all-kNegInf input.
double LogSumExp(std::span<const double> x);

// Max-subtracted log-softmax. Throws kInvalidInput on NaN.
std::vector<double> LogSoftmax(std::span<const double> scores);
void LogSoftmaxInPlace(std::span<double> scores);

}  // namespace bat

#endif  // BAT_LOG_MATH_H_
