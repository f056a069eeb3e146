// Copyright 2026 The ragastat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>

#include "ragastat/types.hpp"

// Descriptor set over a sequence of pitch values: variance, SD, skewness,
// excess kurtosis, MSSD, IQR. All of these (unlike the mean) are invariant
// under a constant shift of the whole sequence, which is what makes them
// usable across clips sung at different tonics.
//
// The moment statistics are free function templates over Eigen array
// expressions, so `variance(xs + 440.0)` works without a temporary on the
// caller's side.

namespace ragastat {

/// Adjusted: the bias-adjusted skewness/kurtosis most desktop statistics
/// packages report. Raw: plain moment ratios, kept for cross-checking.
enum class MomentBias { Adjusted, Raw };

namespace detail {

template <typename Derived>
typename Derived::PlainObject eval_array(const Eigen::ArrayBase<Derived>& xs) {
  return xs.derived();
}

}  // namespace detail

template <typename Derived>
typename Derived::Scalar mean(const Eigen::ArrayBase<Derived>& xs) {
  if (xs.size() < 1) throw InsufficientData("mean: empty sequence");
  return xs.derived().mean();
}

/// Sample variance with the n-1 denominator.
template <typename Derived>
typename Derived::Scalar variance(const Eigen::ArrayBase<Derived>& xs) {
  using Scalar = typename Derived::Scalar;
  const auto x = detail::eval_array(xs);
  const Index n = x.size();
  if (n < 2) throw InsufficientData("variance: need at least 2 values");
  const Scalar mu = x.mean();
  return (x - mu).square().sum() / static_cast<Scalar>(n - 1);
}

template <typename Derived>
typename Derived::Scalar stddev(const Eigen::ArrayBase<Derived>& xs) {
  using std::sqrt;
  return sqrt(variance(xs));
}

/// Mean squared successive difference: sum of (x[i+1]-x[i])^2 over n-1,
/// halved by default to match the convention of desktop statistics
/// packages (their MSSD is sum d^2 / (2(n-1))).
template <typename Derived>
typename Derived::Scalar mssd(const Eigen::ArrayBase<Derived>& xs,
                              bool halve = true) {
  using Scalar = typename Derived::Scalar;
  const auto x = detail::eval_array(xs);
  const Index n = x.size();
  if (n < 2) throw InsufficientData("mssd: need at least 2 values");
  const Scalar ss =
      (x.tail(n - 1) - x.head(n - 1)).square().sum() / static_cast<Scalar>(n - 1);
  return halve ? ss / Scalar(2) : ss;
}

/// Sample skewness. Adjusted form is g1 * sqrt(n(n-1)) / (n-2).
template <typename Derived>
typename Derived::Scalar skewness(const Eigen::ArrayBase<Derived>& xs,
                                  MomentBias bias = MomentBias::Adjusted) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  const auto x = detail::eval_array(xs);
  const Index n = x.size();
  if (n < 3) throw InsufficientData("skewness: need at least 3 values");
  const Scalar mu = x.mean();
  const auto dev = (x - mu).eval();
  const Scalar m2 = dev.square().sum() / static_cast<Scalar>(n);
  if (!(m2 > Scalar(0)))
    throw DegenerateData("skewness: zero variance sequence");
  const Scalar m3 = dev.cube().sum() / static_cast<Scalar>(n);
  const Scalar g1 = m3 / (m2 * sqrt(m2));
  if (bias == MomentBias::Raw) return g1;
  const Scalar nn = static_cast<Scalar>(n);
  return g1 * sqrt(nn * (nn - 1)) / (nn - 2);
}

/// Sample excess kurtosis. Adjusted form is
/// ((n+1) g2 + 6) (n-1) / ((n-2)(n-3)) with g2 = m4/m2^2 - 3.
template <typename Derived>
typename Derived::Scalar kurtosis_excess(const Eigen::ArrayBase<Derived>& xs,
                                         MomentBias bias = MomentBias::Adjusted) {
  using Scalar = typename Derived::Scalar;
  const auto x = detail::eval_array(xs);
  const Index n = x.size();
  if (n < 4) throw InsufficientData("kurtosis_excess: need at least 4 values");
  const Scalar mu = x.mean();
  const auto dev = (x - mu).eval();
  const Scalar m2 = dev.square().sum() / static_cast<Scalar>(n);
  if (!(m2 > Scalar(0)))
    throw DegenerateData("kurtosis_excess: zero variance sequence");
  const Scalar m4 = dev.square().square().sum() / static_cast<Scalar>(n);
  const Scalar g2 = m4 / (m2 * m2) - Scalar(3);
  if (bias == MomentBias::Raw) return g2;
  const Scalar nn = static_cast<Scalar>(n);
  return ((nn + 1) * g2 + 6) * (nn - 1) / ((nn - 2) * (nn - 3));
}

/// Quantile by the (n+1)p interpolation position rule, positions clamped
/// to [1, n].
double quantile(const Eigen::Ref<const ValueArray>& xs, double p);

/// Q3 - Q1 under the same quantile rule.
double iqr(const Eigen::Ref<const ValueArray>& xs);

double median(const Eigen::Ref<const ValueArray>& xs);

struct DescriptorSet {
  Index n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double sd = 0.0;
  double skewness = 0.0;
  double kurtosis_excess = 0.0;
  double mssd = 0.0;
  double iqr = 0.0;
};

/// All descriptors of one sequence. Requires n >= 4 and nonzero variance.
DescriptorSet describe(const Eigen::Ref<const ValueArray>& xs,
                       bool mssd_halve = true,
                       MomentBias bias = MomentBias::Adjusted);

}  // namespace ragastat
