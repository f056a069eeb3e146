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

#include "ragastat/hypothesis_tests.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ragastat/descriptive_stats.hpp"

namespace ragastat {

namespace {

// Continued-fraction kernel for the regularized incomplete beta, modified
// Lentz iteration.
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3.0e-14;
  constexpr double kFpMin = 1.0e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw Error("regularized_incomplete_beta: continued fraction did not converge");
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw Error("regularized_incomplete_beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) -
                             std::lgamma(b) + a * std::log(x) +
                             b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double f_upper_tail(double x, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0))
    throw Error("f_upper_tail: degrees of freedom must be positive");
  if (std::isnan(x)) throw Error("f_upper_tail: statistic is NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double w = d2 / (d2 + d1 * x);
  return regularized_incomplete_beta(0.5 * d2, 0.5 * d1, w);
}

double kolmogorov_upper_tail(double t) {
  if (std::isnan(t)) throw Error("kolmogorov_upper_tail: NaN statistic");
  if (t <= 0.0) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 1000; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    sum += (j % 2 == 1) ? term : -term;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_critical_value(Index n, double alpha) {
  if (n < 1) throw InsufficientData("ks_critical_value: n must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error("ks_critical_value: alpha must lie in (0, 1)");
  const double root_n = std::sqrt(static_cast<double>(n));
  // Q(sqrt(n) d) is strictly decreasing in d on (0, 1); bisect.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_upper_tail(root_n * mid) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

TestResult ks_normality(const Eigen::Ref<const ValueArray>& xs, double alpha) {
  const Index n = xs.size();
  if (n < 8) throw InsufficientData("ks_normality: need at least 8 values");
  const double mu = mean(xs);
  const double sd = stddev(xs);
  if (!(sd > 0.0)) throw DegenerateData("ks_normality: zero variance sample");
  std::vector<double> sorted(xs.data(), xs.data() + n);
  std::sort(sorted.begin(), sorted.end());
  double d_stat = 0.0;
  const double nn = static_cast<double>(n);
  for (Index i = 0; i < n; ++i) {
    const double cdf = normal_cdf((sorted[static_cast<std::size_t>(i)] - mu) / sd);
    const double upper = (static_cast<double>(i) + 1.0) / nn - cdf;
    const double lower = cdf - static_cast<double>(i) / nn;
    d_stat = std::max({d_stat, upper, lower});
  }
  TestResult r;
  r.method = TestMethod::KsNormality;
  r.statistic = d_stat;
  r.p_value = kolmogorov_upper_tail(std::sqrt(nn) * d_stat);
  r.alpha = alpha;
  r.reject = r.p_value < alpha;
  r.group_sizes = {n};
  return r;
}

TestResult levene(const std::vector<ValueArray>& groups, double alpha,
                  LeveneCenter center) {
  const auto k = static_cast<Index>(groups.size());
  if (k < 2) throw InsufficientData("levene: need at least 2 groups");
  Index total = 0;
  for (const auto& g : groups) {
    if (g.size() < 2)
      throw InsufficientData("levene: every group needs at least 2 values");
    total += g.size();
  }

  std::vector<ValueArray> devs;
  devs.reserve(groups.size());
  for (const auto& g : groups) {
    const double c =
        center == LeveneCenter::Median ? median(g) : mean(g);
    devs.push_back((g - c).abs());
  }

  double grand_sum = 0.0;
  for (const auto& z : devs) grand_sum += z.sum();
  const double grand_mean = grand_sum / static_cast<double>(total);

  double between = 0.0;  // sum n_i (mean_i - grand)^2
  double within = 0.0;   // sum sum (z_ij - mean_i)^2
  for (const auto& z : devs) {
    const double zm = z.mean();
    between += static_cast<double>(z.size()) * (zm - grand_mean) * (zm - grand_mean);
    within += (z - zm).square().sum();
  }

  TestResult r;
  r.method = TestMethod::Levene;
  r.alpha = alpha;
  for (const auto& g : groups) r.group_sizes.push_back(g.size());

  const double df1 = static_cast<double>(k - 1);
  const double df2 = static_cast<double>(total - k);
  if (within <= 0.0) {
    if (between <= 0.0)
      throw DegenerateData(
          "levene: zero spread of absolute deviations in every group");
    r.statistic = std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    r.reject = true;
    return r;
  }
  r.statistic = (df2 / df1) * (between / within);
  r.p_value = f_upper_tail(r.statistic, df1, df2);
  r.reject = r.p_value < alpha;
  return r;
}

}  // namespace ragastat
