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

#include <string>
#include <vector>

#include "ragastat/types.hpp"

// Two inferential procedures drive the pipeline: a Kolmogorov-Smirnov check
// that a pitch sequence is plausibly normal, and a Levene-type test that two
// sequences share a variance. Both report a p-value against a configured
// alpha; `reject` is always `p_value < alpha`.

namespace ragastat {

enum class TestMethod { KsNormality, Levene };

/// Center used for the Levene absolute deviations. Median (the
/// Brown-Forsythe variant) is the default because pitch sequences are
/// heavy-tailed.
enum class LeveneCenter { Median, Mean };

struct TestResult {
  TestMethod method = TestMethod::KsNormality;
  double statistic = 0.0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  std::vector<Index> group_sizes;
};

/// Standard normal CDF.
double normal_cdf(double z);

/// Regularized incomplete beta function I_x(a, b), continued-fraction
/// evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// Upper tail of the F(d1, d2) distribution at x >= 0.
double f_upper_tail(double x, double d1, double d2);

/// Upper tail of the Kolmogorov distribution,
/// Q(t) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 t^2), clamped to [0, 1].
double kolmogorov_upper_tail(double t);

/// Critical D for a one-sample KS test at the given alpha and sample size,
/// solving Q(sqrt(n) d) = alpha. Provided for callers that want the classic
/// table-style decision; ks_normality itself decides via the p-value.
double ks_critical_value(Index n, double alpha);

/// One-sample KS test of normality against N(mean, sd) fitted from the
/// data. Requires n >= 8. The p-value uses the asymptotic Kolmogorov tail
/// at sqrt(n) * D.
TestResult ks_normality(const Eigen::Ref<const ValueArray>& xs,
                        double alpha = 0.05);

/// Levene's test for equality of variances across k >= 2 groups, each with
/// at least 2 values. With all absolute deviations zero in every group the
/// groups are degenerate and the call throws; zero within-group spread
/// against nonzero between-group spread yields W = inf, p = 0.
TestResult levene(const std::vector<ValueArray>& groups, double alpha = 0.05,
                  LeveneCenter center = LeveneCenter::Median);

}  // namespace ragastat
