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

#include "ragastat/descriptive_stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace ragastat {

double quantile(const Eigen::Ref<const ValueArray>& xs, double p) {
  const Index n = xs.size();
  if (n < 1) throw InsufficientData("quantile: empty sequence");
  if (!(p >= 0.0 && p <= 1.0))
    throw Error("quantile: p must lie in [0, 1]");
  std::vector<double> sorted(xs.data(), xs.data() + n);
  std::sort(sorted.begin(), sorted.end());
  // Position (n+1)p on the 1-based sorted sequence, clamped to [1, n].
  double pos = (static_cast<double>(n) + 1.0) * p;
  pos = std::clamp(pos, 1.0, static_cast<double>(n));
  const auto lo = static_cast<Index>(std::floor(pos));
  const double frac = pos - static_cast<double>(lo);
  if (lo >= n) return sorted[static_cast<std::size_t>(n - 1)];
  const double a = sorted[static_cast<std::size_t>(lo - 1)];
  const double b = sorted[static_cast<std::size_t>(lo)];
  return a + frac * (b - a);
}

double iqr(const Eigen::Ref<const ValueArray>& xs) {
  if (xs.size() < 2) throw InsufficientData("iqr: need at least 2 values");
  return quantile(xs, 0.75) - quantile(xs, 0.25);
}

double median(const Eigen::Ref<const ValueArray>& xs) {
  return quantile(xs, 0.5);
}

DescriptorSet describe(const Eigen::Ref<const ValueArray>& xs,
                       bool mssd_halve, MomentBias bias) {
  const Index n = xs.size();
  if (n < 4) throw InsufficientData("describe: need at least 4 values");
  DescriptorSet d;
  d.n = n;
  d.mean = mean(xs);
  d.variance = variance(xs);
  if (!(d.variance > 0.0))
    throw DegenerateData("describe: zero variance sequence");
  d.sd = std::sqrt(d.variance);
  d.skewness = skewness(xs, bias);
  d.kurtosis_excess = kurtosis_excess(xs, bias);
  d.mssd = mssd(xs, mssd_halve);
  d.iqr = iqr(xs);
  return d;
}

}  // namespace ragastat
