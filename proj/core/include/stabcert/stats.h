/*
 * Copyright 2026 The Stabcert Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Small statistics helpers: deterministic sums, bootstrap intervals and
// rank correlation.

#ifndef STABCERT_STATS_H_
#define STABCERT_STATS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace stabcert {

inline constexpr std::size_t kBootstrapResamples = 1000;
inline constexpr double kBootstrapLevel = 0.95;

// Sum with a fixed binary tree over the index order.
double PairwiseSum(std::span<const double> values);
double Mean(std::span<const double> values);
// Unbiased (n - 1) variance; requires at least two values.
double SampleVariance(std::span<const double> values);
// Linear interpolation between order statistics; `sorted` ascending.
double Quantile(std::span<const double> sorted, double q);

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double level = kBootstrapLevel;
  std::size_t resamples = kBootstrapResamples;
};

// Percentile bootstrap interval for the mean.
ConfidenceInterval BootstrapMeanCi(std::span<const double> values,
                                   std::size_t resamples, double level,
                                   std::uint64_t seed);
// Standard deviation of the bootstrap distribution of the mean.
double BootstrapSd(std::span<const double> values, std::size_t resamples,
                   std::uint64_t seed);

// Spearman rank correlation with average ranks for ties; 0 when either
// side is constant.
double Spearman(std::span<const double> a, std::span<const double> b);

}  // namespace stabcert

#endif  // STABCERT_STATS_H_
