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

#include "stabcert/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stabcert/error.h"
#include "stabcert/random.h"

namespace stabcert {
namespace {

std::vector<double> BootstrapMeans(std::span<const double> values,
                                   std::size_t resamples,
                                   std::uint64_t seed) {
  if (values.empty()) throw ArgumentError("bootstrap needs at least one value");
  if (resamples == 0) throw ArgumentError("bootstrap needs resamples >= 1");
  std::vector<double> means(resamples);
  std::vector<double> draw(values.size());
  for (std::size_t b = 0; b < resamples; ++b) {
    Rng rng = MakeRng(seed, {b});
    for (double& v : draw) v = values[UniformIndex(rng, values.size())];
    means[b] = Mean(draw);
  }
  return means;
}

std::vector<double> AverageRanks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double PairwiseSum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return PairwiseSum(values.first(half)) + PairwiseSum(values.subspan(half));
}

double Mean(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("mean of an empty sample");
  return PairwiseSum(values) / static_cast<double>(values.size());
}

double SampleVariance(std::span<const double> values) {
  if (values.size() < 2) throw ArgumentError("variance needs two values");
  const double mean = Mean(values);
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    sq[i] = (values[i] - mean) * (values[i] - mean);
  }
  return PairwiseSum(sq) / static_cast<double>(values.size() - 1);
}

double Quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ArgumentError("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ConfidenceInterval BootstrapMeanCi(std::span<const double> values,
                                   std::size_t resamples, double level,
                                   std::uint64_t seed) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ArgumentError("confidence level must lie in (0, 1)");
  }
  std::vector<double> means = BootstrapMeans(values, resamples, seed);
  std::sort(means.begin(), means.end());
  ConfidenceInterval ci;
  ci.level = level;
  ci.resamples = resamples;
  ci.lower = Quantile(means, (1.0 - level) / 2.0);
  ci.upper = Quantile(means, 1.0 - (1.0 - level) / 2.0);
  return ci;
}

double BootstrapSd(std::span<const double> values, std::size_t resamples,
                   std::uint64_t seed) {
  const std::vector<double> means = BootstrapMeans(values, resamples, seed);
  if (means.size() < 2) return 0.0;
  return std::sqrt(SampleVariance(means));
}

double Spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("Spearman: length mismatch");
  if (a.size() < 2) return 0.0;
  const std::vector<double> ra = AverageRanks(a);
  const std::vector<double> rb = AverageRanks(b);
  const double ma = Mean(ra);
  const double mb = Mean(rb);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace stabcert
