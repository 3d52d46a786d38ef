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

#include "stabcert/core.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "stabcert/error.h"

namespace stabcert {

Features ApplyMask(std::span<const double> x, const Mask& mask) {
  if (x.size() != mask.size()) {
    throw DimensionError("input has " + std::to_string(x.size()) +
                         " features but mask has " +
                         std::to_string(mask.size()));
  }
  Features out(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (mask.test(i)) out[i] = x[i];
  }
  return out;
}

std::size_t Argmax(std::span<const double> scores) {
  if (scores.empty()) throw ArgumentError("argmax of an empty score vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

double DecisionGap(std::span<const double> scores) {
  if (scores.size() < 2) {
    throw ArgumentError("decision gap needs at least two scores");
  }
  double first = -INFINITY;
  double second = -INFINITY;
  for (double s : scores) {
    if (s > first) {
      second = first;
      first = s;
    } else if (s > second) {
      second = s;
    }
  }
  return (first - second) / 2.0;
}

PredictionRelation PredictionRelation::ScalarGap(double gamma) {
  if (!std::isfinite(gamma) || gamma < 0.0) {
    throw ArgumentError("scalar gap must be finite and non-negative");
  }
  return PredictionRelation(Kind::kScalarGap, gamma);
}

void PredictionRelation::CheckCompatible(std::size_t num_outputs) const {
  if (kind_ == Kind::kArgmaxEqual && num_outputs < 2) {
    throw ArgumentError("argmax comparison needs at least two outputs");
  }
  if (kind_ == Kind::kScalarGap && num_outputs != 1) {
    throw ArgumentError("scalar-gap comparison needs exactly one output");
  }
}

bool PredictsSame(std::span<const double> a, std::span<const double> b,
                  const PredictionRelation& rel) {
  if (a.size() != b.size()) {
    throw DimensionError("outputs have different lengths: " +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  rel.CheckCompatible(a.size());
  if (rel.kind() == PredictionRelation::Kind::kArgmaxEqual) {
    return Argmax(a) == Argmax(b);
  }
  return std::abs(a[0] - b[0]) <= rel.gamma();
}

std::vector<std::size_t> RankByScore(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  return order;
}

Mask TopK(std::span<const std::size_t> ranking, std::size_t k) {
  if (k > ranking.size()) throw ArgumentError("top-k larger than ranking");
  Mask m(ranking.size());
  for (std::size_t i = 0; i < k; ++i) m.set(ranking[i]);
  return m;
}

Attribution BinarizeTopFraction(std::span<const double> scores,
                                double fraction) {
  if (scores.empty()) throw ArgumentError("attribution scores are empty");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ArgumentError("top fraction must lie in (0, 1]");
  }
  Attribution a;
  a.scores.assign(scores.begin(), scores.end());
  a.ranking = RankByScore(scores);
  const auto n = static_cast<double>(scores.size());
  a.k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(fraction * n + 1e-9)));
  a.mask = TopK(a.ranking, a.k);
  return a;
}

void CheckPermutation(std::span<const std::size_t> ranking, std::size_t n) {
  if (ranking.size() != n) {
    throw ArgumentError("ranking has " + std::to_string(ranking.size()) +
                        " entries, expected " + std::to_string(n));
  }
  std::vector<bool> seen(n, false);
  for (std::size_t r : ranking) {
    if (r >= n || seen[r]) throw ArgumentError("ranking is not a permutation");
    seen[r] = true;
  }
}

}  // namespace stabcert
