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

// Masks applied to inputs, the prediction-equivalence relation, and
// binarized attributions.

#ifndef STABCERT_CORE_H_
#define STABCERT_CORE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "stabcert/mask.h"

namespace stabcert {

// Feature values of one input, x in R^n.
using Features = std::vector<double>;
// Model output, a vector of m class scores.
using Scores = std::vector<double>;

// x ⊙ mask: features outside the mask are replaced with 0.
Features ApplyMask(std::span<const double> x, const Mask& mask);

// Index of the largest score; ties go to the lowest index.
std::size_t Argmax(std::span<const double> scores);

// Half the gap between the two largest scores. Requires m >= 2.
double DecisionGap(std::span<const double> scores);

// The relation deciding whether two outputs count as the same prediction.
class PredictionRelation {
 public:
  enum class Kind { kArgmaxEqual, kScalarGap };

  static constexpr double kDefaultGap = 0.5;

  static PredictionRelation ArgmaxEqual() {
    return PredictionRelation(Kind::kArgmaxEqual, 0.0);
  }
  // |a_0 - b_0| <= gamma on single-output models. gamma must be finite and
  // non-negative.
  static PredictionRelation ScalarGap(double gamma = kDefaultGap);

  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }

  // Throws ArgumentError if a model with `num_outputs` outputs cannot be
  // compared under this relation.
  void CheckCompatible(std::size_t num_outputs) const;

 private:
  PredictionRelation(Kind kind, double gamma) : kind_(kind), gamma_(gamma) {}

  Kind kind_;
  double gamma_;
};

// Whether `a` and `b` are the same prediction under `rel`.
bool PredictsSame(std::span<const double> a, std::span<const double> b,
                  const PredictionRelation& rel);

// A feature attribution binarized by top-k selection.
struct Attribution {
  std::vector<double> scores;
  // Feature indices by descending score, ties by ascending index.
  std::vector<std::size_t> ranking;
  std::size_t k = 0;
  Mask mask;
};

// Stable descending order of `scores`.
std::vector<std::size_t> RankByScore(std::span<const double> scores);

// Mask keeping the first k entries of `ranking`.
Mask TopK(std::span<const std::size_t> ranking, std::size_t k);

// Keeps the top max(1, floor(fraction * n)) features.
Attribution BinarizeTopFraction(std::span<const double> scores,
                                double fraction);

// Throws ArgumentError unless `ranking` is a permutation of [0, n).
void CheckPermutation(std::span<const std::size_t> ranking, std::size_t n);

}  // namespace stabcert

#endif  // STABCERT_CORE_H_
