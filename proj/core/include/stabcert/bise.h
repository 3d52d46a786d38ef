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

// Insertion and deletion BISE: influence-based scores of attribution
// prefixes, their Hoeffding bounds, the classic insertion/deletion curves,
// and the ranking-stability harness.
//
// The set influence of S on a Boolean function g is
//
//   Inf_g(S) = 2 P[g(z) != g(z')],
//
// where z is uniform on {0,1}^n and z' re-randomizes the coordinates of S.
// A curve point is φ_k = Inf_g(S_k)/2 in [0,1], with S_k the top-k features
// (insertion) or their complement (deletion).

#ifndef STABCERT_BISE_H_
#define STABCERT_BISE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stabcert/core.h"
#include "stabcert/mask.h"
#include "stabcert/model.h"
#include "stabcert/perturb.h"

namespace stabcert {

// Boolean function over masks, evaluated in batches.
class MaskPredicate {
 public:
  virtual ~MaskPredicate() = default;
  virtual std::size_t num_features() const = 0;
  virtual std::vector<std::uint8_t> EvaluateBatch(
      std::span<const Mask> masks) const = 0;
};

// g(α) = 1 iff f(x ⊙ α) is the same prediction as f(x).
class ModelIndicator : public MaskPredicate {
 public:
  ModelIndicator(const Model& model, std::span<const double> x,
                 PredictionRelation rel, int workers = 1);

  std::size_t num_features() const override { return x_.size(); }
  std::vector<std::uint8_t> EvaluateBatch(
      std::span<const Mask> masks) const override;

  const Scores& reference() const { return reference_; }

 private:
  const Model& model_;
  Features x_;
  PredictionRelation rel_;
  int workers_;
  Scores reference_;
};

ModelIndicator DeriveIndicator(const Model& model, std::span<const double> x,
                               const PredictionRelation& rel, int workers = 1);

// g from a table of 2^n values indexed by mask bits.
class TableIndicator : public MaskPredicate {
 public:
  TableIndicator(std::size_t n, std::vector<std::uint8_t> table);

  std::size_t num_features() const override { return n_; }
  std::vector<std::uint8_t> EvaluateBatch(
      std::span<const Mask> masks) const override;

  bool operator()(std::uint64_t bits) const { return table_[bits] != 0; }
  const std::vector<std::uint8_t>& table() const { return table_; }

 private:
  std::size_t n_;
  std::vector<std::uint8_t> table_;
};

// Evaluates g on every mask; n must be within FunctionCap().
TableIndicator Tabulate(const MaskPredicate& g);

// Description of the indicator construction, attached to every score.
inline constexpr const char* kIndicatorNote =
    "g(alpha) = 1 iff f(x * alpha) predicts the same as f(x)";

struct InfluenceEstimate {
  Mask set;
  double inf_hat = 0.0;
  std::size_t m = 0;
  std::size_t flips = 0;
  std::uint64_t seed = 0;
};

// m pairs (z, z'), pair j drawn from the substream (seed, j).
InfluenceEstimate EstimateInfluence(const MaskPredicate& g, const Mask& set,
                                    std::size_t m, std::uint64_t seed);
// Exact Inf_g(S) from a tabulated g.
double ExactInfluence(const TableIndicator& g, const Mask& set);

enum class BiseMode { kInsertion, kDeletion };
enum class AucRule { kMean, kTrapezoid };
enum class InfluenceMethod { kSampled, kExact };

const char* ToString(BiseMode mode);

struct BiseOptions {
  std::size_t step = 4;
  std::size_t m = 100;
  std::uint64_t seed = 0;
  AucRule auc = AucRule::kMean;
  InfluenceMethod influence = InfluenceMethod::kSampled;
};

struct BiseBounds {
  double lower = 0.0;
  double upper = 1.0;
  double delta = 0.1;
  double half_width = 0.0;
  std::vector<double> lower_points;
  std::vector<double> upper_points;
};

struct BiseScore {
  BiseMode mode = BiseMode::kInsertion;
  std::vector<std::size_t> ks;
  std::vector<double> values;
  double auc = 0.0;
  AucRule rule = AucRule::kMean;
  std::size_t step = 0;
  // Samples per curve point; 0 for exact influence.
  std::size_t m = 0;
  std::optional<BiseBounds> bounds;
  std::string note = kIndicatorNote;
};

// k = step, 2 step, ... up to n, with n appended when step does not divide
// it.
std::vector<std::size_t> CurvePoints(std::size_t n, std::size_t step);

double Auc(std::span<const double> values, AucRule rule);

BiseScore ComputeBise(const MaskPredicate& g,
                      std::span<const std::size_t> ranking, BiseMode mode,
                      const BiseOptions& options);
BiseScore InsertionBise(const MaskPredicate& g,
                        std::span<const std::size_t> ranking,
                        const BiseOptions& options);
BiseScore DeletionBise(const MaskPredicate& g,
                       std::span<const std::size_t> ranking,
                       const BiseOptions& options);

// Two-sided Hoeffding bounds with a union bound over the K curve points:
// each φ_k is widened by sqrt(ln(2K/δ)/(2m)) and clamped to [0,1]. With
// probability at least 1-δ the exact AUC lies in [lower, upper].
BiseBounds ComputeBiseBounds(const BiseScore& score, double delta);

struct AttributionCurve {
  std::vector<std::size_t> ks;
  std::vector<double> values;
  double auc = 0.0;
  std::size_t target = 0;
};

// Probability of the originally predicted class with only the top-k
// features kept.
AttributionCurve InsertionTest(const Model& model, std::span<const double> x,
                               std::span<const std::size_t> ranking,
                               std::size_t step, int workers = 1);
// The same with the top-k features removed.
AttributionCurve DeletionTest(const Model& model, std::span<const double> x,
                              std::span<const std::size_t> ranking,
                              std::size_t step, int workers = 1);
// 1 while the prediction survives removing the k most relevant features.
AttributionCurve MorfTest(const Model& model, std::span<const double> x,
                          std::span<const std::size_t> ranking,
                          std::size_t step, int workers = 1);
// As MorfTest, removing the least relevant features first.
AttributionCurve LerfTest(const Model& model, std::span<const double> x,
                          std::span<const std::size_t> ranking,
                          std::size_t step, int workers = 1);

// Scores one ranking; `seed` is fixed per pool member so that repeated
// evaluation of an unchanged ranking gives the same value.
using RankingMetric =
    std::function<double(std::span<const std::size_t>, std::uint64_t)>;

struct RankingStabilityResult {
  // 100 * mean |position change| / pool size, averaged over trials.
  double mean_percent = 0.0;
  double sd_percent = 0.0;
  std::vector<double> trial_percent;
};

// Orders the pool by metric (descending, ties by pool index), perturbs every
// member per trial, re-orders and measures how far members move.
RankingStabilityResult RankingStability(
    const RankingMetric& metric,
    const std::vector<std::vector<std::size_t>>& pool,
    const RankingPerturbation& perturbation, std::size_t trials,
    std::uint64_t seed);

inline const std::vector<std::size_t> kOptimalMGrid = {1,    50,   100,  300,
                                                       500,  1000, 5000, 9000};

struct OptimalMRow {
  std::size_t m = 0;
  double mean = 0.0;
  double variance = 0.0;
};

// For each m, the sample variance of `repeats` independent BISE AUCs.
std::vector<OptimalMRow> OptimalMReport(const MaskPredicate& g,
                                        std::span<const std::size_t> ranking,
                                        BiseMode mode,
                                        std::span<const std::size_t> grid,
                                        std::size_t repeats,
                                        const BiseOptions& options);

}  // namespace stabcert

#endif  // STABCERT_BISE_H_
