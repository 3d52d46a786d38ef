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

#include "stabcert/bise.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "stabcert/boolean_function.h"
#include "stabcert/error.h"
#include "stabcert/random.h"
#include "stabcert/stats.h"

namespace stabcert {
namespace {

Mask UniformMask(std::size_t n, Rng& rng) {
  Mask z(n);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 64 == 0) word = rng();
    if ((word >> (i % 64)) & 1) z.set(i);
  }
  return z;
}

std::vector<std::size_t> CheckedCurve(std::size_t n, std::size_t step,
                                      std::span<const std::size_t> ranking) {
  CheckPermutation(ranking, n);
  return CurvePoints(n, step);
}

double PointInfluence(const MaskPredicate& g, const TableIndicator* table,
                      const Mask& set, const BiseOptions& options,
                      std::uint64_t seed) {
  if (table != nullptr) return ExactInfluence(*table, set);
  return EstimateInfluence(g, set, options.m, seed).inf_hat;
}

enum class Removal { kKeepTop, kDropTop, kDropBottom };

AttributionCurve ClassicCurve(const Model& model, std::span<const double> x,
                              std::span<const std::size_t> ranking,
                              std::size_t step, int workers, Removal removal,
                              bool retention) {
  const std::size_t n = model.num_features();
  if (x.size() != n) throw DimensionError("input length differs from model");
  AttributionCurve curve;
  curve.ks = CheckedCurve(n, step, ranking);
  std::vector<Features> full{Features(x.begin(), x.end())};
  curve.target = Argmax(EvaluateMany(model, full, 1).front());

  std::vector<std::size_t> reversed(ranking.rbegin(), ranking.rend());
  std::vector<Mask> masks;
  for (std::size_t k : curve.ks) {
    switch (removal) {
      case Removal::kKeepTop:
        masks.push_back(TopK(ranking, k));
        break;
      case Removal::kDropTop:
        masks.push_back(~TopK(ranking, k));
        break;
      case Removal::kDropBottom:
        masks.push_back(~TopK(reversed, k));
        break;
    }
  }
  const std::vector<Scores> outs = EvaluateMasked(model, x, masks, workers);
  for (const auto& out : outs) {
    curve.values.push_back(retention
                               ? (Argmax(out) == curve.target ? 1.0 : 0.0)
                               : out[curve.target]);
  }
  curve.auc = Mean(curve.values);
  return curve;
}

// Position of each pool member when sorted by descending score.
std::vector<std::size_t> Positions(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  std::vector<std::size_t> pos(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  return pos;
}

}  // namespace

ModelIndicator::ModelIndicator(const Model& model, std::span<const double> x,
                               PredictionRelation rel, int workers)
    : model_(model), x_(x.begin(), x.end()), rel_(rel), workers_(workers) {
  if (x_.size() != model.num_features()) {
    throw DimensionError("input length differs from model");
  }
  rel_.CheckCompatible(model.num_outputs());
  std::vector<Features> full{x_};
  reference_ = EvaluateMany(model, full, 1).front();
}

std::vector<std::uint8_t> ModelIndicator::EvaluateBatch(
    std::span<const Mask> masks) const {
  const std::vector<Scores> outs = EvaluateMasked(model_, x_, masks, workers_);
  std::vector<std::uint8_t> g(outs.size());
  for (std::size_t i = 0; i < outs.size(); ++i) {
    g[i] = PredictsSame(outs[i], reference_, rel_) ? 1 : 0;
  }
  return g;
}

ModelIndicator DeriveIndicator(const Model& model, std::span<const double> x,
                               const PredictionRelation& rel, int workers) {
  return ModelIndicator(model, x, rel, workers);
}

TableIndicator::TableIndicator(std::size_t n, std::vector<std::uint8_t> table)
    : n_(n), table_(std::move(table)) {
  CheckFunctionCap(n);
  if (table_.size() != (std::size_t{1} << n)) {
    throw DimensionError("indicator table length is not 2^n");
  }
}

std::vector<std::uint8_t> TableIndicator::EvaluateBatch(
    std::span<const Mask> masks) const {
  std::vector<std::uint8_t> g(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (masks[i].size() != n_) throw DimensionError("mask length differs");
    g[i] = table_[masks[i].ToBits()];
  }
  return g;
}

TableIndicator Tabulate(const MaskPredicate& g) {
  const std::size_t n = g.num_features();
  CheckFunctionCap(n);
  std::vector<Mask> masks;
  masks.reserve(std::size_t{1} << n);
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
    masks.push_back(Mask::FromBits(a, n));
  }
  return TableIndicator(n, g.EvaluateBatch(masks));
}

InfluenceEstimate EstimateInfluence(const MaskPredicate& g, const Mask& set,
                                    std::size_t m, std::uint64_t seed) {
  const std::size_t n = g.num_features();
  if (set.size() != n) throw DimensionError("set length differs from g");
  if (m == 0) throw ArgumentError("influence estimate needs m >= 1");
  const std::vector<std::size_t> members = set.Indices();
  std::vector<Mask> masks;
  masks.reserve(2 * m);
  for (std::size_t j = 0; j < m; ++j) {
    Rng rng = MakeRng(seed, {j});
    Mask z = UniformMask(n, rng);
    Mask z2 = z;
    std::uint64_t word = 0;
    for (std::size_t t = 0; t < members.size(); ++t) {
      if (t % 64 == 0) word = rng();
      z2.set(members[t], (word >> (t % 64)) & 1);
    }
    masks.push_back(std::move(z));
    masks.push_back(std::move(z2));
  }
  const std::vector<std::uint8_t> v = g.EvaluateBatch(masks);
  InfluenceEstimate est;
  est.set = set;
  est.m = m;
  est.seed = seed;
  for (std::size_t j = 0; j < m; ++j) {
    if (v[2 * j] != v[2 * j + 1]) ++est.flips;
  }
  est.inf_hat = 2.0 * static_cast<double>(est.flips) / static_cast<double>(m);
  return est;
}

double ExactInfluence(const TableIndicator& g, const Mask& set) {
  if (set.size() != g.num_features()) {
    throw DimensionError("set length differs from g");
  }
  const std::uint64_t s = set.ToBits();
  const std::uint64_t all = g.table().size() - 1;
  const std::uint64_t outside = all & ~s;
  const double cells = std::ldexp(1.0, std::popcount(s));
  double total = 0.0;
  std::size_t fibers = 0;
  // Each fiber fixes the coordinates outside S.
  for (std::uint64_t b = outside;; b = (b - 1) & outside) {
    std::size_t ones = 0;
    for (std::uint64_t t = s;; t = (t - 1) & s) {
      if (g(b | t)) ++ones;
      if (t == 0) break;
    }
    const double p1 = static_cast<double>(ones) / cells;
    total += 2.0 * p1 * (1.0 - p1);
    ++fibers;
    if (b == 0) break;
  }
  return 2.0 * total / static_cast<double>(fibers);
}

const char* ToString(BiseMode mode) {
  return mode == BiseMode::kInsertion ? "insertion" : "deletion";
}

std::vector<std::size_t> CurvePoints(std::size_t n, std::size_t step) {
  if (step == 0) throw ArgumentError("step must be at least 1");
  if (n == 0) throw ArgumentError("curve needs at least one feature");
  std::vector<std::size_t> ks;
  for (std::size_t k = step; k <= n; k += step) ks.push_back(k);
  if (ks.empty() || ks.back() != n) ks.push_back(n);
  return ks;
}

double Auc(std::span<const double> values, AucRule rule) {
  if (values.empty()) throw ArgumentError("AUC of an empty curve");
  if (rule == AucRule::kMean || values.size() == 1) return Mean(values);
  double s = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    s += 0.5 * (values[i - 1] + values[i]);
  }
  return s / static_cast<double>(values.size() - 1);
}

BiseScore ComputeBise(const MaskPredicate& g,
                      std::span<const std::size_t> ranking, BiseMode mode,
                      const BiseOptions& options) {
  const std::size_t n = g.num_features();
  BiseScore score;
  score.mode = mode;
  score.rule = options.auc;
  score.step = options.step;
  score.ks = CheckedCurve(n, options.step, ranking);

  std::optional<TableIndicator> table;
  if (options.influence == InfluenceMethod::kExact) {
    table.emplace(Tabulate(g));
  } else {
    if (options.m == 0) throw ArgumentError("BISE needs m >= 1");
    score.m = options.m;
  }
  for (std::size_t k : score.ks) {
    Mask set = TopK(ranking, k);
    if (mode == BiseMode::kDeletion) set = ~set;
    const double inf =
        PointInfluence(g, table ? &*table : nullptr, set, options,
                       DeriveSeed(options.seed, {k}));
    score.values.push_back(inf / 2.0);
  }
  score.auc = Auc(score.values, options.auc);
  return score;
}

BiseScore InsertionBise(const MaskPredicate& g,
                        std::span<const std::size_t> ranking,
                        const BiseOptions& options) {
  return ComputeBise(g, ranking, BiseMode::kInsertion, options);
}

BiseScore DeletionBise(const MaskPredicate& g,
                       std::span<const std::size_t> ranking,
                       const BiseOptions& options) {
  return ComputeBise(g, ranking, BiseMode::kDeletion, options);
}

BiseBounds ComputeBiseBounds(const BiseScore& score, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ArgumentError("delta must lie in (0, 1)");
  }
  BiseBounds b;
  b.delta = delta;
  const double k = static_cast<double>(score.values.size());
  if (score.m > 0) {
    b.half_width = std::sqrt(std::log(2.0 * k / delta) /
                             (2.0 * static_cast<double>(score.m)));
  }
  for (double v : score.values) {
    b.lower_points.push_back(std::max(0.0, v - b.half_width));
    b.upper_points.push_back(std::min(1.0, v + b.half_width));
  }
  b.lower = Auc(b.lower_points, score.rule);
  b.upper = Auc(b.upper_points, score.rule);
  return b;
}

AttributionCurve InsertionTest(const Model& model, std::span<const double> x,
                               std::span<const std::size_t> ranking,
                               std::size_t step, int workers) {
  return ClassicCurve(model, x, ranking, step, workers, Removal::kKeepTop,
                      false);
}

AttributionCurve DeletionTest(const Model& model, std::span<const double> x,
                              std::span<const std::size_t> ranking,
                              std::size_t step, int workers) {
  return ClassicCurve(model, x, ranking, step, workers, Removal::kDropTop,
                      false);
}

AttributionCurve MorfTest(const Model& model, std::span<const double> x,
                          std::span<const std::size_t> ranking,
                          std::size_t step, int workers) {
  return ClassicCurve(model, x, ranking, step, workers, Removal::kDropTop,
                      true);
}

AttributionCurve LerfTest(const Model& model, std::span<const double> x,
                          std::span<const std::size_t> ranking,
                          std::size_t step, int workers) {
  return ClassicCurve(model, x, ranking, step, workers, Removal::kDropBottom,
                      true);
}

RankingStabilityResult RankingStability(
    const RankingMetric& metric,
    const std::vector<std::vector<std::size_t>>& pool,
    const RankingPerturbation& perturbation, std::size_t trials,
    std::uint64_t seed) {
  if (trials == 0) throw ArgumentError("ranking stability needs trials >= 1");
  if (pool.empty()) throw ArgumentError("ranking stability needs a pool");
  const std::size_t p = pool.size();
  std::vector<double> base(p);
  for (std::size_t i = 0; i < p; ++i) {
    base[i] = metric(pool[i], DeriveSeed(seed, {0, i}));
  }
  const std::vector<std::size_t> base_pos = Positions(base);

  RankingStabilityResult result;
  std::vector<double> scores(p);
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < p; ++i) {
      Rng rng = MakeRng(seed, {1, t, i});
      const auto perturbed = PerturbRanking(pool[i], perturbation, rng);
      scores[i] = metric(perturbed, DeriveSeed(seed, {0, i}));
    }
    const std::vector<std::size_t> pos = Positions(scores);
    double moved = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      moved += std::abs(static_cast<double>(pos[i]) -
                        static_cast<double>(base_pos[i]));
    }
    result.trial_percent.push_back(100.0 * moved / static_cast<double>(p) /
                                   static_cast<double>(p));
  }
  result.mean_percent = Mean(result.trial_percent);
  result.sd_percent = BootstrapSd(result.trial_percent, kBootstrapResamples,
                                  DeriveSeed(seed, {2}));
  return result;
}

std::vector<OptimalMRow> OptimalMReport(const MaskPredicate& g,
                                        std::span<const std::size_t> ranking,
                                        BiseMode mode,
                                        std::span<const std::size_t> grid,
                                        std::size_t repeats,
                                        const BiseOptions& options) {
  if (repeats < 2) throw ArgumentError("optimal-m study needs repeats >= 2");
  std::vector<OptimalMRow> rows;
  for (std::size_t m : grid) {
    std::vector<double> aucs;
    for (std::size_t rep = 0; rep < repeats; ++rep) {
      BiseOptions run = options;
      run.m = m;
      run.seed = DeriveSeed(options.seed, {m, rep});
      aucs.push_back(ComputeBise(g, ranking, mode, run).auc);
    }
    rows.push_back({m, Mean(aucs), SampleVariance(aucs)});
  }
  return rows;
}

}  // namespace stabcert
