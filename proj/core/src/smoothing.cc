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

#include "stabcert/smoothing.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "stabcert/error.h"
#include "stabcert/hash.h"
#include "stabcert/stats.h"

namespace stabcert {
namespace {

constexpr std::size_t kExactChunk = 4096;
constexpr double kUnitSlack = 1e-9;

Scores ColumnMeans(const std::vector<Scores>& outs, std::size_t m) {
  Scores mean(m);
  std::vector<double> column(outs.size());
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t j = 0; j < outs.size(); ++j) column[j] = outs[j][c];
    mean[c] = Mean(column);
  }
  return mean;
}

Scores SmoothMonteCarlo(const Model& model, std::span<const double> x,
                        const SmoothingConfig& config, Rng& rng) {
  std::vector<Features> inputs(config.samples);
  for (auto& in : inputs) {
    in.assign(x.begin(), x.end());
    for (double& v : in) {
      if (!Bernoulli(rng, config.lambda)) v = 0.0;
    }
  }
  return ColumnMeans(EvaluateMany(model, inputs, 1), model.num_outputs());
}

Scores SmoothExact(const Model& model, std::span<const double> x,
                   const SmoothingConfig& config) {
  const std::vector<std::size_t> support = PresentFeatures(x).Indices();
  const std::size_t s = support.size();
  if (s > config.exact_cap) {
    throw ResourceError("exact smoothing over " + std::to_string(s) +
                        " present features exceeds the cap of " +
                        std::to_string(config.exact_cap));
  }
  const double lambda = config.lambda;
  const std::uint64_t total = std::uint64_t{1} << s;
  Scores acc(model.num_outputs(), 0.0);
  std::vector<Features> inputs;
  std::vector<double> weights;
  auto flush = [&] {
    const std::vector<Scores> outs = EvaluateMany(model, inputs, 1);
    for (std::size_t j = 0; j < outs.size(); ++j) {
      for (std::size_t c = 0; c < acc.size(); ++c) {
        acc[c] += weights[j] * outs[j][c];
      }
    }
    inputs.clear();
    weights.clear();
  };
  for (std::uint64_t z = 0; z < total; ++z) {
    const int kept = std::popcount(z);
    const double w = std::pow(lambda, kept) *
                     std::pow(1.0 - lambda, static_cast<int>(s) - kept);
    if (w == 0.0) continue;
    Features in(x.begin(), x.end());
    for (std::size_t b = 0; b < s; ++b) {
      if (!((z >> b) & 1)) in[support[b]] = 0.0;
    }
    inputs.push_back(std::move(in));
    weights.push_back(w);
    if (inputs.size() == kExactChunk) flush();
  }
  flush();
  return acc;
}

}  // namespace

void ValidateSmoothingConfig(const SmoothingConfig& config) {
  if (!(config.lambda >= 0.0 && config.lambda <= 1.0)) {
    throw ArgumentError("lambda must lie in [0, 1], got " +
                        std::to_string(config.lambda));
  }
  if (config.samples == 0) throw ArgumentError("smoothing needs samples >= 1");
}

Scores SmoothEval(const Model& model, std::span<const double> x_masked,
                  const SmoothingConfig& config, Rng& rng) {
  ValidateSmoothingConfig(config);
  if (x_masked.size() != model.num_features()) {
    throw DimensionError("input has " + std::to_string(x_masked.size()) +
                         " features, model expects " +
                         std::to_string(model.num_features()));
  }
  if (config.lambda == 1.0) {
    std::vector<Features> one{Features(x_masked.begin(), x_masked.end())};
    return EvaluateMany(model, one, 1).front();
  }
  if (config.mode == SmoothingMode::kExact) {
    return SmoothExact(model, x_masked, config);
  }
  return SmoothMonteCarlo(model, x_masked, config, rng);
}

MusRadius MusHardRadius(std::span<const double> smoothed, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw ArgumentError("the masking certificate needs lambda in (0, 1]");
  }
  if (smoothed.size() < 2) {
    throw ArgumentError("the masking certificate needs at least two classes");
  }
  for (double v : smoothed) {
    if (!(v >= -kUnitSlack && v <= 1.0 + kUnitSlack)) {
      throw ArgumentError("smoothed scores must lie in [0, 1]");
    }
  }
  MusRadius radius;
  radius.real = DecisionGap(smoothed) / lambda;
  radius.integer = static_cast<std::size_t>(std::floor(radius.real));
  return radius;
}

SmoothedModel::SmoothedModel(const Model& inner, SmoothingConfig config)
    : inner_(inner), config_(config) {
  ValidateSmoothingConfig(config_);
}

Scores SmoothedModel::Evaluate(std::span<const double> x) const {
  Rng rng = MakeRng(config_.seed, {HashDoubles(x)});
  return SmoothEval(inner_, x, config_, rng);
}

MusCertificate SmoothedModel::Certify(std::span<const double> x,
                                      const Mask& alpha) const {
  const Scores out = Evaluate(ApplyMask(x, alpha));
  MusCertificate cert;
  cert.radius = MusHardRadius(out, config_.lambda);
  cert.predicted = Argmax(out);
  cert.heuristic = heuristic() && config_.lambda != 1.0;
  return cert;
}

DenseBooleanFunction ExactSmooth(const DenseBooleanFunction& h,
                                 double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ArgumentError("lambda must lie in [0, 1]");
  }
  std::vector<double> t = h.table();
  for (std::size_t i = 0; i < h.n(); ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t a = 0; a < t.size(); ++a) {
      if (a & bit) t[a] = lambda * t[a] + (1.0 - lambda) * t[a ^ bit];
    }
  }
  return DenseBooleanFunction(h.n(), std::move(t));
}

}  // namespace stabcert
