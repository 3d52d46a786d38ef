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

// The random masking operator
//
//   M_λ f(x) = E_{z ~ Bern(λ)^n}[f(x ⊙ z)],
//
// evaluated by Monte Carlo or exactly, and the hard-stability radius it
// certifies. If every output of f lies in [0,1], each output of M_λ f is
// λ-Lipschitz in the mask, so adding r features moves it by at most λr.

#ifndef STABCERT_SMOOTHING_H_
#define STABCERT_SMOOTHING_H_

#include <cstddef>
#include <cstdint>
#include <span>

#include "stabcert/boolean_function.h"
#include "stabcert/core.h"
#include "stabcert/model.h"
#include "stabcert/random.h"

namespace stabcert {

// Monte Carlo widths used for stability and accuracy runs.
inline constexpr std::size_t kStabilitySamples = 32;
inline constexpr std::size_t kAccuracySamples = 64;

enum class SmoothingMode { kMonteCarlo, kExact };

struct SmoothingConfig {
  // Probability of keeping each feature.
  double lambda = 1.0;
  std::size_t samples = kStabilitySamples;
  std::uint64_t seed = 0;
  SmoothingMode mode = SmoothingMode::kMonteCarlo;
  // Exact mode enumerates 2^s masks over the s present features; s <= cap.
  std::size_t exact_cap = 20;
};

// Throws ArgumentError on λ outside [0,1] or zero samples.
void ValidateSmoothingConfig(const SmoothingConfig& config);

// M_λ f(x_masked). λ = 1 returns f(x_masked) in either mode. Exact mode
// sums over the masks of the present (non-zero) features only, since
// masking an absent feature changes nothing. Throws ResourceError when that
// support exceeds config.exact_cap.
Scores SmoothEval(const Model& model, std::span<const double> x_masked,
                  const SmoothingConfig& config, Rng& rng);

struct MusRadius {
  double real = 0.0;
  std::size_t integer = 0;
};

// (p1 - p2) / (2λ) for the two largest smoothed scores, and its floor.
MusRadius MusHardRadius(std::span<const double> smoothed, double lambda);

struct MusCertificate {
  MusRadius radius;
  std::size_t predicted = 0;
  // Monte Carlo outputs only estimate M_λ f; the radius is then not sound.
  bool heuristic = false;
};

// M_λ f as a model. Each Evaluate draws from a stream seeded by
// (config.seed, hash of the input), so repeated calls agree.
class SmoothedModel : public Model {
 public:
  SmoothedModel(const Model& inner, SmoothingConfig config);

  std::size_t num_features() const override { return inner_.num_features(); }
  std::size_t num_outputs() const override { return inner_.num_outputs(); }
  bool emits_probabilities() const override {
    return inner_.emits_probabilities();
  }
  bool concurrency_safe() const override { return inner_.concurrency_safe(); }
  Scores Evaluate(std::span<const double> x) const override;

  const SmoothingConfig& config() const { return config_; }
  bool heuristic() const { return config_.mode == SmoothingMode::kMonteCarlo; }

  // Smoothed prediction at x ⊙ α with its certified radius.
  MusCertificate Certify(std::span<const double> x, const Mask& alpha) const;

 private:
  const Model& inner_;
  SmoothingConfig config_;
};

// Exact M_λ h on a dense table.
DenseBooleanFunction ExactSmooth(const DenseBooleanFunction& h, double lambda);

}  // namespace stabcert

#endif  // STABCERT_SMOOTHING_H_
