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

// Sampling-based stability certification.
//
// The stability rate τ_r of an explanation α is the probability that a
// uniform β in Δ_r(α) yields the same prediction as α itself. It is
// estimated by the fraction of N i.i.d. uniform draws that preserve the
// prediction. With N >= ln(2/δ)/(2ε²) the estimate is within ε of τ_r with
// probability at least 1-δ (Hoeffding). With N >= ln(δ)/ln(1-ε), an
// all-stable sample certifies that a uniform perturbation breaks the
// prediction with probability at most ε, again with confidence 1-δ.

#ifndef STABCERT_SCA_H_
#define STABCERT_SCA_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stabcert/core.h"
#include "stabcert/mask.h"
#include "stabcert/model.h"
#include "stabcert/perturb.h"

namespace stabcert {

enum class CertificateKind { kSoft, kHard, kPerSizeSoft };
enum class Verdict { kCertified, kNotCertified, kEstimateOnly };

const char* ToString(CertificateKind kind);
const char* ToString(Verdict verdict);

// Estimate restricted to perturbations of exactly `size` added features.
struct SizeEstimate {
  std::size_t size = 0;
  std::size_t samples = 0;
  std::size_t stable = 0;
  double rate = 1.0;
};

struct CertificateReport {
  CertificateKind kind = CertificateKind::kSoft;
  std::size_t radius = 0;
  // Radius after clamping to the number of free slots.
  std::size_t effective_radius = 0;
  double tau_hat = 1.0;
  double epsilon = 0.0;
  double delta = 0.0;
  // Samples behind tau_hat (per size for kPerSizeSoft).
  std::size_t samples = 0;
  std::size_t stable = 0;
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::kEstimateOnly;
  // Model evaluations spent, including the unperturbed baseline.
  std::uint64_t evaluations = 0;
  std::vector<SizeEstimate> per_size;
  std::vector<std::string> notes;
};

struct CertifyOptions {
  double epsilon = 0.1;
  double delta = 0.1;
  std::uint64_t seed = 0;
  int workers = 1;
};

// ceil(ln(2/δ) / (2ε²)).
std::size_t SoftSampleSize(double epsilon, double delta);
// ceil(ln(δ) / ln(1-ε)).
std::size_t HardSampleSize(double epsilon, double delta);
// ceil(ln(sizes/δ) / (2ε²)) samples for each of `sizes` estimates.
std::size_t PerSizeSampleSize(double epsilon, double delta, std::size_t sizes);

// Soft-stability estimate from SoftSampleSize(ε, δ) uniform draws.
CertificateReport EstimateStability(const Model& model,
                                    std::span<const double> x,
                                    const Mask& alpha, std::size_t radius,
                                    const PredictionRelation& rel,
                                    const CertifyOptions& options);

// Hard-stability screen from HardSampleSize(ε, δ) uniform draws. Certified
// iff every draw preserves the prediction.
CertificateReport CertifyHard(const Model& model, std::span<const double> x,
                              const Mask& alpha, std::size_t radius,
                              const PredictionRelation& rel,
                              const CertifyOptions& options);

// Minimum over sizes k = 1..r of per-size stability estimates. With
// probability at least 1-δ the true minimum is at least tau_hat - ε.
CertificateReport EstimateStabilityPerSize(const Model& model,
                                           std::span<const double> x,
                                           const Mask& alpha,
                                           std::size_t radius,
                                           const PredictionRelation& rel,
                                           const CertifyOptions& options);

enum class EnumerationOrder { kAscending, kDescending };

struct ExactStabilityResult {
  std::size_t stable = 0;
  std::size_t total = 0;
  double rate() const {
    return static_cast<double>(stable) / static_cast<double>(total);
  }
};

// Exact τ_r by enumerating Δ_r(α). Throws ResourceError above `cap`.
ExactStabilityResult ExactStabilityCount(
    const Model& model, std::span<const double> x, const Mask& alpha,
    std::size_t radius, const PredictionRelation& rel,
    EnumerationOrder order = EnumerationOrder::kAscending,
    std::size_t cap = EnumerationCap(), int workers = 1);

double ExactStability(const Model& model, std::span<const double> x,
                      const Mask& alpha, std::size_t radius,
                      const PredictionRelation& rel);

// One report per radius (strictly increasing), each from its own substream
// of options.seed. Raw values; τ_r need not be monotone in r.
std::vector<CertificateReport> StabilityCurve(
    const Model& model, std::span<const double> x, const Mask& alpha,
    std::span<const std::size_t> radii, const PredictionRelation& rel,
    const CertifyOptions& options,
    CertificateKind kind = CertificateKind::kSoft);

}  // namespace stabcert

#endif  // STABCERT_SCA_H_
