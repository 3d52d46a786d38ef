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

#include "stabcert/sca.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "stabcert/error.h"

namespace stabcert {
namespace {

constexpr std::size_t kExactChunk = 4096;

void CheckConfidence(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ArgumentError("epsilon must lie in (0, 1), got " +
                        std::to_string(epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ArgumentError("delta must lie in (0, 1), got " +
                        std::to_string(delta));
  }
}

// ceil that ignores rounding noise just above an integer.
std::size_t CeilCount(double v) {
  return static_cast<std::size_t>(std::ceil(v - 1e-9));
}

void CheckInputs(const Model& model, std::span<const double> x,
                 const Mask& alpha, const PredictionRelation& rel) {
  const std::size_t n = model.num_features();
  if (x.size() != n) {
    throw DimensionError("input has " + std::to_string(x.size()) +
                         " features, model expects " + std::to_string(n));
  }
  if (alpha.size() != n) {
    throw DimensionError("mask has " + std::to_string(alpha.size()) +
                         " features, model expects " + std::to_string(n));
  }
  rel.CheckCompatible(model.num_outputs());
}

Scores Baseline(const Model& model, std::span<const double> x,
                const Mask& alpha) {
  Features masked = ApplyMask(x, alpha);
  std::vector<Features> one{std::move(masked)};
  return EvaluateMany(model, one, 1).front();
}

std::size_t CountStable(const Model& model, std::span<const double> x,
                        std::span<const Mask> masks, const Scores& baseline,
                        const PredictionRelation& rel, int workers) {
  const std::vector<Scores> outs = EvaluateMasked(model, x, masks, workers);
  std::size_t stable = 0;
  for (const auto& out : outs) {
    if (PredictsSame(out, baseline, rel)) ++stable;
  }
  return stable;
}

CertificateReport NewReport(CertificateKind kind, const PerturbationSpace& space,
                            const CertifyOptions& options) {
  CertificateReport report;
  report.kind = kind;
  report.radius = space.requested_radius();
  report.effective_radius = space.radius();
  report.epsilon = options.epsilon;
  report.delta = options.delta;
  report.seed = options.seed;
  if (space.clamped()) {
    report.notes.push_back("radius " + std::to_string(space.requested_radius()) +
                           " clamped to " + std::to_string(space.radius()) +
                           " free slots");
  }
  return report;
}

CertificateReport SampleUniformSpace(const Model& model,
                                     std::span<const double> x,
                                     const Mask& alpha, std::size_t radius,
                                     const PredictionRelation& rel,
                                     const CertifyOptions& options,
                                     CertificateKind kind, std::size_t n) {
  CheckInputs(model, x, alpha, rel);
  PerturbationSpace space(alpha, radius);
  PerturbationSampler sampler(space);
  std::vector<Mask> masks;
  masks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = MakeRng(options.seed, {i});
    masks.push_back(sampler.Sample(rng));
  }
  const Scores baseline = Baseline(model, x, alpha);
  const std::size_t stable =
      CountStable(model, x, masks, baseline, rel, options.workers);

  CertificateReport report = NewReport(kind, space, options);
  report.samples = n;
  report.stable = stable;
  report.tau_hat = static_cast<double>(stable) / static_cast<double>(n);
  report.evaluations = n + 1;
  return report;
}

}  // namespace

const char* ToString(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::kSoft:
      return "soft";
    case CertificateKind::kHard:
      return "hard";
    case CertificateKind::kPerSizeSoft:
      return "per_size_soft";
  }
  return "unknown";
}

const char* ToString(Verdict verdict) {
  switch (verdict) {
    case Verdict::kCertified:
      return "certified";
    case Verdict::kNotCertified:
      return "not_certified";
    case Verdict::kEstimateOnly:
      return "estimate_only";
  }
  return "unknown";
}

std::size_t SoftSampleSize(double epsilon, double delta) {
  CheckConfidence(epsilon, delta);
  return CeilCount(std::log(2.0 / delta) / (2.0 * epsilon * epsilon));
}

std::size_t HardSampleSize(double epsilon, double delta) {
  CheckConfidence(epsilon, delta);
  return std::max<std::size_t>(
      1, CeilCount(std::log(delta) / std::log1p(-epsilon)));
}

std::size_t PerSizeSampleSize(double epsilon, double delta,
                              std::size_t sizes) {
  CheckConfidence(epsilon, delta);
  if (sizes == 0) throw ArgumentError("per-size estimate needs sizes >= 1");
  return CeilCount(std::log(static_cast<double>(sizes) / delta) /
                   (2.0 * epsilon * epsilon));
}

CertificateReport EstimateStability(const Model& model,
                                    std::span<const double> x,
                                    const Mask& alpha, std::size_t radius,
                                    const PredictionRelation& rel,
                                    const CertifyOptions& options) {
  const std::size_t n = SoftSampleSize(options.epsilon, options.delta);
  CertificateReport report = SampleUniformSpace(
      model, x, alpha, radius, rel, options, CertificateKind::kSoft, n);
  report.verdict = Verdict::kEstimateOnly;
  return report;
}

CertificateReport CertifyHard(const Model& model, std::span<const double> x,
                              const Mask& alpha, std::size_t radius,
                              const PredictionRelation& rel,
                              const CertifyOptions& options) {
  const std::size_t n = HardSampleSize(options.epsilon, options.delta);
  CertificateReport report = SampleUniformSpace(
      model, x, alpha, radius, rel, options, CertificateKind::kHard, n);
  report.verdict = report.stable == report.samples ? Verdict::kCertified
                                                   : Verdict::kNotCertified;
  return report;
}

CertificateReport EstimateStabilityPerSize(const Model& model,
                                           std::span<const double> x,
                                           const Mask& alpha,
                                           std::size_t radius,
                                           const PredictionRelation& rel,
                                           const CertifyOptions& options) {
  CheckConfidence(options.epsilon, options.delta);
  CheckInputs(model, x, alpha, rel);
  PerturbationSpace space(alpha, radius);
  CertificateReport report =
      NewReport(CertificateKind::kPerSizeSoft, space, options);
  report.verdict = Verdict::kEstimateOnly;
  report.evaluations = 1;
  const std::size_t sizes = space.radius();
  if (sizes == 0) {
    report.tau_hat = 1.0;
    report.notes.push_back("no reachable perturbation sizes; only alpha");
    return report;
  }
  if (radius > sizes) {
    report.notes.push_back("sizes " + std::to_string(sizes + 1) + ".." +
                           std::to_string(radius) +
                           " unreachable and skipped");
  }

  const std::size_t per_size =
      PerSizeSampleSize(options.epsilon, options.delta, sizes);
  PerturbationSampler sampler(space);
  std::vector<Mask> masks;
  masks.reserve(per_size * sizes);
  for (std::size_t k = 1; k <= sizes; ++k) {
    for (std::size_t i = 0; i < per_size; ++i) {
      Rng rng = MakeRng(options.seed, {k, i});
      masks.push_back(sampler.SampleWithSize(k, rng));
    }
  }
  const Scores baseline = Baseline(model, x, alpha);
  const std::vector<Scores> outs =
      EvaluateMasked(model, x, masks, options.workers);

  report.tau_hat = 1.0;
  report.samples = per_size;
  report.stable = per_size;
  for (std::size_t k = 1; k <= sizes; ++k) {
    SizeEstimate est;
    est.size = k;
    est.samples = per_size;
    for (std::size_t i = 0; i < per_size; ++i) {
      if (PredictsSame(outs[(k - 1) * per_size + i], baseline, rel)) {
        ++est.stable;
      }
    }
    est.rate = static_cast<double>(est.stable) / static_cast<double>(per_size);
    if (est.rate < report.tau_hat) {
      report.tau_hat = est.rate;
      report.stable = est.stable;
    }
    report.per_size.push_back(est);
  }
  report.evaluations += masks.size();
  return report;
}

ExactStabilityResult ExactStabilityCount(const Model& model,
                                         std::span<const double> x,
                                         const Mask& alpha, std::size_t radius,
                                         const PredictionRelation& rel,
                                         EnumerationOrder order,
                                         std::size_t cap, int workers) {
  CheckInputs(model, x, alpha, rel);
  PerturbationSpace space(alpha, radius);
  const Scores baseline = Baseline(model, x, alpha);

  ExactStabilityResult result;
  if (order == EnumerationOrder::kAscending) {
    std::vector<Mask> chunk;
    chunk.reserve(kExactChunk);
    auto flush = [&] {
      result.stable += CountStable(model, x, chunk, baseline, rel, workers);
      result.total += chunk.size();
      chunk.clear();
    };
    ForEachMember(space, cap, [&](const Mask& m) {
      chunk.push_back(m);
      if (chunk.size() == kExactChunk) flush();
    });
    flush();
  } else {
    std::vector<Mask> all = Enumerate(space, cap);
    std::reverse(all.begin(), all.end());
    for (std::size_t begin = 0; begin < all.size(); begin += kExactChunk) {
      const std::size_t len = std::min(kExactChunk, all.size() - begin);
      std::span<const Mask> chunk(all.data() + begin, len);
      result.stable += CountStable(model, x, chunk, baseline, rel, workers);
      result.total += len;
    }
  }
  return result;
}

double ExactStability(const Model& model, std::span<const double> x,
                      const Mask& alpha, std::size_t radius,
                      const PredictionRelation& rel) {
  return ExactStabilityCount(model, x, alpha, radius, rel).rate();
}

std::vector<CertificateReport> StabilityCurve(
    const Model& model, std::span<const double> x, const Mask& alpha,
    std::span<const std::size_t> radii, const PredictionRelation& rel,
    const CertifyOptions& options, CertificateKind kind) {
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (radii[i] <= radii[i - 1]) {
      throw ArgumentError("radii must be strictly increasing");
    }
  }
  std::vector<CertificateReport> curve;
  curve.reserve(radii.size());
  for (std::size_t r : radii) {
    CertifyOptions sub = options;
    sub.seed = DeriveSeed(options.seed, {r});
    switch (kind) {
      case CertificateKind::kSoft:
        curve.push_back(EstimateStability(model, x, alpha, r, rel, sub));
        break;
      case CertificateKind::kHard:
        curve.push_back(CertifyHard(model, x, alpha, r, rel, sub));
        break;
      case CertificateKind::kPerSizeSoft:
        curve.push_back(EstimateStabilityPerSize(model, x, alpha, r, rel, sub));
        break;
    }
  }
  return curve;
}

}  // namespace stabcert
