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

#include "stabcert/spectral.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "stabcert/error.h"
#include "stabcert/random.h"
#include "stabcert/smoothing.h"

namespace stabcert {
namespace {

void CheckLambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ArgumentError("lambda must lie in [0, 1], got " +
                        std::to_string(lambda));
  }
}

void CheckBias(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ArgumentError("p-biased basis needs p in (0, 1), got " +
                        std::to_string(p));
  }
}

void CheckBiasAndLambda(double p, double lambda) {
  CheckBias(p);
  CheckLambda(lambda);
  if (p > lambda) {
    throw ArgumentError("change of basis needs p <= lambda");
  }
}

void CheckLength(std::size_t n, std::size_t len) {
  CheckFunctionCap(n);
  if (len != (std::size_t{1} << n)) {
    throw DimensionError("coefficient vector length " + std::to_string(len) +
                         " is not 2^" + std::to_string(n));
  }
}

std::size_t Degree(std::uint64_t s) {
  return static_cast<std::size_t>(std::popcount(s));
}

// Unnormalized Walsh-Hadamard butterfly.
void Hadamard(std::vector<double>& t, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t a = 0; a < t.size(); ++a) {
      if (a & bit) continue;
      const double u = t[a];
      const double v = t[a | bit];
      t[a] = u + v;
      t[a | bit] = u - v;
    }
  }
}

// Binomial coefficients C(a, b) for a, b <= n as doubles.
std::vector<std::vector<double>> Pascal(std::size_t n) {
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t a = 0; a <= n; ++a) {
    c[a][0] = 1.0;
    for (std::size_t b = 1; b <= a; ++b) {
      c[a][b] = c[a - 1][b - 1] + (b <= a - 1 ? c[a - 1][b] : 0.0);
    }
  }
  return c;
}

// Q with each coefficient ~h(V) scaled by λ^{|V|}.
StabilityBound BoundWithScale(const MonotoneSpectrum& mono, const Mask& alpha,
                              std::size_t radius, double gamma,
                              double lambda) {
  CheckLength(mono.n, mono.coeffs.size());
  if (alpha.size() != mono.n) {
    throw DimensionError("mask length differs from the spectrum");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ArgumentError("gamma must be positive and finite");
  }
  const std::uint64_t a = alpha.ToBits();
  const std::size_t d = mono.n - alpha.count();
  const std::size_t r = std::min(radius, d);

  const auto c = Pascal(d);
  double delta_size = 0.0;
  for (std::size_t i = 0; i <= r; ++i) delta_size += c[d][i];
  std::vector<double> weight(r + 1, 0.0);
  for (std::size_t k = 1; k <= r; ++k) {
    double w = 0.0;
    for (std::size_t j = k; j <= r; ++j) w += c[d - k][j - k];
    weight[k] = w / delta_size;
  }

  StabilityBound out;
  out.effective_radius = r;
  for (std::uint64_t v = 0; v < mono.coeffs.size(); ++v) {
    const std::size_t k = Degree(v & ~a);
    if (k == 0 || k > r) continue;
    const double scale = lambda == 1.0 ? 1.0 : std::pow(lambda, Degree(v));
    out.q += weight[k] * scale * std::abs(mono.coeffs[v]);
  }
  out.raw_bound = 1.0 - out.q / gamma;
  out.vacuous = out.raw_bound < 0.0;
  out.bound = std::max(0.0, out.raw_bound);
  return out;
}

// Right side of the change-of-basis identity for one coordinate in S.
double ChangedFactor(double p, double lambda, bool bit) {
  const double c = std::sqrt((lambda - p) / (1.0 - p));
  const double q = p / lambda;
  if (q < 1.0) {
    const double sigma = std::sqrt(q - q * q);
    return c * ((q - (bit ? 1.0 : 0.0)) / sigma);
  }
  // λ = p: c -> 0 while χ^q blows up at α_i = 0; the product has a limit.
  const double sigma_p = std::sqrt(p - p * p);
  return bit ? 0.0 : p / sigma_p;
}

DenseBooleanFunction ChangedBasisImage(std::size_t n, double p, double lambda,
                                       std::uint64_t s) {
  return DenseBooleanFunction::FromFunction(n, [&](std::uint64_t a) {
    double v = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if ((s >> i) & 1) v *= ChangedFactor(p, lambda, (a >> i) & 1);
    }
    return v;
  });
}

ChangeOfBasisResult Compare(const DenseBooleanFunction& lhs,
                            const DenseBooleanFunction& rhs,
                            double tolerance) {
  ChangeOfBasisResult result;
  for (std::size_t a = 0; a < lhs.size(); ++a) {
    result.max_error = std::max(result.max_error, std::abs(lhs(a) - rhs(a)));
  }
  result.ok = result.max_error <= tolerance;
  return result;
}

}  // namespace

StdSpectrum FourierTransform(const DenseBooleanFunction& h) {
  StdSpectrum spec{h.n(), h.table()};
  Hadamard(spec.coeffs, h.n());
  const double scale = std::ldexp(1.0, -static_cast<int>(h.n()));
  for (double& c : spec.coeffs) c *= scale;
  return spec;
}

DenseBooleanFunction InverseFourier(const StdSpectrum& spec) {
  CheckLength(spec.n, spec.coeffs.size());
  std::vector<double> t = spec.coeffs;
  Hadamard(t, spec.n);
  return DenseBooleanFunction(spec.n, std::move(t));
}

MonotoneSpectrum MonotoneTransform(const DenseBooleanFunction& h) {
  MonotoneSpectrum spec{h.n(), h.table()};
  for (std::size_t i = 0; i < h.n(); ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t a = 0; a < spec.coeffs.size(); ++a) {
      if (a & bit) spec.coeffs[a] -= spec.coeffs[a ^ bit];
    }
  }
  return spec;
}

DenseBooleanFunction InverseMonotone(const MonotoneSpectrum& spec) {
  CheckLength(spec.n, spec.coeffs.size());
  std::vector<double> t = spec.coeffs;
  for (std::size_t i = 0; i < spec.n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t a = 0; a < t.size(); ++a) {
      if (a & bit) t[a] += t[a ^ bit];
    }
  }
  return DenseBooleanFunction(spec.n, std::move(t));
}

StdSpectrum SmoothStd(const StdSpectrum& spec, double lambda) {
  CheckLambda(lambda);
  CheckLength(spec.n, spec.coeffs.size());
  StdSpectrum out = spec;
  std::vector<double>& t = out.coeffs;
  // One coordinate at a time: M_λ χ_{i} = (1 - λ) χ_∅ + λ χ_{i}.
  for (std::size_t i = 0; i < spec.n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t a = 0; a < t.size(); ++a) {
      if (a & bit) continue;
      const double high = t[a | bit];
      t[a] += (1.0 - lambda) * high;
      t[a | bit] = lambda * high;
    }
  }
  return out;
}

MonotoneSpectrum SmoothMonotone(const MonotoneSpectrum& spec, double lambda) {
  CheckLambda(lambda);
  CheckLength(spec.n, spec.coeffs.size());
  MonotoneSpectrum out = spec;
  for (std::uint64_t t = 0; t < out.coeffs.size(); ++t) {
    out.coeffs[t] *= std::pow(lambda, static_cast<int>(Degree(t)));
  }
  return out;
}

double TailMass(const StdSpectrum& spec, std::size_t k) {
  double mass = 0.0;
  for (std::uint64_t s = 0; s < spec.coeffs.size(); ++s) {
    if (Degree(s) >= k) mass += std::abs(spec.coeffs[s]);
  }
  return mass;
}

double TailBound(std::size_t n, std::size_t k, double lambda) {
  CheckLambda(lambda);
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  const auto c = Pascal(n);
  double tail = 0.0;
  for (std::size_t j = k; j <= n; ++j) {
    tail += c[n][j] * std::pow(lambda, static_cast<int>(j)) *
            std::pow(1.0 - lambda, static_cast<int>(n - j));
  }
  return std::min(1.0, tail);
}

PBiasedSpectrum PBiasedTransform(const DenseBooleanFunction& h, double p) {
  CheckBias(p);
  const double sigma = std::sqrt(p - p * p);
  PBiasedSpectrum spec{h.n(), p, h.table()};
  std::vector<double>& t = spec.coeffs;
  for (std::size_t i = 0; i < h.n(); ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t a = 0; a < t.size(); ++a) {
      if (a & bit) continue;
      const double u = t[a];
      const double v = t[a | bit];
      t[a] = (1.0 - p) * u + p * v;
      t[a | bit] = sigma * (u - v);
    }
  }
  return spec;
}

DenseBooleanFunction InversePBiased(const PBiasedSpectrum& spec) {
  CheckBias(spec.p);
  CheckLength(spec.n, spec.coeffs.size());
  const double p = spec.p;
  const double sigma = std::sqrt(p - p * p);
  std::vector<double> t = spec.coeffs;
  for (std::size_t i = 0; i < spec.n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t a = 0; a < t.size(); ++a) {
      if (a & bit) continue;
      const double c0 = t[a];
      const double c1 = t[a | bit];
      t[a] = c0 + c1 * p / sigma;
      t[a | bit] = c0 + c1 * (p - 1.0) / sigma;
    }
  }
  return DenseBooleanFunction(spec.n, std::move(t));
}

DenseBooleanFunction PBiasedBasis(std::size_t n, double p, std::uint64_t s) {
  CheckBias(p);
  const double sigma = std::sqrt(p - p * p);
  return DenseBooleanFunction::FromFunction(n, [&](std::uint64_t a) {
    double v = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if ((s >> i) & 1) v *= (p - static_cast<double>((a >> i) & 1)) / sigma;
    }
    return v;
  });
}

ChangeOfBasisResult ChangeOfBasisCheck(std::size_t n, double p, double lambda,
                                       std::uint64_t s, double tolerance) {
  CheckBiasAndLambda(p, lambda);
  if (n < 64 && (s >> n) != 0) {
    throw ArgumentError("subset has elements outside [n]");
  }
  const DenseBooleanFunction lhs = ExactSmooth(PBiasedBasis(n, p, s), lambda);
  return Compare(lhs, ChangedBasisImage(n, p, lambda, s), tolerance);
}

ChangeOfBasisResult ChangeOfBasisCheck(const PBiasedSpectrum& spec,
                                       double lambda, double tolerance) {
  CheckBiasAndLambda(spec.p, lambda);
  const DenseBooleanFunction lhs = ExactSmooth(InversePBiased(spec), lambda);
  std::vector<double> rhs(spec.coeffs.size(), 0.0);
  for (std::uint64_t s = 0; s < spec.coeffs.size(); ++s) {
    if (spec.coeffs[s] == 0.0) continue;
    const DenseBooleanFunction image =
        ChangedBasisImage(spec.n, spec.p, lambda, s);
    for (std::size_t a = 0; a < rhs.size(); ++a) {
      rhs[a] += spec.coeffs[s] * image(a);
    }
  }
  return Compare(lhs, DenseBooleanFunction(spec.n, std::move(rhs)), tolerance);
}

VarianceReductionResult VarianceReductionCheck(const DenseBooleanFunction& h,
                                               double p, double lambda,
                                               double tolerance) {
  CheckBiasAndLambda(p, lambda);
  const double q = p / lambda;
  const double c = (lambda - p) / (1.0 - p);
  const DenseBooleanFunction smoothed = ExactSmooth(h, lambda);

  VarianceReductionResult r;
  r.lhs = BernoulliVariance(smoothed, q);
  r.rhs = c * BernoulliVariance(h, p);
  r.ok = r.lhs <= r.rhs + tolerance;
  r.second_moment_lhs = BernoulliSecondMoment(smoothed, q);
  r.second_moment_rhs = c * BernoulliSecondMoment(h, p);
  r.mean_zero = std::abs(BernoulliMean(h, p)) <= tolerance;
  r.second_moment_ok =
      !r.mean_zero || r.second_moment_lhs <= r.second_moment_rhs + tolerance;
  return r;
}

StabilityBound StabilityLowerBound(const MonotoneSpectrum& mono,
                                   const Mask& alpha, std::size_t radius,
                                   double gamma) {
  return BoundWithScale(mono, alpha, radius, gamma, 1.0);
}

SmoothedStabilityBound SmoothedStabilityLowerBound(const MonotoneSpectrum& mono,
                                                   const Mask& alpha,
                                                   std::size_t radius,
                                                   double gamma,
                                                   double lambda) {
  CheckLambda(lambda);
  SmoothedStabilityBound out;
  out.lambda = lambda;
  out.base = BoundWithScale(mono, alpha, radius, gamma, 1.0);
  out.smoothed = BoundWithScale(mono, alpha, radius, gamma, lambda);
  return out;
}

std::size_t HardRadiusMonotone(const MonotoneSpectrum& mono, const Mask& alpha,
                               double gamma) {
  if (alpha.size() != mono.n) {
    throw DimensionError("mask length differs from the spectrum");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ArgumentError("gamma must be non-negative and finite");
  }
  const DenseBooleanFunction h = InverseMonotone(mono);
  const std::uint64_t a = alpha.ToBits();
  const std::size_t d = mono.n - alpha.count();
  const double base = h(a);
  std::size_t first_violation = d + 1;
  const std::uint64_t free = ~a & (h.size() - 1);
  // Walk the submasks of the free slots.
  for (std::uint64_t s = free; s != 0; s = (s - 1) & free) {
    if (std::abs(h(a | s) - base) > gamma) {
      first_violation = std::min(first_violation, Degree(s));
    }
  }
  return first_violation - 1;
}

DenseBooleanFunction FlipOperator(const DenseBooleanFunction& h, double rho) {
  return InverseFourier(FlipSpectrum(FourierTransform(h), rho));
}

StdSpectrum FlipSpectrum(const StdSpectrum& spec, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw ArgumentError("rho must lie in [0, 1]");
  }
  StdSpectrum out = spec;
  for (std::uint64_t s = 0; s < out.coeffs.size(); ++s) {
    out.coeffs[s] *= std::pow(rho, static_cast<int>(Degree(s)));
  }
  return out;
}

std::vector<double> DegreeMeanAbs(std::size_t n,
                                  std::span<const double> coeffs) {
  CheckLength(n, coeffs.size());
  std::vector<double> sum(n + 1, 0.0);
  std::vector<double> count(n + 1, 0.0);
  for (std::uint64_t s = 0; s < coeffs.size(); ++s) {
    sum[Degree(s)] += std::abs(coeffs[s]);
    count[Degree(s)] += 1.0;
  }
  for (std::size_t k = 0; k <= n; ++k) sum[k] /= count[k];
  return sum;
}

MaskingFlippingReport CompareMaskingAndFlipping(
    std::size_t n, std::span<const double> lambdas, std::size_t trials,
    std::uint64_t seed) {
  CheckFunctionCap(n);
  if (trials == 0) throw ArgumentError("trials must be positive");
  for (double l : lambdas) CheckLambda(l);

  MaskingFlippingReport report;
  report.n = n;
  report.trials = trials;
  std::vector<std::vector<double>> masking(lambdas.size(),
                                           std::vector<double>(n + 1, 0.0));
  std::vector<std::vector<double>> flipping = masking;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = MakeRng(seed, {t});
    StdSpectrum spec{n, std::vector<double>(std::size_t{1} << n)};
    for (double& c : spec.coeffs) c = StandardNormal(rng);
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      const auto m = DegreeMeanAbs(n, SmoothStd(spec, lambdas[j]).coeffs);
      const auto f = DegreeMeanAbs(n, FlipSpectrum(spec, lambdas[j]).coeffs);
      for (std::size_t k = 0; k <= n; ++k) {
        masking[j][k] += m[k] / static_cast<double>(trials);
        flipping[j][k] += f[k] / static_cast<double>(trials);
      }
    }
  }
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    for (std::size_t k = 0; k <= n; ++k) {
      report.rows.push_back({lambdas[j], k, masking[j][k], flipping[j][k]});
    }
  }

  std::vector<std::size_t> order(lambdas.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return lambdas[a] > lambdas[b];
  });
  constexpr double kSlack = 1e-12;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const std::size_t hi = order[i - 1];
    const std::size_t lo = order[i];
    for (std::size_t k = 0; k <= n; ++k) {
      if (flipping[lo][k] > flipping[hi][k] + kSlack) {
        report.flipping_monotone = false;
      }
      if (masking[lo][k] > masking[hi][k] + kSlack) {
        report.masking_monotone = false;
      }
    }
  }
  return report;
}

void WriteSpectrumCsv(std::ostream& out, std::size_t n,
                      std::span<const double> coeffs) {
  CheckLength(n, coeffs.size());
  out << "subset_bitmask,degree,coefficient\n";
  char buf[64];
  for (std::uint64_t s = 0; s < coeffs.size(); ++s) {
    std::snprintf(buf, sizeof(buf), "%.17g", coeffs[s]);
    out << s << ',' << Degree(s) << ',' << buf << '\n';
  }
}

}  // namespace stabcert
