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

// Spectral analysis of functions on the Boolean cube.
//
// Three expansions are supported. The standard (Fourier) basis uses the
// parities χ_S(α) = Π_{i∈S} (-1)^{α_i}. The p-biased basis uses
// χ_S^p(α) = Π_{i∈S} (p - α_i)/sqrt(p - p²), orthonormal under Bern(p)^n.
// The monotone basis uses indicators 1_T(α) = 1[T ⊆ α]; its coefficients
// are the Möbius transform of the table. Coefficient vectors are indexed by
// subset bitmask like the tables themselves.

#ifndef STABCERT_SPECTRAL_H_
#define STABCERT_SPECTRAL_H_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "stabcert/boolean_function.h"
#include "stabcert/mask.h"

namespace stabcert {

struct StdSpectrum {
  std::size_t n = 0;
  std::vector<double> coeffs;
};

struct PBiasedSpectrum {
  std::size_t n = 0;
  double p = 0.5;
  std::vector<double> coeffs;
};

struct MonotoneSpectrum {
  std::size_t n = 0;
  std::vector<double> coeffs;
};

// ĥ(S) = 2^{-n} Σ_α h(α) χ_S(α), by an in-place butterfly.
StdSpectrum FourierTransform(const DenseBooleanFunction& h);
DenseBooleanFunction InverseFourier(const StdSpectrum& spec);

// ~h(T) = Σ_{S⊆T} (-1)^{|T-S|} h(S).
MonotoneSpectrum MonotoneTransform(const DenseBooleanFunction& h);
// h(α) = Σ_{T⊆α} ~h(T).
DenseBooleanFunction InverseMonotone(const MonotoneSpectrum& spec);

// Spectrum of M_λ h: ŷ(T) = λ^{|T|} Σ_{S⊇T} (1-λ)^{|S-T|} ĥ(S).
StdSpectrum SmoothStd(const StdSpectrum& spec, double lambda);
// Spectrum of M_λ h in the monotone basis: ~h(T) scaled by λ^{|T|}.
MonotoneSpectrum SmoothMonotone(const MonotoneSpectrum& spec, double lambda);

// Σ_{|S|>=k} |coeff(S)|.
double TailMass(const StdSpectrum& spec, std::size_t k);
// P[Bin(n, λ) >= k]; 1 for k = 0 and 0 for k > n.
double TailBound(std::size_t n, std::size_t k, double lambda);

// Coefficients E_{Bern(p)}[h χ_S^p]; p in (0, 1).
PBiasedSpectrum PBiasedTransform(const DenseBooleanFunction& h, double p);
DenseBooleanFunction InversePBiased(const PBiasedSpectrum& spec);
// The table of χ_S^p.
DenseBooleanFunction PBiasedBasis(std::size_t n, double p, std::uint64_t s);

// Pointwise comparison of M_λ χ_S^p with ((λ-p)/(1-p))^{|S|/2} χ_S^{p/λ}.
// At λ = p the right side is taken as its limit, which stays finite.
struct ChangeOfBasisResult {
  double max_error = 0.0;
  bool ok = true;
};

// Requires 0 < p <= λ <= 1 and p < 1; ArgumentError otherwise.
ChangeOfBasisResult ChangeOfBasisCheck(std::size_t n, double p, double lambda,
                                       std::uint64_t s,
                                       double tolerance = 1e-9);
// The same identity applied to the whole expansion of `spec`.
ChangeOfBasisResult ChangeOfBasisCheck(const PBiasedSpectrum& spec,
                                       double lambda,
                                       double tolerance = 1e-9);

// lhs = Var_{Bern(p/λ)}[M_λ h], rhs = ((λ-p)/(1-p)) Var_{Bern(p)}[h]. The
// second-moment form E_{Bern(p/λ)}[(M_λ h)²] <= c E_{Bern(p)}[h²] is only
// claimed when E_{Bern(p)}[h] = 0; `mean_zero` records whether it applies.
struct VarianceReductionResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = true;
  double second_moment_lhs = 0.0;
  double second_moment_rhs = 0.0;
  bool mean_zero = false;
  bool second_moment_ok = true;
};

VarianceReductionResult VarianceReductionCheck(const DenseBooleanFunction& h,
                                               double p, double lambda,
                                               double tolerance = 1e-9);

// Lower bound 1 - Q/γ on τ_r under |h(β) - h(α)| <= γ.
//
// Each coefficient ~h(V) contributes through its free part T = V \ α, with
// 1 <= |T| <= r, weighted by the fraction of Δ_r that contains T:
// Σ_{j=k..r} C(d-k, j-k) / |Δ_r| for |T| = k. Coefficients that mix α and
// free slots are included, so the bound holds for every α; when no such
// coefficients exist this is exactly the sum over T ⊆ [n] \ α.
struct StabilityBound {
  double q = 0.0;
  // 1 - Q/γ before clamping.
  double raw_bound = 1.0;
  double bound = 1.0;
  // raw_bound < 0; bound is then 0.
  bool vacuous = false;
  std::size_t effective_radius = 0;
};

StabilityBound StabilityLowerBound(const MonotoneSpectrum& mono,
                                   const Mask& alpha, std::size_t radius,
                                   double gamma);

// The bound for M_λ h from the λ-scaled coefficients λ^{|V|} ~h(V), which
// satisfies Q_smoothed <= λ Q.
struct SmoothedStabilityBound {
  StabilityBound base;
  StabilityBound smoothed;
  double lambda = 1.0;
};

SmoothedStabilityBound SmoothedStabilityLowerBound(const MonotoneSpectrum& mono,
                                                   const Mask& alpha,
                                                   std::size_t radius,
                                                   double gamma,
                                                   double lambda);

// Largest r such that |h(α ∪ S) - h(α)| <= γ for every S of free slots with
// |S| <= r; the free-slot count when no S violates.
std::size_t HardRadiusMonotone(const MonotoneSpectrum& mono, const Mask& alpha,
                               double gamma);

// T_ρ h(α) = E[h(α ⊕ ξ)] with each bit of ξ set with probability (1-ρ)/2.
DenseBooleanFunction FlipOperator(const DenseBooleanFunction& h, double rho);
// Fourier coefficients scaled by ρ^{|S|}.
StdSpectrum FlipSpectrum(const StdSpectrum& spec, double rho);

// Mean |coeff(S)| over the subsets of each degree 0..n.
std::vector<double> DegreeMeanAbs(std::size_t n, std::span<const double> coeffs);

struct MaskingFlippingRow {
  double lambda = 1.0;
  std::size_t degree = 0;
  double masking = 0.0;
  double flipping = 0.0;
};

struct MaskingFlippingReport {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::vector<MaskingFlippingRow> rows;
  // Per-degree profiles never increase as the parameter decreases.
  bool flipping_monotone = true;
  bool masking_monotone = true;
};

// Averages the per-degree profiles of M_λ and T_λ over `trials` spectra
// with i.i.d. standard normal coefficients.
MaskingFlippingReport CompareMaskingAndFlipping(std::size_t n,
                                                std::span<const double> lambdas,
                                                std::size_t trials,
                                                std::uint64_t seed);

// CSV with header subset_bitmask,degree,coefficient.
void WriteSpectrumCsv(std::ostream& out, std::size_t n,
                      std::span<const double> coeffs);

}  // namespace stabcert

#endif  // STABCERT_SPECTRAL_H_
