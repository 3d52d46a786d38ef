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

#include "stabcert/boolean_function.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

#include "stabcert/error.h"

namespace stabcert {
namespace {

constexpr std::size_t kHardFunctionCap = 30;

// weight[a] = p^{|a|} (1-p)^{n-|a|}, built one coordinate at a time.
std::vector<double> BernoulliWeights(std::size_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ArgumentError("Bernoulli parameter must lie in [0, 1]");
  }
  std::vector<double> w(std::size_t{1} << n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t a = 0; a < w.size(); ++a) {
      w[a] *= (a & bit) ? p : 1.0 - p;
    }
  }
  return w;
}

double WeightedSum(const std::vector<double>& w,
                   const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a) s += w[a] * v[a];
  return s;
}

}  // namespace

std::size_t FunctionCap() {
  if (const char* env = std::getenv("STABCERT_FUNCTION_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      return std::min<std::size_t>(v, kHardFunctionCap);
    }
  }
  return kDefaultFunctionCap;
}

void CheckFunctionCap(std::size_t n) {
  if (n > FunctionCap()) {
    throw ResourceError("dense Boolean function over " + std::to_string(n) +
                        " variables exceeds the cap of " +
                        std::to_string(FunctionCap()));
  }
}

DenseBooleanFunction::DenseBooleanFunction(std::size_t n,
                                           std::vector<double> table)
    : n_(n), table_(std::move(table)) {
  CheckFunctionCap(n);
  if (table_.size() != (std::size_t{1} << n)) {
    throw DimensionError("table length " + std::to_string(table_.size()) +
                         " is not 2^" + std::to_string(n));
  }
  for (double v : table_) {
    if (!std::isfinite(v)) throw ArgumentError("table entries must be finite");
  }
}

DenseBooleanFunction DenseBooleanFunction::Constant(std::size_t n, double c) {
  CheckFunctionCap(n);
  return DenseBooleanFunction(n, std::vector<double>(std::size_t{1} << n, c));
}

DenseBooleanFunction DenseBooleanFunction::FromFunction(
    std::size_t n, const std::function<double(std::uint64_t)>& fn) {
  CheckFunctionCap(n);
  std::vector<double> table(std::size_t{1} << n);
  for (std::uint64_t a = 0; a < table.size(); ++a) table[a] = fn(a);
  return DenseBooleanFunction(n, std::move(table));
}

DenseBooleanFunction TabulateModel(const Model& model,
                                   std::span<const double> x,
                                   std::size_t output, int workers) {
  const std::size_t n = model.num_features();
  CheckFunctionCap(n);
  if (x.size() != n) throw DimensionError("input length differs from model");
  if (output >= model.num_outputs()) {
    throw ArgumentError("output index " + std::to_string(output) +
                        " out of range");
  }
  std::vector<Mask> masks;
  masks.reserve(std::size_t{1} << n);
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
    masks.push_back(Mask::FromBits(a, n));
  }
  const std::vector<Scores> outs = EvaluateMasked(model, x, masks, workers);
  std::vector<double> table(outs.size());
  for (std::size_t a = 0; a < outs.size(); ++a) table[a] = outs[a][output];
  return DenseBooleanFunction(n, std::move(table));
}

double BernoulliMean(const DenseBooleanFunction& h, double p) {
  return WeightedSum(BernoulliWeights(h.n(), p), h.table());
}

double BernoulliSecondMoment(const DenseBooleanFunction& h, double p) {
  std::vector<double> sq(h.table());
  for (double& v : sq) v *= v;
  return WeightedSum(BernoulliWeights(h.n(), p), sq);
}

double BernoulliVariance(const DenseBooleanFunction& h, double p) {
  const std::vector<double> w = BernoulliWeights(h.n(), p);
  const double mean = WeightedSum(w, h.table());
  double var = 0.0;
  for (std::size_t a = 0; a < h.size(); ++a) {
    const double c = h(a) - mean;
    var += w[a] * c * c;
  }
  return var;
}

}  // namespace stabcert
