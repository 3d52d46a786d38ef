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

// Dense tables of real-valued functions on the Boolean cube.

#ifndef STABCERT_BOOLEAN_FUNCTION_H_
#define STABCERT_BOOLEAN_FUNCTION_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stabcert/model.h"

namespace stabcert {

inline constexpr std::size_t kDefaultFunctionCap = 20;

// Largest n accepted for dense tables; STABCERT_FUNCTION_CAP overrides the
// default (at most 30).
std::size_t FunctionCap();

// h: {0,1}^n -> R stored as 2^n values. Entry `a` holds h at the mask whose
// bit i is bit i of the integer a.
class DenseBooleanFunction {
 public:
  DenseBooleanFunction() = default;
  // Throws ResourceError above FunctionCap(), DimensionError on a table of
  // the wrong length and ArgumentError on non-finite entries.
  DenseBooleanFunction(std::size_t n, std::vector<double> table);

  static DenseBooleanFunction Constant(std::size_t n, double c);
  static DenseBooleanFunction FromFunction(
      std::size_t n, const std::function<double(std::uint64_t)>& fn);

  std::size_t n() const { return n_; }
  std::size_t size() const { return table_.size(); }
  double operator()(std::uint64_t mask) const { return table_[mask]; }
  const std::vector<double>& table() const { return table_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> table_;
};

// Throws ResourceError if 2^n tables are not allowed for this n.
void CheckFunctionCap(std::size_t n);

// h(α) = f(x ⊙ α)[output] over all 2^n masks.
DenseBooleanFunction TabulateModel(const Model& model,
                                   std::span<const double> x,
                                   std::size_t output, int workers = 1);

// E_{α ~ Bern(p)^n}[h(α)]: each bit is 1 with probability p.
double BernoulliMean(const DenseBooleanFunction& h, double p);
// E_{α ~ Bern(p)^n}[h(α)²].
double BernoulliSecondMoment(const DenseBooleanFunction& h, double p);
double BernoulliVariance(const DenseBooleanFunction& h, double p);

}  // namespace stabcert

#endif  // STABCERT_BOOLEAN_FUNCTION_H_
