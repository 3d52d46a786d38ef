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

#include "stabcert/model.h"

#include <cmath>
#include <exception>
#include <string>
#include <utility>

#include "stabcert/error.h"
#include "stabcert/parallel.h"
#include "stabcert/random.h"

namespace stabcert {
namespace {

void CheckInputSize(std::span<const double> x, std::size_t n) {
  if (x.size() != n) {
    throw DimensionError("model expects " + std::to_string(n) +
                         " features, got " + std::to_string(x.size()));
  }
}

Scores TwoClass(bool positive) {
  return positive ? Scores{0.0, 1.0} : Scores{1.0, 0.0};
}

}  // namespace

std::vector<Scores> Model::EvaluateBatch(
    std::span<const Features> inputs) const {
  std::vector<Scores> out;
  out.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    try {
      out.push_back(Evaluate(inputs[i]));
    } catch (const std::exception& e) {
      throw ModelError("model evaluation failed at sample " +
                       std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Scores> EvaluateMany(const Model& model,
                                 std::span<const Features> inputs,
                                 int workers) {
  if (workers <= 1 || !model.concurrency_safe() || inputs.size() < 2) {
    try {
      auto out = model.EvaluateBatch(inputs);
      if (out.size() != inputs.size()) {
        throw ModelError("model returned " + std::to_string(out.size()) +
                         " outputs for " + std::to_string(inputs.size()) +
                         " inputs");
      }
      return out;
    } catch (const ModelError&) {
      throw;
    } catch (const std::exception& e) {
      throw ModelError(std::string("model evaluation failed: ") + e.what());
    }
  }
  std::vector<Scores> out(inputs.size());
  ParallelFor(inputs.size(), workers, [&](std::size_t i) {
    try {
      out[i] = model.Evaluate(inputs[i]);
    } catch (const std::exception& e) {
      throw ModelError("model evaluation failed at sample " +
                       std::to_string(i) + ": " + e.what());
    }
  });
  return out;
}

std::vector<Scores> EvaluateMasked(const Model& model,
                                   std::span<const double> x,
                                   std::span<const Mask> masks, int workers) {
  std::vector<Features> inputs;
  inputs.reserve(masks.size());
  for (const auto& m : masks) inputs.push_back(ApplyMask(x, m));
  return EvaluateMany(model, inputs, workers);
}

Mask PresentFeatures(std::span<const double> x) {
  Mask m(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0) m.set(i);
  }
  return m;
}

Scores CountingModel::Evaluate(std::span<const double> x) const {
  count_.fetch_add(1);
  return inner_.Evaluate(x);
}

std::vector<Scores> CountingModel::EvaluateBatch(
    std::span<const Features> inputs) const {
  count_.fetch_add(inputs.size());
  return inner_.EvaluateBatch(inputs);
}

Scores FunctionModel::Evaluate(std::span<const double> x) const {
  CheckInputSize(x, n_);
  Scores s = fn_(x);
  if (s.size() != m_) {
    throw ModelError("function model returned " + std::to_string(s.size()) +
                     " scores, declared " + std::to_string(m_));
  }
  return s;
}

ConjunctionModel::ConjunctionModel(Mask required)
    : required_(std::move(required)) {}

Scores ConjunctionModel::Evaluate(std::span<const double> x) const {
  CheckInputSize(x, required_.size());
  return TwoClass(PresentFeatures(x).Contains(required_));
}

MajorityModel::MajorityModel(Mask voters, std::size_t threshold)
    : voters_(std::move(voters)), threshold_(threshold) {
  if (threshold_ > voters_.count()) {
    throw ArgumentError("majority threshold exceeds the number of voters");
  }
}

Scores MajorityModel::Evaluate(std::span<const double> x) const {
  CheckInputSize(x, voters_.size());
  return TwoClass((PresentFeatures(x) & voters_).count() >= threshold_);
}

LookupTableModel::LookupTableModel(std::size_t n, std::size_t m,
                                   bool probabilities,
                                   std::vector<Scores> table)
    : n_(n), m_(m), probabilities_(probabilities), table_(std::move(table)) {
  if (n_ > 24) throw ResourceError("lookup table models support n <= 24");
  if (m_ == 0) throw ArgumentError("lookup table needs at least one output");
  if (table_.size() != (std::size_t{1} << n_)) {
    throw DimensionError("lookup table must have 2^n rows");
  }
  for (const auto& row : table_) {
    if (row.size() != m_) throw DimensionError("lookup table row has wrong width");
  }
}

LookupTableModel LookupTableModel::Random(std::size_t n, std::size_t m,
                                          std::uint64_t seed) {
  if (n > 24) throw ResourceError("lookup table models support n <= 24");
  Rng rng = MakeRng(seed, {0x7ab1e});
  std::vector<Scores> table(std::size_t{1} << n, Scores(m));
  for (auto& row : table) {
    if (m == 1) {
      row[0] = UniformDouble(rng);
      continue;
    }
    // Normalized exponentials are uniform on the simplex.
    double total = 0.0;
    for (auto& v : row) {
      v = -std::log(UniformOpenDouble(rng));
      total += v;
    }
    for (auto& v : row) v /= total;
  }
  return LookupTableModel(n, m, m >= 2, std::move(table));
}

Scores LookupTableModel::Evaluate(std::span<const double> x) const {
  CheckInputSize(x, n_);
  return table_[PresentFeatures(x).ToBits()];
}

}  // namespace stabcert
