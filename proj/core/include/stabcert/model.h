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

#ifndef STABCERT_MODEL_H_
#define STABCERT_MODEL_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "stabcert/core.h"
#include "stabcert/mask.h"

namespace stabcert {

// Black-box classifier f: R^n -> R^m evaluated on masked inputs.
//
// Builtin models are deterministic and safe to call from several threads.
// Adapters that are not (an external process, for example) return false
// from concurrency_safe() and the estimators then evaluate serially.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::size_t num_features() const = 0;
  virtual std::size_t num_outputs() const = 0;
  // True if outputs are class probabilities (entries in [0,1], sum 1).
  virtual bool emits_probabilities() const = 0;
  virtual bool concurrency_safe() const { return true; }

  virtual Scores Evaluate(std::span<const double> x) const = 0;
  // Default implementation loops over Evaluate.
  virtual std::vector<Scores> EvaluateBatch(
      std::span<const Features> inputs) const;
};

// Evaluates `inputs`, fanning out over `workers` threads when the model
// allows it. A failure is rethrown as ModelError naming the input index.
std::vector<Scores> EvaluateMany(const Model& model,
                                 std::span<const Features> inputs,
                                 int workers = 1);

// f(x ⊙ mask) for every mask.
std::vector<Scores> EvaluateMasked(const Model& model,
                                   std::span<const double> x,
                                   std::span<const Mask> masks,
                                   int workers = 1);

// Features present in x (non-zero entries). Builtin models read a feature
// as present iff it is non-zero, which is what masking produces.
Mask PresentFeatures(std::span<const double> x);

// Forwards to an inner model and counts evaluations.
class CountingModel : public Model {
 public:
  explicit CountingModel(const Model& inner) : inner_(inner) {}

  std::size_t num_features() const override { return inner_.num_features(); }
  std::size_t num_outputs() const override { return inner_.num_outputs(); }
  bool emits_probabilities() const override {
    return inner_.emits_probabilities();
  }
  bool concurrency_safe() const override { return inner_.concurrency_safe(); }
  Scores Evaluate(std::span<const double> x) const override;
  std::vector<Scores> EvaluateBatch(
      std::span<const Features> inputs) const override;

  std::uint64_t evaluations() const { return count_.load(); }

 private:
  const Model& inner_;
  mutable std::atomic<std::uint64_t> count_{0};
};

// Wraps a callable.
class FunctionModel : public Model {
 public:
  using Fn = std::function<Scores(std::span<const double>)>;

  FunctionModel(std::size_t n, std::size_t m, bool probabilities, Fn fn)
      : n_(n), m_(m), probabilities_(probabilities), fn_(std::move(fn)) {}

  std::size_t num_features() const override { return n_; }
  std::size_t num_outputs() const override { return m_; }
  bool emits_probabilities() const override { return probabilities_; }
  Scores Evaluate(std::span<const double> x) const override;

 private:
  std::size_t n_;
  std::size_t m_;
  bool probabilities_;
  Fn fn_;
};

// Two-class model predicting class 1 iff every required feature is present.
class ConjunctionModel : public Model {
 public:
  explicit ConjunctionModel(Mask required);

  std::size_t num_features() const override { return required_.size(); }
  std::size_t num_outputs() const override { return 2; }
  bool emits_probabilities() const override { return true; }
  Scores Evaluate(std::span<const double> x) const override;

  const Mask& required() const { return required_; }

 private:
  Mask required_;
};

// Two-class model predicting class 1 iff at least `threshold` voters are
// present.
class MajorityModel : public Model {
 public:
  MajorityModel(Mask voters, std::size_t threshold);

  std::size_t num_features() const override { return voters_.size(); }
  std::size_t num_outputs() const override { return 2; }
  bool emits_probabilities() const override { return true; }
  Scores Evaluate(std::span<const double> x) const override;

 private:
  Mask voters_;
  std::size_t threshold_;
};

// Output chosen from a table indexed by the presence pattern of the input.
// n <= 24.
class LookupTableModel : public Model {
 public:
  LookupTableModel(std::size_t n, std::size_t m, bool probabilities,
                   std::vector<Scores> table);

  // Random table: each row is a uniform point of the probability simplex
  // when m >= 2, a uniform value in [0,1] when m == 1.
  static LookupTableModel Random(std::size_t n, std::size_t m,
                                 std::uint64_t seed);

  std::size_t num_features() const override { return n_; }
  std::size_t num_outputs() const override { return m_; }
  bool emits_probabilities() const override { return probabilities_; }
  Scores Evaluate(std::span<const double> x) const override;

  const std::vector<Scores>& table() const { return table_; }

 private:
  std::size_t n_;
  std::size_t m_;
  bool probabilities_;
  std::vector<Scores> table_;
};

}  // namespace stabcert

#endif  // STABCERT_MODEL_H_
