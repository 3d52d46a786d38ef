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

// The additive perturbation set Δ_r(α): all masks that keep every feature of
// α and add at most r more. Counting, exact uniform sampling, enumeration,
// and the window/swap perturbations applied to attribution rankings.

#ifndef STABCERT_PERTURB_H_
#define STABCERT_PERTURB_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "stabcert/mask.h"
#include "stabcert/random.h"

namespace stabcert {

using BigCount = boost::multiprecision::cpp_int;

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 22;

// Cap on exhaustive enumerations; STABCERT_ENUM_CAP overrides the default.
std::size_t EnumerationCap();

// sum_{i=0}^{min(r, n-a)} C(n-a, i), exact. Throws ArgumentError if a > n.
BigCount DeltaSize(std::size_t n, std::size_t a, std::size_t r);

// log C(n, k) as a running sum of logs; -inf when k > n.
double LogBinomial(std::size_t n, std::size_t k);

class PerturbationSpace {
 public:
  // A radius larger than the number of free slots is clamped.
  PerturbationSpace(Mask base, std::size_t radius);

  const Mask& base() const { return base_; }
  std::size_t num_features() const { return base_.size(); }
  std::size_t requested_radius() const { return requested_radius_; }
  // Radius after clamping to the free-slot count.
  std::size_t radius() const { return radius_; }
  bool clamped() const { return radius_ != requested_radius_; }
  // Positions where the base mask is 0, ascending.
  const std::vector<std::size_t>& free_slots() const { return free_slots_; }
  std::size_t free_count() const { return free_slots_.size(); }

  BigCount size() const;
  // size() as a double; may round for large spaces.
  double approximate_size() const;

 private:
  Mask base_;
  std::size_t requested_radius_;
  std::size_t radius_;
  std::vector<std::size_t> free_slots_;
};

// Uniform sampler over a perturbation space.
//
// The perturbation size k in {0..r} is drawn with log-weight log C(d, k) by
// the Gumbel-max trick, then k free slots are picked by a partial
// Fisher-Yates shuffle of the free-slot list. Keeps scratch state, so one
// sampler must not be shared between threads.
class PerturbationSampler {
 public:
  explicit PerturbationSampler(const PerturbationSpace& space);

  Mask Sample(Rng& rng);
  std::size_t SampleSize(Rng& rng) const;
  // Adds exactly k uniformly chosen free slots; k <= free_count().
  Mask SampleWithSize(std::size_t k, Rng& rng);

  const PerturbationSpace& space() const { return space_; }

 private:
  PerturbationSpace space_;
  std::vector<double> log_weights_;
  std::vector<std::size_t> scratch_;
};

Mask SampleUniform(const PerturbationSpace& space, Rng& rng);

// Visits every member once, ordered by perturbation size and then by the
// lexicographic combination of free-slot positions. Throws ResourceError if
// |Δ_r| exceeds `cap`.
void ForEachMember(const PerturbationSpace& space, std::size_t cap,
                   const std::function<void(const Mask&)>& visit);
std::vector<Mask> Enumerate(const PerturbationSpace& space,
                            std::size_t cap = EnumerationCap());

// Local reorderings of an attribution ranking.
struct RankingPerturbation {
  enum class Kind { kWindow, kSwap };

  // Shuffles a window of `size` consecutive ranks.
  static RankingPerturbation Window(std::size_t size) {
    return {Kind::kWindow, size};
  }
  // Swaps `size` disjoint pairs of ranks.
  static RankingPerturbation Swap(std::size_t size) {
    return {Kind::kSwap, size};
  }

  Kind kind;
  std::size_t size;
};

std::vector<std::size_t> PerturbRanking(std::span<const std::size_t> ranking,
                                        const RankingPerturbation& p,
                                        Rng& rng);

}  // namespace stabcert

#endif  // STABCERT_PERTURB_H_
