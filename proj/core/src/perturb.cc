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

#include "stabcert/perturb.h"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <utility>

#include "stabcert/error.h"

namespace stabcert {

std::size_t EnumerationCap() {
  if (const char* env = std::getenv("STABCERT_ENUM_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return kDefaultEnumerationCap;
}

BigCount DeltaSize(std::size_t n, std::size_t a, std::size_t r) {
  if (a > n) {
    throw ArgumentError("mask keeps " + std::to_string(a) +
                        " features but only " + std::to_string(n) + " exist");
  }
  const std::size_t d = n - a;
  const std::size_t top = std::min(r, d);
  BigCount term = 1;
  BigCount total = 1;
  for (std::size_t i = 1; i <= top; ++i) {
    term = term * (d - i + 1) / i;
    total += term;
  }
  return total;
}

double LogBinomial(std::size_t n, std::size_t k) {
  if (k > n) return -std::numeric_limits<double>::infinity();
  k = std::min(k, n - k);
  double v = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    v += std::log(static_cast<double>(n - k + i)) -
         std::log(static_cast<double>(i));
  }
  return v;
}

PerturbationSpace::PerturbationSpace(Mask base, std::size_t radius)
    : base_(std::move(base)), requested_radius_(radius) {
  for (std::size_t i = 0; i < base_.size(); ++i) {
    if (!base_.test(i)) free_slots_.push_back(i);
  }
  radius_ = std::min(requested_radius_, free_slots_.size());
}

BigCount PerturbationSpace::size() const {
  return DeltaSize(base_.size(), base_.size() - free_slots_.size(), radius_);
}

double PerturbationSpace::approximate_size() const {
  return size().convert_to<double>();
}

PerturbationSampler::PerturbationSampler(const PerturbationSpace& space)
    : space_(space), scratch_(space.free_slots()) {
  const std::size_t d = space_.free_count();
  log_weights_.resize(space_.radius() + 1);
  // log C(d, k), accumulated term by term.
  double acc = 0.0;
  log_weights_[0] = 0.0;
  for (std::size_t k = 1; k <= space_.radius(); ++k) {
    acc += std::log(static_cast<double>(d - k + 1)) -
           std::log(static_cast<double>(k));
    log_weights_[k] = acc;
  }
}

std::size_t PerturbationSampler::SampleSize(Rng& rng) const {
  std::size_t best = 0;
  double best_key = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < log_weights_.size(); ++k) {
    const double key = log_weights_[k] + Gumbel(rng);
    if (key > best_key) {
      best_key = key;
      best = k;
    }
  }
  return best;
}

Mask PerturbationSampler::SampleWithSize(std::size_t k, Rng& rng) {
  const std::size_t d = scratch_.size();
  if (k > d) {
    throw ArgumentError("cannot add " + std::to_string(k) + " features with " +
                        std::to_string(d) + " free slots");
  }
  Mask out = space_.base();
  // Partial Fisher-Yates. The scratch list stays a permutation of the free
  // slots, so its order carried over from earlier draws does not matter.
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t pick = j + UniformIndex(rng, d - j);
    std::swap(scratch_[j], scratch_[pick]);
    out.set(scratch_[j]);
  }
  return out;
}

Mask PerturbationSampler::Sample(Rng& rng) {
  return SampleWithSize(SampleSize(rng), rng);
}

Mask SampleUniform(const PerturbationSpace& space, Rng& rng) {
  PerturbationSampler sampler(space);
  return sampler.Sample(rng);
}

void ForEachMember(const PerturbationSpace& space, std::size_t cap,
                   const std::function<void(const Mask&)>& visit) {
  const BigCount total = space.size();
  if (total > cap) {
    throw ResourceError("perturbation set has " + total.str() +
                        " members, above the enumeration cap of " +
                        std::to_string(cap));
  }
  const auto& free = space.free_slots();
  const std::size_t d = free.size();
  std::vector<std::size_t> comb;
  for (std::size_t k = 0; k <= space.radius(); ++k) {
    comb.resize(k);
    for (std::size_t i = 0; i < k; ++i) comb[i] = i;
    for (;;) {
      Mask m = space.base();
      for (std::size_t c : comb) m.set(free[c]);
      visit(m);
      // Advance to the next combination in lexicographic order.
      std::size_t i = k;
      while (i > 0 && comb[i - 1] == d - k + i - 1) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
}

std::vector<Mask> Enumerate(const PerturbationSpace& space, std::size_t cap) {
  std::vector<Mask> out;
  ForEachMember(space, cap, [&](const Mask& m) { out.push_back(m); });
  return out;
}

std::vector<std::size_t> PerturbRanking(std::span<const std::size_t> ranking,
                                        const RankingPerturbation& p,
                                        Rng& rng) {
  std::vector<std::size_t> out(ranking.begin(), ranking.end());
  const std::size_t n = out.size();
  if (p.kind == RankingPerturbation::Kind::kWindow) {
    if (p.size < 1 || p.size > n) {
      throw ArgumentError("window size must lie in [1, " + std::to_string(n) +
                          "], got " + std::to_string(p.size));
    }
    const std::size_t start = UniformIndex(rng, n - p.size + 1);
    for (std::size_t j = p.size; j > 1; --j) {
      const std::size_t pick = UniformIndex(rng, j);
      std::swap(out[start + j - 1], out[start + pick]);
    }
    return out;
  }
  if (2 * p.size > n) {
    throw ArgumentError("cannot draw " + std::to_string(p.size) +
                        " disjoint swaps from " + std::to_string(n) +
                        " positions");
  }
  std::vector<std::size_t> positions(n);
  for (std::size_t i = 0; i < n; ++i) positions[i] = i;
  for (std::size_t j = 0; j < 2 * p.size; ++j) {
    std::swap(positions[j], positions[j + UniformIndex(rng, n - j)]);
  }
  for (std::size_t s = 0; s < p.size; ++s) {
    std::swap(out[positions[2 * s]], out[positions[2 * s + 1]]);
  }
  return out;
}

}  // namespace stabcert
