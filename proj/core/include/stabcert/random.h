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

// Seeded random streams.
//
// Every randomized routine in the library takes a 64-bit seed and derives
// independent substreams from (seed, index...) tuples, so results do not
// depend on how work is split across threads. The helpers below avoid the
// std distributions because their output is implementation-defined; the
// engine itself (mt19937_64) is fully specified by the standard.

#ifndef STABCERT_RANDOM_H_
#define STABCERT_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace stabcert {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t MixBits(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for the substream identified by `path` below `seed`.
constexpr std::uint64_t DeriveSeed(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = MixBits(seed);
  for (std::uint64_t p : path) s = MixBits(s ^ MixBits(p + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng MakeRng(std::uint64_t seed,
                   std::initializer_list<std::uint64_t> path = {}) {
  return Rng(DeriveSeed(seed, path));
}

// Uniform double in [0, 1) with 53 random bits.
inline double UniformDouble(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1).
inline double UniformOpenDouble(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Uniform integer in [0, bound). bound must be positive.
inline std::uint64_t UniformIndex(Rng& rng, std::uint64_t bound) {
  // Rejection on the top of the range removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

inline bool Bernoulli(Rng& rng, double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return UniformDouble(rng) < p;
}

// Standard Gumbel variate, -log(-log(U)).
double Gumbel(Rng& rng);

// Standard normal variate (Box-Muller, one value per call).
double StandardNormal(Rng& rng);

}  // namespace stabcert

#endif  // STABCERT_RANDOM_H_
