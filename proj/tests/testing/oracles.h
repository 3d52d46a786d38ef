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

// Brute-force reference implementations used by the tests. Each one follows
// the textbook definition directly and shares no code with the library, so
// agreement is evidence rather than tautology. They are exponential and only
// meant for small n.

#ifndef STABCERT_TESTS_TESTING_ORACLES_H_
#define STABCERT_TESTS_TESTING_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace stabcert::testing {

using Table = std::vector<double>;

inline int Pop(std::uint64_t v) { return __builtin_popcountll(v); }

// Exact binomial coefficient by Pascal's rule.
inline std::uint64_t Binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  std::vector<std::uint64_t> row(n + 1, 0);
  row[0] = 1;
  for (unsigned i = 1; i <= n; ++i) {
    for (unsigned j = i; j > 0; --j) row[j] += row[j - 1];
  }
  return row[k];
}

// Number of subsets of d slots with at most r elements, by counting.
inline std::uint64_t CountSmallSubsets(unsigned d, unsigned r) {
  std::uint64_t c = 0;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << d); ++s) {
    if (static_cast<unsigned>(Pop(s)) <= r) ++c;
  }
  return c;
}

// Uniform [0,1] table.
inline Table RandomTable(unsigned n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Table t(std::size_t{1} << n);
  for (double& v : t) v = u(gen);
  return t;
}

// Random 0/1 table, biased towards 1 so that flip rates vary across sets.
inline std::vector<std::uint8_t> RandomIndicator(unsigned n,
                                                 std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution coin(0.7);
  std::vector<std::uint8_t> t(std::size_t{1} << n);
  for (auto& v : t) v = coin(gen);
  return t;
}

inline std::vector<std::size_t> RandomRanking(std::size_t n,
                                              std::uint64_t seed) {
  std::vector<std::size_t> r(n);
  std::iota(r.begin(), r.end(), 0);
  std::mt19937_64 gen(seed);
  std::shuffle(r.begin(), r.end(), gen);
  return r;
}

// Table whose monotone expansion has at most `terms` non-zero coefficients,
// each uniform in [-0.3, 0.3].
inline Table SparseMonotoneTable(unsigned n, int terms, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  Table mono(std::size_t{1} << n, 0.0);
  for (int i = 0; i < terms; ++i) mono[gen() % mono.size()] = u(gen);
  Table h(mono.size(), 0.0);
  for (std::uint64_t a = 0; a < h.size(); ++a) {
    for (std::uint64_t t = 0; t < h.size(); ++t) {
      if ((t & ~a) == 0) h[a] += mono[t];
    }
  }
  return h;
}

// ĥ(S) = 2^{-n} Σ_α h(α) Π_{i∈S} (-1)^{α_i}.
inline Table FourierByDefinition(const Table& h, unsigned n) {
  Table out(h.size(), 0.0);
  for (std::uint64_t s = 0; s < h.size(); ++s) {
    double acc = 0.0;
    for (std::uint64_t a = 0; a < h.size(); ++a) {
      acc += (Pop(a & s) % 2 ? -1.0 : 1.0) * h[a];
    }
    out[s] = acc / std::ldexp(1.0, static_cast<int>(n));
  }
  return out;
}

// ~h(T) = h(T) - Σ_{S⊊T} ~h(S), in order of increasing |T|.
inline Table MonotoneByRecursion(const Table& h) {
  Table out(h.size(), 0.0);
  std::vector<std::uint64_t> order(h.size());
  for (std::uint64_t t = 0; t < h.size(); ++t) order[t] = t;
  std::stable_sort(order.begin(), order.end(),
                   [](std::uint64_t a, std::uint64_t b) {
                     return Pop(a) < Pop(b);
                   });
  for (std::uint64_t t : order) {
    double acc = h[t];
    for (std::uint64_t s = 0; s < h.size(); ++s) {
      if (s != t && (s & ~t) == 0) acc -= out[s];
    }
    out[t] = acc;
  }
  return out;
}

// M_λ h(α) = Σ_z λ^{|z|} (1-λ)^{n-|z|} h(α ∧ z).
inline Table SmoothByDefinition(const Table& h, unsigned n, double lambda) {
  Table out(h.size(), 0.0);
  for (std::uint64_t a = 0; a < h.size(); ++a) {
    double acc = 0.0;
    for (std::uint64_t z = 0; z < h.size(); ++z) {
      const int k = Pop(z);
      acc += std::pow(lambda, k) * std::pow(1.0 - lambda, int(n) - k) *
             h[a & z];
    }
    out[a] = acc;
  }
  return out;
}

// T_ρ h(α) = Σ_ξ q^{|ξ|} (1-q)^{n-|ξ|} h(α ⊕ ξ) with q = (1-ρ)/2.
inline Table FlipByDefinition(const Table& h, unsigned n, double rho) {
  const double q = (1.0 - rho) / 2.0;
  Table out(h.size(), 0.0);
  for (std::uint64_t a = 0; a < h.size(); ++a) {
    double acc = 0.0;
    for (std::uint64_t x = 0; x < h.size(); ++x) {
      const int k = Pop(x);
      acc += std::pow(q, k) * std::pow(1.0 - q, int(n) - k) * h[a ^ x];
    }
    out[a] = acc;
  }
  return out;
}

// Weight of α under Bern(p)^n.
inline double BernWeight(std::uint64_t a, unsigned n, double p) {
  const int k = Pop(a);
  return std::pow(p, k) * std::pow(1.0 - p, int(n) - k);
}

// χ_S^p(α) = Π_{i∈S} (p - α_i) / sqrt(p(1-p)).
inline double BiasedChar(std::uint64_t s, std::uint64_t a, unsigned n,
                         double p) {
  const double sigma = std::sqrt(p * (1.0 - p));
  double v = 1.0;
  for (unsigned i = 0; i < n; ++i) {
    if ((s >> i) & 1) v *= (p - double((a >> i) & 1)) / sigma;
  }
  return v;
}

// Fraction of β ⊇ α with |β \ α| <= r whose value `same(β)` holds, found by
// scanning all 2^n masks.
inline double StabilityByScan(unsigned n, std::uint64_t alpha, unsigned r,
                              const std::function<bool(std::uint64_t)>& same) {
  std::uint64_t total = 0, stable = 0;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
    if ((b & alpha) != alpha) continue;
    if (static_cast<unsigned>(Pop(b & ~alpha)) > r) continue;
    ++total;
    if (same(b)) ++stable;
  }
  return double(stable) / double(total);
}

// Inf_g(S) = 2 P[g(z) != g(z')], over every z and every re-randomization
// z' of the coordinates in S.
inline double InfluenceByPairs(const std::vector<std::uint8_t>& g,
                               std::uint64_t s) {
  std::uint64_t differ = 0, pairs = 0;
  for (std::uint64_t z = 0; z < g.size(); ++z) {
    for (std::uint64_t w = 0; w < g.size(); ++w) {
      if ((w & ~s) != (z & ~s)) continue;
      ++pairs;
      if (g[z] != g[w]) ++differ;
    }
  }
  return 2.0 * double(differ) / double(pairs);
}

// P[Bin(n, λ) >= k] from exact binomials.
inline double BinomialTail(unsigned n, unsigned k, double lambda) {
  double t = 0.0;
  for (unsigned j = k; j <= n; ++j) {
    t += double(Binomial(n, j)) * std::pow(lambda, j) *
         std::pow(1.0 - lambda, n - j);
  }
  return t;
}

}  // namespace stabcert::testing

#endif  // STABCERT_TESTS_TESTING_ORACLES_H_
