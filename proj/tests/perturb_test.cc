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

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "stabcert/error.h"
#include "stabcert/perturb.h"
#include "testing/oracles.h"

namespace stabcert {
namespace {

using testing::Binomial;
using testing::CountSmallSubsets;

// Upper tail of the chi-square distribution.
double ChiSquarePValue(double stat, double dof) {
  return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

Mask RandomBase(std::size_t n, std::size_t a, std::mt19937_64& gen) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), gen);
  idx.resize(a);
  return Mask::FromIndices(n, idx);
}

TEST(DeltaSizeTest, Examples) {
  EXPECT_EQ(DeltaSize(4, 2, 2), 4);
  EXPECT_EQ(DeltaSize(10, 4, 0), 1);
  EXPECT_EQ(DeltaSize(9, 3, 3), 42);
  EXPECT_EQ(DeltaSize(9, 3, 3), CountSmallSubsets(6, 3));
  EXPECT_THROW(DeltaSize(3, 4, 1), ArgumentError);
}

TEST(DeltaSizeTest, ClampsAboveFreeCount) {
  for (std::size_t n = 0; n <= 12; ++n) {
    for (std::size_t a = 0; a <= n; ++a) {
      const std::size_t d = n - a;
      for (std::size_t r = d; r <= d + 3; ++r) {
        EXPECT_EQ(DeltaSize(n, a, r), DeltaSize(n, a, d));
      }
      EXPECT_EQ(DeltaSize(n, a, d), BigCount(1) << d);
    }
  }
}

TEST(DeltaSizeTest, ExactForLargeArguments) {
  // C(200, 100) overflows 64 bits; the sum must stay exact.
  const BigCount full = DeltaSize(200, 0, 200);
  EXPECT_EQ(full, BigCount(1) << 200);
  const BigCount half = DeltaSize(200, 0, 99);
  // Symmetry: 2 * Σ_{i<100} C(200, i) + C(200, 100) = 2^200.
  EXPECT_EQ(2 * half + (DeltaSize(200, 0, 100) - half), full);
}

TEST(LogBinomialTest, MatchesExact) {
  for (unsigned n = 0; n <= 60; ++n) {
    for (unsigned k = 0; k <= n; ++k) {
      EXPECT_NEAR(LogBinomial(n, k), std::log(double(Binomial(n, k))), 1e-9);
    }
  }
  EXPECT_TRUE(std::isinf(LogBinomial(3, 4)));
}

TEST(PerturbationSpaceTest, RecordsClamping) {
  const PerturbationSpace s(Mask::FromString("1100"), 5);
  EXPECT_EQ(s.requested_radius(), 5u);
  EXPECT_EQ(s.radius(), 2u);
  EXPECT_TRUE(s.clamped());
  EXPECT_EQ(s.free_slots(), (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(s.size(), 4);
}

TEST(EnumerateTest, SmallExamples) {
  const Mask base = Mask::FromString("101");
  auto members = Enumerate(PerturbationSpace(base, 1));
  ASSERT_EQ(members.size(), 2u);
  EXPECT_EQ(members[0], base);
  EXPECT_EQ(members[1].ToString(), "111");

  const Mask base2 = Mask::FromString("0100");
  members = Enumerate(PerturbationSpace(base2, 1));
  ASSERT_EQ(members.size(), 4u);
  EXPECT_EQ(members[0].ToString(), "0100");
  EXPECT_EQ(members[1].ToString(), "1100");
  EXPECT_EQ(members[2].ToString(), "0110");
  EXPECT_EQ(members[3].ToString(), "0101");

  members = Enumerate(PerturbationSpace(Mask::FromString("0001"), 3));
  EXPECT_EQ(members.size(), 8u);
  std::set<std::string> unique;
  for (const auto& m : members) {
    EXPECT_TRUE(m.Contains(Mask::FromString("0001")));
    unique.insert(m.ToString());
  }
  EXPECT_EQ(unique.size(), 8u);
}

TEST(EnumerateTest, OrderedBySizeThenLexicographic) {
  const auto members = Enumerate(PerturbationSpace(Mask(5), 3));
  for (std::size_t i = 1; i < members.size(); ++i) {
    const auto a = members[i - 1].Indices();
    const auto b = members[i].Indices();
    if (a.size() == b.size()) {
      EXPECT_TRUE(std::lexicographical_compare(a.begin(), a.end(), b.begin(),
                                               b.end()));
    } else {
      EXPECT_EQ(a.size() + 1, b.size());
    }
  }
}

TEST(EnumerateTest, CountMatchesDeltaSize) {
  std::mt19937_64 gen(42);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + gen() % 16;
    const std::size_t a = gen() % (n + 1);
    const std::size_t r = gen() % (n + 2);
    const Mask base = RandomBase(n, a, gen);
    const PerturbationSpace space(base, r);
    const auto members = Enumerate(space);
    EXPECT_EQ(BigCount(members.size()), DeltaSize(n, a, r));
    EXPECT_EQ(members.size(),
              CountSmallSubsets(unsigned(n - a), unsigned(std::min(r, n - a))));
    std::set<std::string> unique;
    for (const auto& m : members) {
      EXPECT_TRUE(m.Contains(base));
      EXPECT_LE(m.count() - base.count(), r);
      unique.insert(m.ToString());
    }
    EXPECT_EQ(unique.size(), members.size());
  }
}

TEST(EnumerateTest, CapNamesTheSetSize) {
  try {
    Enumerate(PerturbationSpace(Mask(20), 20), 1000);
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_NE(std::string(e.what()).find("1048576"), std::string::npos);
  }
}

TEST(SamplerTest, ZeroRadiusReturnsBase) {
  const Mask base = Mask::FromString("0110100");
  PerturbationSampler sampler(PerturbationSpace(base, 0));
  Rng rng = MakeRng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sampler.Sample(rng), base);
}

TEST(SamplerTest, OutputsStayInsideTheSet) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + gen() % 100;
    const std::size_t a = gen() % (n + 1);
    const std::size_t r = gen() % (n + 1);
    const Mask base = RandomBase(n, a, gen);
    PerturbationSampler sampler(PerturbationSpace(base, r));
    Rng rng = MakeRng(trial);
    for (int i = 0; i < 200; ++i) {
      const Mask m = sampler.Sample(rng);
      ASSERT_TRUE(m.Contains(base));
      ASSERT_LE(m.count() - a, r);
    }
  }
}

TEST(SamplerTest, TwoFreeSlotsAreUniform) {
  const Mask base = Mask::FromString("1010");
  PerturbationSampler sampler(PerturbationSpace(base, 2));
  Rng rng = MakeRng(2024);
  std::map<std::string, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[sampler.Sample(rng).ToString()];
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& [mask, c] : counts) {
    EXPECT_NEAR(double(c) / draws, 0.25, 0.01) << mask;
  }
}

TEST(SamplerTest, SizeDistributionFollowsBinomials) {
  PerturbationSampler sampler(PerturbationSpace(Mask::FromString("000000111"),
                                                3));
  Rng rng = MakeRng(77);
  std::vector<int> by_size(4, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++by_size[sampler.Sample(rng).count() - 3];
  EXPECT_NEAR(double(by_size[3]) / draws, 20.0 / 42.0, 0.01);
  EXPECT_NEAR(double(by_size[0]) / draws, 1.0 / 42.0, 0.01);
}

TEST(SamplerTest, ChiSquareAgainstEnumeration) {
  std::mt19937_64 gen(5);
  for (std::size_t d = 1; d <= 8; ++d) {
    for (std::size_t r : {std::size_t{1}, d / 2, d}) {
      if (r == 0) continue;
      const Mask base = RandomBase(d + 3, 3, gen);
      const PerturbationSpace space(base, r);
      const auto members = Enumerate(space);
      std::map<std::string, std::size_t> index;
      for (std::size_t i = 0; i < members.size(); ++i) {
        index[members[i].ToString()] = i;
      }
      PerturbationSampler sampler(space);
      Rng rng = MakeRng(1000 + d * 10 + r);
      const int draws = 100000;
      std::vector<double> counts(members.size(), 0.0);
      for (int i = 0; i < draws; ++i) {
        counts[index.at(sampler.Sample(rng).ToString())] += 1.0;
      }
      if (members.size() < 2) continue;
      const double expected = double(draws) / double(members.size());
      double stat = 0.0;
      for (double c : counts) stat += (c - expected) * (c - expected) / expected;
      EXPECT_GT(ChiSquarePValue(stat, double(members.size() - 1)), 1e-3)
          << "d=" << d << " r=" << r;
    }
  }
}

TEST(SamplerTest, SampleWithSizeAddsExactlyK) {
  const Mask base = Mask::FromString("10000000");
  PerturbationSampler sampler(PerturbationSpace(base, 7));
  Rng rng = MakeRng(3);
  for (std::size_t k = 0; k <= 7; ++k) {
    EXPECT_EQ(sampler.SampleWithSize(k, rng).count(), k + 1);
  }
  EXPECT_THROW(sampler.SampleWithSize(8, rng), ArgumentError);
}

TEST(PerturbRankingTest, TrivialCases) {
  const std::vector<std::size_t> r = {3, 1, 4, 0, 2};
  Rng rng = MakeRng(1);
  EXPECT_EQ(PerturbRanking(r, RankingPerturbation::Window(1), rng), r);
  EXPECT_EQ(PerturbRanking(r, RankingPerturbation::Swap(0), rng), r);
}

TEST(PerturbRankingTest, RejectsOversizedPerturbations) {
  const std::vector<std::size_t> r = {0, 1, 2, 3};
  Rng rng = MakeRng(1);
  EXPECT_THROW(PerturbRanking(r, RankingPerturbation::Window(5), rng),
               ArgumentError);
  EXPECT_THROW(PerturbRanking(r, RankingPerturbation::Window(0), rng),
               ArgumentError);
  EXPECT_THROW(PerturbRanking(r, RankingPerturbation::Swap(3), rng),
               ArgumentError);
}

TEST(PerturbRankingTest, FullWindowIsUniform) {
  const std::vector<std::size_t> r = {0, 1, 2, 3};
  Rng rng = MakeRng(99);
  std::map<std::vector<std::size_t>, int> counts;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    ++counts[PerturbRanking(r, RankingPerturbation::Window(4), rng)];
  }
  ASSERT_EQ(counts.size(), 24u);
  for (const auto& [perm, c] : counts) {
    EXPECT_NEAR(double(c) / draws, 1.0 / 24.0, 0.005);
  }
}

TEST(PerturbRankingTest, AlwaysReturnsAPermutation) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + gen() % 60;
    std::vector<std::size_t> r(n);
    std::iota(r.begin(), r.end(), 0);
    std::shuffle(r.begin(), r.end(), gen);
    Rng rng = MakeRng(trial);
    const auto p = (trial % 2)
                       ? RankingPerturbation::Window(1 + gen() % n)
                       : RankingPerturbation::Swap(gen() % (n / 2 + 1));
    auto out = PerturbRanking(r, p, rng);
    std::vector<std::size_t> a = r, b = out;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
    std::size_t moved = 0;
    for (std::size_t i = 0; i < n; ++i) moved += out[i] != r[i];
    if (p.kind == RankingPerturbation::Kind::kSwap) {
      EXPECT_EQ(moved, 2 * p.size);
    } else {
      EXPECT_LE(moved, p.size);
    }
  }
}

}  // namespace
}  // namespace stabcert
