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
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "stabcert/core.h"
#include "stabcert/error.h"
#include "stabcert/mask.h"

namespace stabcert {
namespace {

TEST(MaskTest, StringRoundTrip) {
  const Mask m = Mask::FromString("0110");
  EXPECT_EQ(m.size(), 4u);
  EXPECT_FALSE(m.test(0));
  EXPECT_TRUE(m.test(1));
  EXPECT_EQ(m.count(), 2u);
  EXPECT_EQ(m.ToString(), "0110");
  EXPECT_EQ(m.ToBits(), 0b0110u);
  EXPECT_THROW(Mask::FromString("01x"), ArgumentError);
}

TEST(MaskTest, WideMasksKeepPaddingClear) {
  Mask m = Mask::Ones(130);
  EXPECT_EQ(m.count(), 130u);
  EXPECT_EQ((~m).count(), 0u);
  m.reset(129);
  EXPECT_EQ((~m).Indices(), std::vector<std::size_t>{129});
}

TEST(MaskTest, ContainsIsSupersetOrder) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + gen() % 70;
    Mask a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a.set(i, gen() & 1);
      b.set(i, gen() & 1);
    }
    bool subset = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (b.test(i) && !a.test(i)) subset = false;
    }
    EXPECT_EQ(a.Contains(b), subset);
    EXPECT_TRUE((a | b).Contains(a));
    EXPECT_TRUE(a.Contains(a & b));
  }
  EXPECT_THROW(Mask(3).Contains(Mask(4)), DimensionError);
}

TEST(ApplyMaskTest, Examples) {
  const std::vector<double> x = {1.5, -2.0, 3.0};
  EXPECT_EQ(ApplyMask(x, Mask::FromString("111")), x);
  EXPECT_EQ(ApplyMask(x, Mask::FromString("000")),
            (std::vector<double>{0.0, 0.0, 0.0}));
  EXPECT_EQ(ApplyMask(x, Mask::FromString("101")),
            (std::vector<double>{1.5, 0.0, 3.0}));
  EXPECT_THROW(ApplyMask(x, Mask::FromString("10")), DimensionError);
}

TEST(ApplyMaskTest, IdempotentAndComposes) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 16;
    std::vector<double> x(n);
    for (double& v : x) v = normal(gen);
    Mask a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a.set(i, gen() & 1);
      b.set(i, gen() & 1);
    }
    const auto once = ApplyMask(x, a);
    EXPECT_EQ(ApplyMask(once, a), once);
    EXPECT_EQ(ApplyMask(x, a & b), ApplyMask(once, b));
  }
}

TEST(PredictsSameTest, Examples) {
  const auto argmax = PredictionRelation::ArgmaxEqual();
  EXPECT_TRUE(PredictsSame(std::vector<double>{0.7, 0.3},
                           std::vector<double>{0.6, 0.4}, argmax));
  EXPECT_FALSE(PredictsSame(std::vector<double>{0.4, 0.6},
                            std::vector<double>{0.6, 0.4}, argmax));
  const std::vector<double> a = {0.30}, b = {0.55};
  EXPECT_TRUE(PredictsSame(a, b, PredictionRelation::ScalarGap(0.5)));
  EXPECT_FALSE(PredictsSame(a, b, PredictionRelation::ScalarGap(0.2)));
}

TEST(PredictsSameTest, TiesGoToLowestIndex) {
  EXPECT_EQ(Argmax(std::vector<double>{0.5, 0.5}), 0u);
  EXPECT_TRUE(PredictsSame(std::vector<double>{0.5, 0.5},
                           std::vector<double>{0.9, 0.1},
                           PredictionRelation::ArgmaxEqual()));
}

TEST(PredictsSameTest, ReflexiveAndSymmetric) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> a = {u(gen), u(gen), u(gen)};
    std::vector<double> b = {u(gen), u(gen), u(gen)};
    const auto rel = PredictionRelation::ArgmaxEqual();
    EXPECT_TRUE(PredictsSame(a, a, rel));
    EXPECT_EQ(PredictsSame(a, b, rel), PredictsSame(b, a, rel));
    const auto gap = PredictionRelation::ScalarGap(u(gen));
    std::vector<double> s = {u(gen)}, t = {u(gen)};
    EXPECT_TRUE(PredictsSame(s, s, gap));
    EXPECT_EQ(PredictsSame(s, t, gap), PredictsSame(t, s, gap));
  }
}

TEST(PredictsSameTest, RejectsIncompatibleShapes) {
  const auto argmax = PredictionRelation::ArgmaxEqual();
  EXPECT_THROW(PredictsSame(std::vector<double>{0.1, 0.9},
                            std::vector<double>{0.1, 0.8, 0.1}, argmax),
               DimensionError);
  EXPECT_THROW(PredictsSame(std::vector<double>{1.0},
                            std::vector<double>{1.0}, argmax),
               ArgumentError);
  EXPECT_THROW(PredictionRelation::ScalarGap(-1.0), ArgumentError);
  EXPECT_THROW(PredictionRelation::ScalarGap(INFINITY), ArgumentError);
}

TEST(BinarizeTest, Examples) {
  Attribution a = BinarizeTopFraction(std::vector<double>{0.9, 0.1, 0.5, 0.4},
                                      0.25);
  EXPECT_EQ(a.k, 1u);
  EXPECT_EQ(a.mask.ToString(), "1000");
  a = BinarizeTopFraction(std::vector<double>{0.2, 0.2, 0.2, 0.2}, 0.5);
  EXPECT_EQ(a.k, 2u);
  EXPECT_EQ(a.mask.ToString(), "1100");
  EXPECT_EQ(a.ranking, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(BinarizeTest, QuarterOf196IsFortyNine) {
  std::vector<double> scores(196);
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = double(i % 17);
  const Attribution a = BinarizeTopFraction(scores, 0.25);
  EXPECT_EQ(a.k, 49u);
  EXPECT_EQ(a.mask.count(), 49u);
}

TEST(BinarizeTest, PopcountMatchesDocumentedK) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u;
  for (std::size_t n = 1; n <= 64; ++n) {
    for (double f : {0.125, 0.25, 0.375, 0.5}) {
      std::vector<double> scores(n);
      for (double& s : scores) s = u(gen);
      const Attribution a = BinarizeTopFraction(scores, f);
      const std::size_t expected =
          std::max<std::size_t>(1, (n * static_cast<std::size_t>(f * 1000)) /
                                       1000);
      EXPECT_EQ(a.k, expected) << "n=" << n << " f=" << f;
      EXPECT_EQ(a.mask.count(), expected);
      for (std::size_t j = 0; j < a.k; ++j) {
        EXPECT_TRUE(a.mask.test(a.ranking[j]));
      }
    }
  }
}

TEST(BinarizeTest, RejectsBadArguments) {
  EXPECT_THROW(BinarizeTopFraction(std::vector<double>{}, 0.5), ArgumentError);
  EXPECT_THROW(BinarizeTopFraction(std::vector<double>{1.0}, 0.0),
               ArgumentError);
}

TEST(DecisionGapTest, Examples) {
  EXPECT_DOUBLE_EQ(DecisionGap(std::vector<double>{0.8, 0.2}), 0.3);
  EXPECT_DOUBLE_EQ(DecisionGap(std::vector<double>{0.5, 0.5}), 0.0);
  EXPECT_DOUBLE_EQ(DecisionGap(std::vector<double>{0.6, 0.3, 0.1}), 0.15);
  EXPECT_THROW(DecisionGap(std::vector<double>{1.0}), ArgumentError);
}

TEST(RankingTest, CheckPermutation) {
  EXPECT_NO_THROW(CheckPermutation(std::vector<std::size_t>{2, 0, 1}, 3));
  EXPECT_THROW(CheckPermutation(std::vector<std::size_t>{0, 0, 1}, 3),
               ArgumentError);
  EXPECT_THROW(CheckPermutation(std::vector<std::size_t>{0, 1}, 3),
               ArgumentError);
}

}  // namespace
}  // namespace stabcert
