// Copyright 2026 The dp-decode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpdecode/core.h"

#include <cmath>

#include "gtest/gtest.h"

#include "dpdecode/errors.h"
#include "test_util.h"

namespace dpdecode {
namespace {

using testing::RandomLogits;
using testing::TvDistance;

TEST(VocabularyTest, RejectsDuplicatesAndBadEos) {
  EXPECT_THROW(Vocabulary({"a", "a"}, 0), InvalidParameterError);
  EXPECT_THROW(Vocabulary({"a", "b"}, 2), InvalidParameterError);
  EXPECT_THROW(Vocabulary({"a", "b"}, -1), InvalidParameterError);
  EXPECT_THROW(Vocabulary({"solo"}, 0), InvalidParameterError);
  const Vocabulary vocab({"a", "b", "<eos>"}, 2);
  EXPECT_EQ(vocab.size(), 3);
  EXPECT_EQ(vocab.token(1), "b");
}

TEST(SoftmaxTest, UniformOnEqualLogits) {
  const ProbVector p = Softmax(LogitVector{0.0, 0.0}, 1.0);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(SoftmaxTest, HandEvaluatedRatio) {
  // exp(ln 3) : exp(0) = 3 : 1.
  const ProbVector p = Softmax(LogitVector{std::log(3.0), 0.0}, 1.0);
  EXPECT_NEAR(p[0], 0.75, 1e-12);
  EXPECT_NEAR(p[1], 0.25, 1e-12);
}

TEST(SoftmaxTest, LargeLogitsStayFinite) {
  const ProbVector p = Softmax(LogitVector{1000.0, 0.0}, 1.0);
  EXPECT_TRUE(std::isfinite(p[0]));
  EXPECT_TRUE(std::isfinite(p[1]));
  EXPECT_NEAR(p[0], 1.0, 1e-12);
  EXPECT_NEAR(p[1], 0.0, 1e-12);
}

TEST(SoftmaxTest, RejectsNonPositiveTemperature) {
  EXPECT_THROW(Softmax(LogitVector{0.0, 1.0}, 0.0), InvalidParameterError);
  EXPECT_THROW(Softmax(LogitVector{0.0, 1.0}, -1.0), InvalidParameterError);
}

TEST(SoftmaxTest, SumsToOneTightly) {
  RandomStream rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const LogitVector z = RandomLogits(17, -30.0, 30.0, rng);
    const ProbVector p = Softmax(z, 0.25 + rng.NextUnit() * 3.0);
    double sum = 0.0;
    for (double v : p.values) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(SoftmaxTest, ShiftInvariance) {
  RandomStream rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const LogitVector z = RandomLogits(9, -5.0, 5.0, rng);
    const double shift = -50.0 + 100.0 * rng.NextUnit();
    LogitVector shifted = z;
    for (double& v : shifted.values) v += shift;
    const double tau = 0.5 + 2.0 * rng.NextUnit();
    const ProbVector a = Softmax(z, tau);
    const ProbVector b = Softmax(shifted, tau);
    for (int i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(a[i], b[i], 1e-12);
    }
  }
}

TEST(SoftmaxTest, ArgmaxPreservedAcrossTemperatures) {
  RandomStream rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const LogitVector z = RandomLogits(12, -4.0, 4.0, rng);
    int argmax_z = 0;
    for (int i = 1; i < z.size(); ++i) {
      if (z[i] > z[argmax_z]) argmax_z = i;
    }
    for (double tau : {0.1, 1.0, 7.5}) {
      const ProbVector p = Softmax(z, tau);
      int argmax_p = 0;
      for (int i = 1; i < p.size(); ++i) {
        if (p[i] > p[argmax_p]) argmax_p = i;
      }
      EXPECT_EQ(argmax_p, argmax_z);
    }
  }
}

TEST(SampleCategoricalTest, PointMass) {
  RandomStream rng(1);
  const ProbVector p{1.0, 0.0, 0.0};
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(SampleCategorical(p, rng), 0);
  }
}

TEST(SampleCategoricalTest, FairCoinFrequency) {
  RandomStream rng(42);
  const ProbVector p{0.5, 0.5};
  const long trials = 100000;
  long zeros = 0;
  for (long i = 0; i < trials; ++i) {
    if (SampleCategorical(p, rng) == 0) ++zeros;
  }
  const double freq = static_cast<double>(zeros) / trials;
  EXPECT_GE(freq, 0.49);
  EXPECT_LE(freq, 0.51);
}

TEST(SampleCategoricalTest, EmpiricalTvSmall) {
  RandomStream rng(43);
  const std::vector<double> target = {0.2, 0.3, 0.5};
  const ProbVector p{0.2, 0.3, 0.5};
  const long trials = 100000;
  std::vector<long> counts(3, 0);
  for (long i = 0; i < trials; ++i) ++counts[SampleCategorical(p, rng)];
  EXPECT_LT(TvDistance(counts, target, trials), 0.01);
}

TEST(SampleCategoricalTest, NaNRejected) {
  RandomStream rng(2);
  const ProbVector p{0.5, std::nan("")};
  EXPECT_THROW(SampleCategorical(p, rng), InvalidParameterError);
}

TEST(SampleCategoricalTest, OneDrawPerSample) {
  RandomStream rng(3);
  const ProbVector p{0.25, 0.25, 0.25, 0.25};
  for (int i = 1; i <= 50; ++i) {
    SampleCategorical(p, rng);
    EXPECT_EQ(rng.draw_count(), static_cast<std::uint64_t>(i));
  }
}

TEST(RandomStreamTest, SameSeedSameSequence) {
  RandomStream a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(a.NextUnit(), b.NextUnit());
  }
}

TEST(RandomStreamTest, DerivedStreamsDiffer) {
  RandomStream a = RandomStream::Derive(9, 0);
  RandomStream b = RandomStream::Derive(9, 1);
  int equal = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.NextUnit() == b.NextUnit()) ++equal;
  }
  EXPECT_LT(equal, 2);
}

TEST(RandomStreamTest, UnitDrawsLieInOpenInterval) {
  RandomStream rng(5);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.NextUnit();
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace dpdecode
