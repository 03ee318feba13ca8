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

#include "dpdecode/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gtest/gtest.h"

#include "dpdecode/errors.h"
#include "test_util.h"

namespace dpdecode {
namespace {

using testing::ChiSquareCritical999;
using testing::ChiSquareStat;
using testing::RandomLogits;

constexpr double kInf = std::numeric_limits<double>::infinity();

double L1Gap(const ProbVector& a, const ProbVector& b) {
  double gap = 0.0;
  for (int i = 0; i < a.size(); ++i) gap += std::abs(a[i] - b[i]);
  return gap;
}

TEST(ClipRecenterTest, HandEvaluatedCases) {
  const LogitVector a = ClipRecenter(LogitVector{5.0, 3.0, 1.0}, 10.0);
  EXPECT_EQ(a.values, (std::vector<double>{10.0, 8.0, 6.0}));

  const LogitVector b = ClipRecenter(LogitVector{0.0, -30.0}, 10.0);
  EXPECT_EQ(b.values, (std::vector<double>{10.0, -10.0}));

  const LogitVector c = ClipRecenter(LogitVector{7.0, 7.0}, 3.0);
  EXPECT_EQ(c.values, (std::vector<double>{3.0, 3.0}));
}

TEST(ClipRecenterTest, OutputRangeAndMaxPinned) {
  RandomStream rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const double bound = 0.5 + 10.0 * rng.NextUnit();
    const LogitVector z = RandomLogits(16, -40.0, 40.0, rng);
    const LogitVector clipped = ClipRecenter(z, bound);
    double max_entry = -kInf;
    for (double v : clipped.values) {
      EXPECT_GE(v, -bound);
      EXPECT_LE(v, bound);
      max_entry = std::max(max_entry, v);
    }
    EXPECT_DOUBLE_EQ(max_entry, bound);
  }
}

TEST(ClipFixedTest, HandEvaluatedCases) {
  EXPECT_EQ(ClipFixed(LogitVector{5.0, 3.0, 1.0}, 10.0).values,
            (std::vector<double>{5.0, 3.0, 1.0}));
  EXPECT_EQ(ClipFixed(LogitVector{15.0, 3.0}, 10.0).values,
            (std::vector<double>{10.0, 3.0}));
  EXPECT_EQ(ClipFixed(LogitVector{-20.0, 20.0}, 10.0).values,
            (std::vector<double>{-10.0, 10.0}));
}

TEST(AggregateTest, HandEvaluatedCases) {
  const std::vector<LogitVector> pair = {LogitVector{2.0, 0.0},
                                         LogitVector{0.0, 2.0}};
  EXPECT_EQ(Aggregate(pair, 2, 10.0).values, (std::vector<double>{9.0, 9.0}));

  const std::vector<LogitVector> single = {LogitVector{0.0, 0.0}};
  EXPECT_EQ(Aggregate(single, 2, 1.0).values,
            (std::vector<double>{0.5, 0.5}));
}

TEST(AggregateTest, EmptyBatchIsZero) {
  const LogitVector out = Aggregate({}, 5, 10.0);
  EXPECT_TRUE(out.values.empty());
}

// The divisor is the configured batch size: shrinking the realized batch
// only scales the sum down, it never renormalizes.
TEST(AggregateTest, DivisorIsConfiguredNotRealized) {
  const std::vector<LogitVector> one = {LogitVector{0.0, 0.0}};
  const std::vector<LogitVector> two = {LogitVector{0.0, 0.0},
                                        LogitVector{0.0, 0.0}};
  const LogitVector a = Aggregate(one, 4, 1.0);
  const LogitVector b = Aggregate(two, 4, 1.0);
  EXPECT_DOUBLE_EQ(a[0], 0.25);
  EXPECT_DOUBLE_EQ(b[0], 0.5);
}

TEST(ExpMechSampleTest, SymmetricScores) {
  RandomStream rng(31);
  const LogitVector z{0.0, 0.0};
  long zeros = 0;
  const long trials = 100000;
  for (long i = 0; i < trials; ++i) {
    if (ExpMechSample(z, 2.0, rng) == 0) ++zeros;
  }
  EXPECT_NEAR(static_cast<double>(zeros) / trials, 0.5, 0.01);
}

TEST(ExpMechSampleTest, LogisticProbabilityMatchesClosedForm) {
  RandomStream rng(32);
  const LogitVector z{10.0, -10.0};
  const double expected = 1.0 / (1.0 + std::exp(-10.0));
  long zeros = 0;
  const long trials = 100000;
  for (long i = 0; i < trials; ++i) {
    if (ExpMechSample(z, 2.0, rng) == 0) ++zeros;
  }
  EXPECT_NEAR(static_cast<double>(zeros) / trials, expected, 0.01);
}

TEST(ExpMechSampleTest, MaskRestrictsAndRenormalizes) {
  RandomStream rng(33);
  const LogitVector z{1.0, 2.0, 3.0};
  const std::vector<TokenId> mask = {0, 2};
  long count0 = 0, count2 = 0;
  const long trials = 200000;
  for (long i = 0; i < trials; ++i) {
    const TokenId t = ExpMechSample(z, 1.0, rng, std::span(mask));
    ASSERT_NE(t, 1);  // masked out entirely
    if (t == 0) ++count0;
    if (t == 2) ++count2;
  }
  const double ratio = static_cast<double>(count2) / count0;
  EXPECT_NEAR(ratio, std::exp(2.0), 0.3);
}

TEST(ExpMechSampleTest, EmptyMaskRejected) {
  RandomStream rng(34);
  const std::vector<TokenId> empty;
  EXPECT_THROW(ExpMechSample(LogitVector{0.0, 1.0}, 1.0, rng, std::span(empty)),
               InvalidParameterError);
}

TEST(ExpMechSampleTest, ChiSquareGoodnessOfFit) {
  RandomStream rng(35);
  const int v = 10;
  const long trials = 100000;
  for (int trial = 0; trial < 3; ++trial) {
    const LogitVector z = RandomLogits(v, 0.0, 2.0, rng);
    const double tau = 1.0 + 2.0 * rng.NextUnit();
    const ProbVector target = Softmax(z, tau);
    std::vector<long> counts(v, 0);
    for (long i = 0; i < trials; ++i) ++counts[ExpMechSample(z, tau, rng)];
    const double stat = ChiSquareStat(counts, target.values, trials);
    EXPECT_LT(stat, ChiSquareCritical999(v - 1));
  }
}

TEST(L1DistanceTest, IdenticalDistributionsAreZero) {
  const LogitVector z{1.0, 2.0, 0.5};
  EXPECT_NEAR(L1Distance({z}, z, 1), 0.0, 1e-15);
}

TEST(L1DistanceTest, DisjointPointMassesApproachTwo) {
  const LogitVector on_a{100.0, 0.0};
  const LogitVector on_b{0.0, 100.0};
  EXPECT_NEAR(L1Distance({on_a}, on_b, 1), 2.0, 1e-9);
}

TEST(L1DistanceTest, EmptyBatchLeavesPublicMass) {
  const LogitVector z{0.3, -0.7, 1.1};
  EXPECT_NEAR(L1Distance({}, z, 1), 1.0, 1e-12);
  EXPECT_NEAR(L1Distance({}, z, 17), 1.0, 1e-12);
}

TEST(LaplaceTest, MomentsMatch) {
  RandomStream rng(41);
  const long trials = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (long i = 0; i < trials; ++i) {
    const double x = SampleLaplace(1.0, rng);
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / trials;
  const double variance = sum_sq / trials - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(variance, 2.0, 0.1);  // Var = 2 b^2
}

TEST(LaplaceTest, QuartilesAtScaleLogTwo) {
  RandomStream rng(42);
  const long trials = 100000;
  std::vector<double> draws(trials);
  for (long i = 0; i < trials; ++i) draws[i] = SampleLaplace(2.0, rng);
  std::sort(draws.begin(), draws.end());
  const double q25 = draws[trials / 4];
  const double q75 = draws[3 * trials / 4];
  const double expected = 2.0 * std::log(2.0);
  EXPECT_NEAR(q25, -expected, 0.05);
  EXPECT_NEAR(q75, expected, 0.05);
}

TEST(LaplaceTest, DeterministicUnderSeed) {
  RandomStream a(77), b(77);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(SampleLaplace(1.5, a), SampleLaplace(1.5, b));
  }
  EXPECT_THROW(SampleLaplace(0.0, a), InvalidParameterError);
}

TEST(SvtStateTest, DisabledAlwaysPrivateAndDrawFree) {
  RandomStream rng(51);
  SvtState state = SvtState::Init(-kInf, 0.2, rng);
  EXPECT_FALSE(state.enabled());
  EXPECT_EQ(rng.draw_count(), 0u);
  for (double d : {-5.0, 0.0, 1e9}) {
    EXPECT_EQ(state.Check(d, rng), GateDecision::kPrivate);
  }
  state.Reset(rng);
  EXPECT_EQ(rng.draw_count(), 0u);
}

TEST(SvtStateTest, HugeThresholdGoesPublic) {
  RandomStream rng(52);
  SvtState state = SvtState::Init(1e6, 0.2, rng);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_EQ(state.Check(0.0, rng), GateDecision::kPublic);
  }
}

TEST(SvtStateTest, EnabledCheckConsumesExactlyOneDraw) {
  RandomStream rng(53);
  SvtState state = SvtState::Init(0.5, 0.2, rng);
  const std::uint64_t after_init = rng.draw_count();
  EXPECT_EQ(after_init, 1u);
  state.Check(0.3, rng);
  EXPECT_EQ(rng.draw_count(), after_init + 1);
  state.Reset(rng);
  EXPECT_EQ(rng.draw_count(), after_init + 2);
}

TEST(SvtStateTest, PrivateProbabilityMatchesLaplaceCdf) {
  // Fixed noisy threshold, so P(private) has a closed form:
  // P(d + Laplace(2 sigma) >= t) with t - d = 0.5 and scale 0.5.
  RandomStream rng(54);
  const SvtState state(/*threshold=*/2.5, /*noise_scale=*/0.25,
                       /*noisy_threshold=*/2.5);
  const double gap = 2.5 - 2.0;
  const double scale = 2.0 * 0.25;
  const double expected = 0.5 * std::exp(-gap / scale);  // upper tail
  long hits = 0;
  const long trials = 100000;
  for (long i = 0; i < trials; ++i) {
    if (state.Check(2.0, rng) == GateDecision::kPrivate) ++hits;
  }
  EXPECT_NEAR(static_cast<double>(hits) / trials, expected, 0.01);
}

TEST(SvtStateTest, ResetRecentersOnThreshold) {
  RandomStream rng(55);
  SvtState state = SvtState::Init(3.0, 0.1, rng);
  double sum = 0.0;
  const long trials = 100000;
  for (long i = 0; i < trials; ++i) {
    state.Reset(rng);
    sum += state.noisy_threshold();
  }
  EXPECT_NEAR(sum / trials, 3.0, 0.01);
}

TEST(SvtStateTest, ResetReproducibleUnderSeed) {
  RandomStream a(56), b(56);
  SvtState sa = SvtState::Init(1.0, 0.3, a);
  SvtState sb = SvtState::Init(1.0, 0.3, b);
  for (int i = 0; i < 100; ++i) {
    sa.Reset(a);
    sb.Reset(b);
    EXPECT_EQ(sa.noisy_threshold(), sb.noisy_threshold());
  }
}

// Any vector whose range fits in the clipping window is only shifted, so the
// sampling distribution is untouched for every temperature.
TEST(ClipPropertyTest, ShiftOptimalityInsideWindow) {
  RandomStream rng(61);
  for (int trial = 0; trial < 500; ++trial) {
    const double bound = 1.0 + 9.0 * rng.NextUnit();
    LogitVector z = RandomLogits(12, 0.0, 2.0 * bound, rng);
    const double offset = -100.0 + 200.0 * rng.NextUnit();
    for (double& v : z.values) v += offset;
    const LogitVector clipped = ClipRecenter(z, bound);
    for (double tau : {0.7, 1.0, 2.0}) {
      EXPECT_LT(L1Gap(Softmax(clipped, tau), Softmax(z, tau)), 1e-12);
    }
  }
}

// In the (bound, 2*bound] range band, recentering is still distortion-free
// while the fixed interval clamp distorts some shift of the same vector.
TEST(ClipPropertyTest, RecenterBeatsFixedInMidBand) {
  RandomStream rng(62);
  const double bound = 10.0;
  for (int trial = 0; trial < 200; ++trial) {
    const double range = bound + 0.5 + (bound - 0.5) * rng.NextUnit();
    const double over = range - bound;
    LogitVector z;
    z.values = {0.0, range, range - over / 2.0};
    for (int i = 0; i < 5; ++i) z.values.push_back(0.5 * rng.NextUnit());

    const double recenter_err =
        L1Gap(Softmax(ClipRecenter(z, bound), 1.0), Softmax(z, 1.0));
    EXPECT_LT(recenter_err, 1e-12);

    LogitVector shifted = z;
    for (double& v : shifted.values) v += 2.0 * bound - range;
    const double fixed_err =
        L1Gap(Softmax(ClipFixed(shifted, bound), 1.0), Softmax(shifted, 1.0));
    EXPECT_GT(fixed_err, 1e-3);
  }
}

// Neighboring batches differ by one member; the aggregate moves by at most
// bound / batch_size per coordinate and the distance by at most
// 1 / batch_size.
TEST(SensitivityPropertyTest, AggregateAndDistanceBounds) {
  RandomStream rng(63);
  for (int trial = 0; trial < 500; ++trial) {
    const int v = 2 + static_cast<int>(rng.NextUnit() * 14);
    const int members = 1 + static_cast<int>(rng.NextUnit() * 8);
    const int batch_size = 1 + static_cast<int>(rng.NextUnit() * 16);
    const double bound = 0.5 + 10.0 * rng.NextUnit();

    std::vector<LogitVector> batch;
    for (int i = 0; i < members; ++i) {
      batch.push_back(RandomLogits(v, -25.0, 25.0, rng));
    }
    std::vector<LogitVector> neighbor = batch;
    neighbor.push_back(RandomLogits(v, -25.0, 25.0, rng));

    const LogitVector a = Aggregate(batch, batch_size, bound);
    const LogitVector b = Aggregate(neighbor, batch_size, bound);
    double max_gap = 0.0;
    for (int i = 0; i < v; ++i) max_gap = std::max(max_gap, std::abs(a[i] - b[i]));
    EXPECT_LE(max_gap, bound / batch_size + 1e-12);

    const LogitVector public_logits = RandomLogits(v, -25.0, 25.0, rng);
    const double da = L1Distance(batch, public_logits, batch_size);
    const double db = L1Distance(neighbor, public_logits, batch_size);
    EXPECT_LE(std::abs(da - db), 1.0 / batch_size + 1e-12);
  }
}

}  // namespace
}  // namespace dpdecode
