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

#include "dpdecode/accountant.h"

#include <cmath>

#include "gtest/gtest.h"

#include "dpdecode/errors.h"
#include "dpdecode/random.h"

namespace dpdecode {
namespace {

double LogObjective(double alpha, double rho, double eps) {
  const double t = alpha - 1.0;
  return t * (alpha * rho - eps) - std::log(t) +
         alpha * std::log1p(-1.0 / alpha);
}

// Brute-force oracle for the optimized conversion: a coarse dense grid over
// the Renyi order followed by a fine grid around the coarse argmin, all in
// log space. Independent of the golden-section path.
double GridDeltaOracle(double rho, double eps, double* alpha_out = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  double best_alpha = 0.0;
  for (double alpha = 1.0001; alpha < 100.0; alpha += 1e-4) {
    const double log_f = LogObjective(alpha, rho, eps);
    if (log_f < best) {
      best = log_f;
      best_alpha = alpha;
    }
  }
  const double lo = std::max(1.0 + 1e-9, best_alpha - 1e-4);
  for (double alpha = lo; alpha <= best_alpha + 1e-4; alpha += 5e-9) {
    const double log_f = LogObjective(alpha, rho, eps);
    if (log_f < best) {
      best = log_f;
      best_alpha = alpha;
    }
  }
  if (alpha_out != nullptr) *alpha_out = best_alpha;
  return std::exp(best);
}

TEST(PerTokenRhoTest, DirectEvaluation) {
  // (1/2) * (10 / (250 * 2))^2 = 2e-4.
  EXPECT_NEAR(PerTokenRho(10.0, 250, 2.0), 2e-4, 2e-4 * 1e-12);
}

TEST(PerTokenRhoTest, ZeroClipBoundIsFree) {
  EXPECT_DOUBLE_EQ(PerTokenRho(0.0, 250, 2.0), 0.0);
}

TEST(PerTokenRhoTest, DoublingBatchSizeQuarters) {
  const double base = PerTokenRho(7.0, 100, 1.5);
  const double doubled = PerTokenRho(7.0, 200, 1.5);
  EXPECT_NEAR(doubled, base / 4.0, base * 1e-12);
}

TEST(SvtRhoTest, DirectEvaluation) {
  EXPECT_NEAR(SvtRho(250, 0.2), 8e-4, 8e-4 * 1e-12);
  EXPECT_NEAR(SvtRho(1, 2.0), 0.5, 0.5 * 1e-12);
}

TEST(SvtRhoTest, InfiniteNoiseIsFree) {
  EXPECT_LT(SvtRho(250, 1e12), 1e-28);
}

TEST(TotalRhoTest, FlagshipParameters) {
  PrivacyParams params;
  params.clip_bound = 10.0;
  params.expected_batch_size = 250;
  params.temperature = 2.0;
  params.svt_noise_scale = 0.2;
  params.private_token_budget = 1000;
  EXPECT_NEAR(TotalRho(params), 1.0, 1e-12);

  params.private_token_budget = 0;
  EXPECT_DOUBLE_EQ(TotalRho(params), 0.0);

  params.private_token_budget = 1;
  params.svt_noise_scale.reset();  // gate off drops its term
  EXPECT_NEAR(TotalRho(params), 2e-4, 2e-16);
}

TEST(RhoToEpsSimpleTest, KnownValues) {
  EXPECT_NEAR(RhoToEpsSimple(1.0, 1e-6), 8.433844377699677, 1e-3);
  EXPECT_NEAR(RhoToEpsSimple(0.2, 1e-6), 3.52451627253822, 1e-3);
  EXPECT_DOUBLE_EQ(RhoToEpsSimple(0.0, 1e-6), 0.0);
}

TEST(RhoToDeltaOptimalTest, BeatsTheClosedFormBound) {
  const double eps = RhoToEpsSimple(1.0, 1e-6);
  const DeltaResult result = RhoToDeltaOptimal(1.0, eps);
  EXPECT_LE(result.delta, 1e-6);
  EXPECT_GT(result.alpha_star, 1.0);
}

TEST(RhoToDeltaOptimalTest, MatchesDenseGridOracle) {
  const DeltaResult result = RhoToDeltaOptimal(2e-4, 0.0);
  const double oracle = GridDeltaOracle(2e-4, 0.0);
  EXPECT_NEAR(result.delta, oracle, oracle * 2e-12);

  double alpha_oracle = 0.0;
  const DeltaResult flagship =
      RhoToDeltaOptimal(1.0, 8.433844377699677);
  const double oracle2 = GridDeltaOracle(1.0, 8.433844377699677, &alpha_oracle);
  EXPECT_NEAR(flagship.delta, oracle2, oracle2 * 1e-10);
  EXPECT_NEAR(flagship.alpha_star, alpha_oracle, 1e-3);
}

TEST(RhoToDeltaOptimalTest, LogDomainSurvivesLargeParameters) {
  const DeltaResult result = RhoToDeltaOptimal(10.0, 100.0);
  EXPECT_TRUE(std::isfinite(result.delta));
  EXPECT_GE(result.delta, 0.0);
  const double oracle = GridDeltaOracle(10.0, 100.0);
  EXPECT_NEAR(result.delta, oracle, oracle * 1e-10);
}

TEST(RhoToDeltaOptimalTest, ZeroRhoIsPerfect) {
  const DeltaResult result = RhoToDeltaOptimal(0.0, 0.0);
  EXPECT_DOUBLE_EQ(result.delta, 0.0);
}

TEST(ConversionConsistencyTest, OptimizedNeverLooser) {
  RandomStream rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const double rho = std::exp(-6.0 + 8.0 * rng.NextUnit());
    const double delta = std::exp(-18.0 + 15.0 * rng.NextUnit());
    const double eps = RhoToEpsSimple(rho, delta);
    EXPECT_LE(RhoToDeltaOptimal(rho, eps).delta, delta * (1.0 + 1e-9));
  }
}

TEST(RhoToEpsOptimalTest, NeverAboveSimpleAndRoundTrips) {
  RandomStream rng(72);
  for (int trial = 0; trial < 25; ++trial) {
    const double rho = std::exp(-5.0 + 6.0 * rng.NextUnit());
    const double delta = std::exp(-16.0 + 12.0 * rng.NextUnit());
    const EpsResult result = RhoToEpsOptimal(rho, delta);
    EXPECT_LE(result.epsilon, RhoToEpsSimple(rho, delta) + 1e-9);
    EXPECT_LE(RhoToDeltaOptimal(rho, result.epsilon).delta,
              delta * (1.0 + 1e-6));
  }
}

TEST(CalibrateBudgetTest, RoundTripOfFlagshipRho) {
  const int budget =
      CalibrateBudget(8.434, 1e-6, 10.0, 250, 2.0, 0.2);
  EXPECT_EQ(budget, 1000);

  // Feeding back the library's own eps_simple must reproduce the budget.
  const double eps = RhoToEpsSimple(1.0, 1e-6);
  EXPECT_EQ(CalibrateBudget(eps, 1e-6, 10.0, 250, 2.0, 0.2), 1000);
}

TEST(CalibrateBudgetTest, TinyEpsilonYieldsZero) {
  // One token costs eps ~ sqrt(4 * 1e-3 * ln 1e6) + 1e-3 ~ 0.236.
  EXPECT_EQ(CalibrateBudget(0.01, 1e-6, 10.0, 250, 2.0, 0.2), 0);
}

TEST(CalibrateBudgetTest, MonotoneInEpsilon) {
  int previous = -1;
  for (double eps = 0.5; eps < 20.0; eps += 0.5) {
    const int budget = CalibrateBudget(eps, 1e-6, 10.0, 250, 2.0, 0.2);
    EXPECT_GE(budget, previous);
    previous = budget;
  }
}

TEST(CalibrateBudgetTest, RoundTripNeverExceedsTarget) {
  RandomStream rng(73);
  for (int trial = 0; trial < 50; ++trial) {
    const double eps = 0.1 + 10.0 * rng.NextUnit();
    const double delta = std::exp(-16.0 + 10.0 * rng.NextUnit());
    const double clip = 1.0 + 20.0 * rng.NextUnit();
    const int batch = 50 + static_cast<int>(rng.NextUnit() * 500);
    const double tau = 1.0 + 2.0 * rng.NextUnit();
    const int budget = CalibrateBudget(eps, delta, clip, batch, tau, 0.2);
    const double per_step = PerTokenRho(clip, batch, tau) + SvtRho(batch, 0.2);
    EXPECT_LE(RhoToEpsSimple(budget * per_step, delta),
              eps * (1.0 + 1e-9) + 1e-9);
  }
}

TEST(CalibrateBudgetTest, ZeroCostIsRejected) {
  EXPECT_THROW(CalibrateBudget(1.0, 1e-6, 0.0, 250, 2.0, std::nullopt),
               InvalidParameterError);
}

TEST(NormalCdfTest, ReferenceValues) {
  EXPECT_NEAR(NormalCdf(0.0), 0.5, 1e-12);
  // Frozen from the standard normal table at full double precision.
  EXPECT_NEAR(NormalCdf(1.0), 0.841344746068543, 1e-12);
  EXPECT_NEAR(NormalCdf(-1.96), 0.024997895148220435, 1e-12);
  EXPECT_NEAR(NormalCdf(3.0), 0.9986501019683699, 1e-12);
}

TEST(GaussianSigmaClassicTest, FlagshipValue) {
  const double sigma = GaussianSigmaClassic(10.0, 250, 2.0, 1e-6);
  EXPECT_NEAR(sigma, 0.53, 0.01);
  EXPECT_NEAR(sigma, 0.5298802526850473, 1e-12);
}

TEST(GaussianSigmaClassicTest, DegenerateDeltaAndScaling) {
  EXPECT_DOUBLE_EQ(GaussianSigmaClassic(10.0, 250, 2.0, 1.25), 0.0);
  const double at_c = GaussianSigmaClassic(10.0, 250, 2.0, 1e-6);
  const double at_half_c = GaussianSigmaClassic(5.0, 250, 2.0, 1e-6);
  EXPECT_NEAR(at_half_c, 2.0 * at_c, 1e-12);
}

TEST(GaussianSigmaBalleWangTest, FlagshipValue) {
  // eps = 2c/(s tau) = 0.04, sensitivity 1/250.
  const double sigma = GaussianSigmaBalleWang(0.04, 1e-6, 1.0 / 250.0);
  EXPECT_NEAR(sigma, 0.34, 0.01);
  EXPECT_NEAR(sigma, 0.3409393958048124, 1e-5);
}

TEST(GaussianSigmaBalleWangTest, MinimalityAtTolerance) {
  const double eps = 0.04, delta = 1e-6, sensitivity = 1.0 / 250.0;
  const double sigma = GaussianSigmaBalleWang(eps, delta, sensitivity);
  const auto delta_for = [&](double s) {
    const double a = sensitivity / (2.0 * s);
    const double b = eps * s / sensitivity;
    return NormalCdf(a - b) - std::exp(eps) * NormalCdf(-a - b);
  };
  EXPECT_LE(delta_for(sigma), delta);
  EXPECT_GT(delta_for(sigma * (1.0 - 1e-3)), delta);
}

TEST(GaussianSigmaZcdpTest, RatioOfTemperatureToClip) {
  EXPECT_DOUBLE_EQ(GaussianSigmaZcdp(10.0, 250, 2.0), 0.2);
  EXPECT_DOUBLE_EQ(GaussianSigmaZcdp(3.0, 250, 3.0), 1.0);
  EXPECT_DOUBLE_EQ(GaussianSigmaZcdp(10.0, 7, 2.0),
                   GaussianSigmaZcdp(10.0, 7000, 2.0));
}

TEST(GaussianSigmaTest, ImprovedAnalysisDominates) {
  RandomStream rng(74);
  for (int trial = 0; trial < 30; ++trial) {
    const double clip = 1.0 + 20.0 * rng.NextUnit();
    const int batch = 10 + static_cast<int>(rng.NextUnit() * 990);
    const double tau = 0.5 + 3.0 * rng.NextUnit();
    const double delta = std::exp(-16.0 + 10.0 * rng.NextUnit());
    const double eps = 2.0 * clip / (batch * tau);
    const double classic = GaussianSigmaClassic(clip, batch, tau, delta);
    const double improved = GaussianSigmaBalleWang(eps, delta, 1.0 / batch);
    EXPECT_LE(improved, classic * (1.0 + 1e-6));
  }
}

TEST(MakeReportTest, FieldsAreConsistent) {
  PrivacyParams params;
  params.clip_bound = 10.0;
  params.expected_batch_size = 250;
  params.temperature = 2.0;
  params.svt_noise_scale = 0.2;
  params.private_token_budget = 1000;
  const PrivacyReport report = MakeReport(params, 1e-6);
  EXPECT_NEAR(report.rho, 1.0, 1e-12);
  EXPECT_NEAR(report.rho,
              report.params.private_token_budget *
                  (report.per_token_rho + report.svt_rho),
              1e-12);
  EXPECT_LE(report.eps_optimal, report.eps_simple + 1e-9);
  EXPECT_GT(report.alpha_star, 1.0);
}

// Parallel composition: the certificate is per configuration, so splitting
// the same workload across more batches changes nothing.
TEST(MakeReportTest, InvariantToBatchCount) {
  PrivacyParams params;
  params.clip_bound = 10.0;
  params.expected_batch_size = 250;
  params.temperature = 2.0;
  params.svt_noise_scale = 0.2;
  params.private_token_budget = 100;
  const PrivacyReport one = MakeReport(params, 1e-6);
  const PrivacyReport again = MakeReport(params, 1e-6);
  EXPECT_DOUBLE_EQ(one.rho, again.rho);
  EXPECT_DOUBLE_EQ(one.eps_simple, again.eps_simple);
  EXPECT_DOUBLE_EQ(one.eps_optimal, again.eps_optimal);
}

}  // namespace
}  // namespace dpdecode
