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

#ifndef DPDECODE_ACCOUNTANT_H_
#define DPDECODE_ACCOUNTANT_H_

#include <optional>

namespace dpdecode {

// The knobs that determine the privacy guarantee of a generation run. The
// guarantee is a function of this struct alone; realized batch sizes or token
// counts never enter it.
struct PrivacyParams {
  double clip_bound = 10.0;      // half-width of the logit clipping interval
  int expected_batch_size = 250; // aggregation divisor, configured not counted
  double temperature = 2.0;      // private sampling temperature
  std::optional<double> svt_noise_scale;  // absent: public-token gate disabled
  int private_token_budget = 0;  // max private releases per batch

  void Validate() const;  // throws InvalidParameterError
};

// Certified guarantee for a run, plus the intermediate quantities a reviewer
// needs to check the arithmetic.
struct PrivacyReport {
  double rho = 0.0;            // total zCDP budget
  double per_token_rho = 0.0;  // exponential-mechanism share per private token
  double svt_rho = 0.0;        // gate share per private token (0 if disabled)
  double delta = 0.0;          // target delta for both conversions below
  double eps_simple = 0.0;     // closed-form conversion
  double eps_optimal = 0.0;    // optimized conversion, never larger
  double alpha_star = 0.0;     // minimizing Renyi order behind eps_optimal
  PrivacyParams params;
};

// zCDP cost of one private token release: (1/2) * (c / (s * tau))^2.
double PerTokenRho(double clip_bound, int expected_batch_size,
                   double temperature);

// zCDP cost of the threshold gate charged per private token: 2 / (s*sigma)^2.
double SvtRho(int expected_batch_size, double noise_scale);

// r * (per-token + gate) with the gate term dropped when the gate is off.
// Disjoint batches compose in parallel, so this is the whole-run budget no
// matter how many batches the dataset splits into.
double TotalRho(const PrivacyParams& params);

// epsilon = rho + sqrt(4 * rho * ln(1/delta)), valid for delta in (0, 1].
double RhoToEpsSimple(double rho, double delta);

struct DeltaResult {
  double delta = 0.0;
  double alpha_star = 0.0;  // 0 when the minimization is vacuous (rho == 0)
};

// delta(eps) = inf over alpha > 1 of
//   exp((alpha-1)(alpha*rho - eps)) / (alpha-1) * (1 - 1/alpha)^alpha,
// evaluated in log space and minimized by golden-section search after
// geometric bracketing of alpha in (1, 1e6]. rho == 0 maps to delta == 0.
DeltaResult RhoToDeltaOptimal(double rho, double epsilon);

struct EpsResult {
  double epsilon = 0.0;
  double alpha_star = 0.0;
};

// Smallest epsilon whose optimized delta is at most `delta`. Never exceeds
// RhoToEpsSimple(rho, delta).
EpsResult RhoToEpsOptimal(double rho, double delta);

// Largest private-token budget r whose total budget converts (closed form)
// to at most `epsilon` at `delta`. Throws InvalidParameterError when the
// per-token cost is zero (the budget would be unbounded).
int CalibrateBudget(double epsilon, double delta, double clip_bound,
                    int expected_batch_size, double temperature,
                    std::optional<double> svt_noise_scale);

// Standard normal CDF, accurate to ~1e-15 absolute (erfc based).
double NormalCdf(double x);

// Gaussian noise levels that would match this mechanism's guarantee if the
// whole averaged probability vector were noised instead.

// Equates the classic Gaussian (eps, delta) guarantee with the
// eps = 2c/(s*tau) pure guarantee: sigma = tau * sqrt(ln(1.25/delta)) /
// (sqrt(2) * c).
double GaussianSigmaClassic(double clip_bound, int expected_batch_size,
                            double temperature, double delta);

// Smallest sigma (within 1e-6 relative) satisfying
//   Phi(D/(2 sigma) - eps sigma / D) - e^eps Phi(-D/(2 sigma) - eps sigma/D)
//     <= delta
// found by bisection inside a doubling bracket. Throws NumericError if no
// bracket is found after 200 doublings.
double GaussianSigmaBalleWang(double epsilon, double delta,
                              double l2_sensitivity);

// Equates the two mechanisms' zCDP budgets: sigma = tau / c (the batch size
// cancels).
double GaussianSigmaZcdp(double clip_bound, int expected_batch_size,
                         double temperature);

// Assembles the full report for a parameter set at the target delta.
PrivacyReport MakeReport(const PrivacyParams& params, double delta);

}  // namespace dpdecode

#endif  // DPDECODE_ACCOUNTANT_H_
