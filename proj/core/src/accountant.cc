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
#include <limits>

#include "dpdecode/errors.h"

namespace dpdecode {

namespace {

constexpr double kAlphaCap = 1e6;         // search ceiling for the Renyi order
constexpr double kAlphaRelTol = 1e-10;    // golden-section stop width
constexpr double kSigmaRelTol = 1e-6;     // bisection stop width
constexpr double kInvGolden = 0.6180339887498949;

// ln of the conversion objective at alpha = 1 + t, t > 0:
//   (alpha-1)(alpha*rho - eps) - ln(alpha-1) + alpha * ln(1 - 1/alpha)
double LogDeltaObjective(double t, double rho, double eps) {
  const double alpha = 1.0 + t;
  return t * (alpha * rho - eps) - std::log(t) +
         alpha * std::log1p(-1.0 / alpha);
}

void CheckDelta(double delta) {
  if (!(delta > 0.0) || delta > 1.0) {
    throw InvalidParameterError("delta must lie in (0, 1]");
  }
}

}  // namespace

void PrivacyParams::Validate() const {
  if (!(clip_bound > 0)) {
    throw InvalidParameterError("clip bound must be positive");
  }
  if (expected_batch_size < 1) {
    throw InvalidParameterError("expected batch size must be >= 1");
  }
  if (!(temperature > 0)) {
    throw InvalidParameterError("temperature must be positive");
  }
  if (private_token_budget < 0) {
    throw InvalidParameterError("private token budget must be >= 0");
  }
  if (svt_noise_scale.has_value() && !(*svt_noise_scale > 0)) {
    throw InvalidParameterError("svt noise scale must be positive");
  }
}

double PerTokenRho(double clip_bound, int expected_batch_size,
                   double temperature) {
  if (clip_bound < 0) {
    throw InvalidParameterError("clip bound must be non-negative");
  }
  if (expected_batch_size < 1 || !(temperature > 0)) {
    throw InvalidParameterError("invalid accounting parameters");
  }
  const double ratio =
      clip_bound / (static_cast<double>(expected_batch_size) * temperature);
  return 0.5 * ratio * ratio;
}

double SvtRho(int expected_batch_size, double noise_scale) {
  if (expected_batch_size < 1 || !(noise_scale > 0)) {
    throw InvalidParameterError("invalid accounting parameters");
  }
  const double denom = static_cast<double>(expected_batch_size) * noise_scale;
  return 2.0 / (denom * denom);
}

double TotalRho(const PrivacyParams& params) {
  params.Validate();
  double per_step = PerTokenRho(params.clip_bound, params.expected_batch_size,
                                params.temperature);
  if (params.svt_noise_scale.has_value()) {
    per_step += SvtRho(params.expected_batch_size, *params.svt_noise_scale);
  }
  return static_cast<double>(params.private_token_budget) * per_step;
}

double RhoToEpsSimple(double rho, double delta) {
  if (rho < 0) throw InvalidParameterError("rho must be non-negative");
  CheckDelta(delta);
  return rho + std::sqrt(4.0 * rho * std::log(1.0 / delta));
}

DeltaResult RhoToDeltaOptimal(double rho, double epsilon) {
  if (rho < 0) throw InvalidParameterError("rho must be non-negative");
  if (epsilon < 0) throw InvalidParameterError("epsilon must be non-negative");
  if (rho == 0.0) {
    return DeltaResult{0.0, 0.0};
  }

  // The objective diverges at alpha -> 1+ and eventually grows like
  // exp(alpha^2 rho), so a geometric scan over alpha - 1 brackets the
  // interior minimum.
  double best_t = 0.0;
  double best_value = std::numeric_limits<double>::infinity();
  double prev_t = 0.0;
  double scan_lo = 0.0, scan_hi = 0.0;
  for (double t = 1e-12; t <= kAlphaCap; t *= 2.0) {
    const double value = LogDeltaObjective(t, rho, epsilon);
    if (value < best_value) {
      best_value = value;
      best_t = t;
      scan_lo = prev_t > 0 ? prev_t : t / 2.0;
      scan_hi = std::min(t * 2.0, kAlphaCap);
    }
    prev_t = t;
  }

  // Golden-section search on the bracketed interval.
  double lo = scan_lo, hi = scan_hi;
  double mid1 = hi - kInvGolden * (hi - lo);
  double mid2 = lo + kInvGolden * (hi - lo);
  double f1 = LogDeltaObjective(mid1, rho, epsilon);
  double f2 = LogDeltaObjective(mid2, rho, epsilon);
  while (hi - lo > kAlphaRelTol * (1.0 + lo)) {
    if (f1 < f2) {
      hi = mid2;
      mid2 = mid1;
      f2 = f1;
      mid1 = hi - kInvGolden * (hi - lo);
      f1 = LogDeltaObjective(mid1, rho, epsilon);
    } else {
      lo = mid1;
      mid1 = mid2;
      f1 = f2;
      mid2 = lo + kInvGolden * (hi - lo);
      f2 = LogDeltaObjective(mid2, rho, epsilon);
    }
  }
  const double t_star = f1 < f2 ? mid1 : mid2;
  const double log_delta = std::min(f1, f2);
  return DeltaResult{std::exp(log_delta), 1.0 + t_star};
}

EpsResult RhoToEpsOptimal(double rho, double delta) {
  if (rho < 0) throw InvalidParameterError("rho must be non-negative");
  CheckDelta(delta);
  if (rho == 0.0) return EpsResult{0.0, 0.0};

  const double eps_cap = RhoToEpsSimple(rho, delta);
  DeltaResult at_zero = RhoToDeltaOptimal(rho, 0.0);
  if (at_zero.delta <= delta) {
    return EpsResult{0.0, at_zero.alpha_star};
  }
  double lo = 0.0, hi = eps_cap;
  DeltaResult at_hi = RhoToDeltaOptimal(rho, hi);
  if (at_hi.delta > delta) {
    // The optimized conversion can never be looser than the closed form;
    // reaching this means a numeric edge case, so fall back to the cap.
    return EpsResult{eps_cap, at_hi.alpha_star};
  }
  while (hi - lo > 1e-12 * (1.0 + hi)) {
    const double mid = 0.5 * (lo + hi);
    if (RhoToDeltaOptimal(rho, mid).delta > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return EpsResult{hi, RhoToDeltaOptimal(rho, hi).alpha_star};
}

int CalibrateBudget(double epsilon, double delta, double clip_bound,
                    int expected_batch_size, double temperature,
                    std::optional<double> svt_noise_scale) {
  if (!(epsilon > 0)) {
    throw InvalidParameterError("epsilon must be positive");
  }
  if (!(delta > 0) || !(delta < 1)) {
    throw InvalidParameterError("delta must lie in (0, 1)");
  }
  double per_step = PerTokenRho(clip_bound, expected_batch_size, temperature);
  if (svt_noise_scale.has_value()) {
    per_step += SvtRho(expected_batch_size, *svt_noise_scale);
  }
  if (!(per_step > 0)) {
    throw InvalidParameterError(
        "per-token privacy cost is zero; the budget is unbounded");
  }
  // Invert eps = rho + sqrt(4 rho L): sqrt(rho*) = sqrt(eps + L) - sqrt(L).
  const double log_inv_delta = std::log(1.0 / delta);
  const double root =
      std::sqrt(epsilon + log_inv_delta) - std::sqrt(log_inv_delta);
  const double rho_star = root * root;

  long long budget = static_cast<long long>(
      std::floor(rho_star / per_step + 1e-9));
  if (budget < 0) budget = 0;
  // The floor plus slack can land one step too high at an exact boundary;
  // walk down until the round trip honors the target.
  while (budget > 0 &&
         RhoToEpsSimple(static_cast<double>(budget) * per_step, delta) >
             epsilon * (1.0 + 1e-12) + 1e-12) {
    --budget;
  }
  if (budget > std::numeric_limits<int>::max()) {
    return std::numeric_limits<int>::max();
  }
  return static_cast<int>(budget);
}

double NormalCdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double GaussianSigmaClassic(double clip_bound, int expected_batch_size,
                            double temperature, double delta) {
  if (!(clip_bound > 0) || expected_batch_size < 1 || !(temperature > 0)) {
    throw InvalidParameterError("invalid parameters");
  }
  if (!(delta > 0) || delta > 1.25) {
    throw InvalidParameterError("delta must lie in (0, 1.25]");
  }
  // The batch size cancels when the two pure epsilons are equated.
  (void)expected_batch_size;
  return temperature * std::sqrt(std::log(1.25 / delta)) /
         (std::sqrt(2.0) * clip_bound);
}

namespace {

// Tightest delta the Gaussian mechanism achieves at (epsilon, sigma).
double GaussianDeltaFor(double epsilon, double l2_sensitivity, double sigma) {
  const double a = l2_sensitivity / (2.0 * sigma);
  const double b = epsilon * sigma / l2_sensitivity;
  if (std::isnan(b)) return 0.0;
  return NormalCdf(a - b) - std::exp(epsilon) * NormalCdf(-a - b);
}

}  // namespace

double GaussianSigmaBalleWang(double epsilon, double delta,
                              double l2_sensitivity) {
  if (!(epsilon > 0)) throw InvalidParameterError("epsilon must be positive");
  if (!(delta > 0) || !(delta < 1)) {
    throw InvalidParameterError("delta must lie in (0, 1)");
  }
  if (!(l2_sensitivity > 0)) {
    throw InvalidParameterError("sensitivity must be positive");
  }
  double lo = std::numeric_limits<double>::min();
  double hi = l2_sensitivity;
  int doublings = 0;
  while (GaussianDeltaFor(epsilon, l2_sensitivity, hi) > delta) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 200) {
      throw NumericError("no sigma bracket found after 200 doublings");
    }
  }
  while (hi - lo > kSigmaRelTol * lo) {
    const double mid = 0.5 * (lo + hi);
    if (GaussianDeltaFor(epsilon, l2_sensitivity, mid) > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

double GaussianSigmaZcdp(double clip_bound, int expected_batch_size,
                         double temperature) {
  if (!(clip_bound > 0) || expected_batch_size < 1 || !(temperature > 0)) {
    throw InvalidParameterError("invalid parameters");
  }
  (void)expected_batch_size;  // cancels on both sides
  return temperature / clip_bound;
}

PrivacyReport MakeReport(const PrivacyParams& params, double delta) {
  params.Validate();
  CheckDelta(delta);
  PrivacyReport report;
  report.params = params;
  report.delta = delta;
  report.per_token_rho = PerTokenRho(
      params.clip_bound, params.expected_batch_size, params.temperature);
  report.svt_rho =
      params.svt_noise_scale.has_value()
          ? SvtRho(params.expected_batch_size, *params.svt_noise_scale)
          : 0.0;
  report.rho = TotalRho(params);
  report.eps_simple = RhoToEpsSimple(report.rho, delta);
  const EpsResult optimal = RhoToEpsOptimal(report.rho, delta);
  report.eps_optimal = optimal.epsilon;
  report.alpha_star = optimal.alpha_star;
  return report;
}

}  // namespace dpdecode
