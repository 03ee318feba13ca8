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

#include "dpdecode/errors.h"

namespace dpdecode {

namespace {

void CheckBound(double bound) {
  if (!(bound > 0)) {
    throw InvalidParameterError("clip bound must be positive");
  }
}

}  // namespace

LogitVector ClipRecenter(const LogitVector& z, double bound) {
  CheckBound(bound);
  LogitVector out;
  out.values.resize(z.values.size());
  if (z.values.empty()) return out;
  const double max_logit =
      *std::max_element(z.values.begin(), z.values.end());
  for (size_t i = 0; i < z.values.size(); ++i) {
    out.values[i] = std::max(-bound, z.values[i] - max_logit + bound);
  }
  return out;
}

LogitVector ClipFixed(const LogitVector& z, double bound) {
  CheckBound(bound);
  LogitVector out;
  out.values.resize(z.values.size());
  for (size_t i = 0; i < z.values.size(); ++i) {
    out.values[i] = std::min(bound, std::max(-bound, z.values[i]));
  }
  return out;
}

LogitVector Aggregate(const std::vector<LogitVector>& batch_logits,
                      int expected_batch_size, double clip_bound) {
  CheckBound(clip_bound);
  if (expected_batch_size < 1) {
    throw InvalidParameterError("expected batch size must be >= 1");
  }
  size_t width = 0;
  for (const LogitVector& z : batch_logits) {
    if (width == 0) width = z.values.size();
    if (z.values.size() != width) {
      throw InvalidParameterError("logit vectors differ in length");
    }
  }
  LogitVector sum;
  sum.values.assign(width, 0.0);
  for (const LogitVector& z : batch_logits) {
    const LogitVector clipped = ClipRecenter(z, clip_bound);
    for (size_t i = 0; i < width; ++i) sum.values[i] += clipped.values[i];
  }
  const double inv = 1.0 / static_cast<double>(expected_batch_size);
  for (double& v : sum.values) v *= inv;
  return sum;
}

TokenId ExpMechSample(const LogitVector& scores, double temperature,
                      RandomStream& rng,
                      std::optional<std::span<const TokenId>> support) {
  if (!(temperature > 0)) {
    throw InvalidParameterError("sampling temperature must be positive");
  }
  if (!support.has_value()) {
    return SampleCategorical(Softmax(scores, temperature), rng);
  }
  if (support->empty()) {
    throw InvalidParameterError("support mask must be non-empty");
  }
  // Softmax over the masked slots only, then one inverse-CDF draw over them.
  double max_logit = -std::numeric_limits<double>::infinity();
  for (TokenId id : *support) {
    max_logit = std::max(max_logit, scores.values.at(id));
  }
  std::vector<double> weights;
  weights.reserve(support->size());
  double sum = 0.0;
  for (TokenId id : *support) {
    const double w =
        std::exp((scores.values.at(id) - max_logit) / temperature);
    weights.push_back(w);
    sum += w;
  }
  const double u = rng.NextUnit() * sum;
  double cumulative = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    cumulative += weights[i];
    if (u < cumulative) return (*support)[i];
  }
  return (*support)[support->size() - 1];
}

double L1Distance(const std::vector<LogitVector>& batch_logits,
                  const LogitVector& public_logits, int expected_batch_size) {
  if (expected_batch_size < 1) {
    throw InvalidParameterError("expected batch size must be >= 1");
  }
  const ProbVector public_probs = Softmax(public_logits, 1.0);
  std::vector<double> mean(public_probs.values.size(), 0.0);
  for (const LogitVector& z : batch_logits) {
    if (z.values.size() != mean.size()) {
      throw InvalidParameterError("logit vectors differ in length");
    }
    const ProbVector p = Softmax(z, 1.0);
    for (size_t i = 0; i < mean.size(); ++i) mean[i] += p.values[i];
  }
  const double inv = 1.0 / static_cast<double>(expected_batch_size);
  double distance = 0.0;
  for (size_t i = 0; i < mean.size(); ++i) {
    distance += std::abs(mean[i] * inv - public_probs.values[i]);
  }
  return distance;
}

double SampleLaplace(double scale, RandomStream& rng) {
  if (!(scale > 0)) {
    throw InvalidParameterError("laplace scale must be positive");
  }
  const double u = rng.NextUnit();  // in (0, 1), so both logs stay finite
  if (u < 0.5) {
    return scale * std::log(2.0 * u);
  }
  return -scale * std::log(2.0 * (1.0 - u));
}

SvtState SvtState::Disabled() {
  SvtState state;
  state.threshold_ = -std::numeric_limits<double>::infinity();
  state.noisy_threshold_ = -std::numeric_limits<double>::infinity();
  state.enabled_ = false;
  return state;
}

SvtState SvtState::Init(double threshold, double noise_scale,
                        RandomStream& rng) {
  if (std::isinf(threshold) && threshold < 0) {
    return Disabled();
  }
  if (!(noise_scale > 0)) {
    throw InvalidParameterError("svt noise scale must be positive");
  }
  SvtState state;
  state.threshold_ = threshold;
  state.noise_scale_ = noise_scale;
  state.noisy_threshold_ = threshold + SampleLaplace(noise_scale, rng);
  state.enabled_ = true;
  return state;
}

SvtState::SvtState(double threshold, double noise_scale,
                   double noisy_threshold)
    : threshold_(threshold),
      noise_scale_(noise_scale),
      noisy_threshold_(noisy_threshold),
      enabled_(true) {}

GateDecision SvtState::Check(double distance, RandomStream& rng) const {
  if (!enabled_) {
    return GateDecision::kPrivate;
  }
  const double noised = distance + SampleLaplace(2.0 * noise_scale_, rng);
  return noised >= noisy_threshold_ ? GateDecision::kPrivate
                                    : GateDecision::kPublic;
}

void SvtState::Reset(RandomStream& rng) {
  if (!enabled_) return;
  noisy_threshold_ = threshold_ + SampleLaplace(noise_scale_, rng);
}

}  // namespace dpdecode
