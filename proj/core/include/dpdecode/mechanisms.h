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

#ifndef DPDECODE_MECHANISMS_H_
#define DPDECODE_MECHANISMS_H_

#include <optional>
#include <span>
#include <vector>

#include "dpdecode/core.h"
#include "dpdecode/random.h"

namespace dpdecode {

enum class ClipMode {
  kRecenter,       // shift to put the max at +bound, then floor at -bound
  kFixedInterval,  // plain componentwise clamp to [-bound, +bound]
};

struct ClipConfig {
  double bound = 10.0;  // > 0
  ClipMode mode = ClipMode::kRecenter;
};

// out[i] = max(-bound, z[i] - max_j z[j] + bound). Every entry lands in
// [-bound, bound] and the maximum entry equals the bound exactly, so any
// vector whose range fits in 2*bound is merely shifted (softmax unchanged).
LogitVector ClipRecenter(const LogitVector& z, double bound);

// out[i] = min(bound, max(-bound, z[i])).
LogitVector ClipFixed(const LogitVector& z, double bound);

// (1/expected_batch_size) * sum of recenter-clipped members. The divisor is
// the configured batch size, never the realized count; an empty batch yields
// the zero vector.
LogitVector Aggregate(const std::vector<LogitVector>& batch_logits,
                      int expected_batch_size, double clip_bound);

// Samples from softmax(scores / temperature), restricted and renormalized to
// `support` when given (the full vocabulary otherwise). Consumes exactly one
// uniform draw. Throws InvalidParameterError on an empty support set or a
// non-positive temperature.
TokenId ExpMechSample(const LogitVector& scores, double temperature,
                      RandomStream& rng,
                      std::optional<std::span<const TokenId>> support =
                          std::nullopt);

// L1 distance between the scaled batch-mean distribution and the public
// distribution: || (1/s) * sum softmax(z, 1) - softmax(public, 1) ||_1.
// Both sides use temperature 1 regardless of any sampling temperature.
double L1Distance(const std::vector<LogitVector>& batch_logits,
                  const LogitVector& public_logits, int expected_batch_size);

// Mean-zero Laplace draw with scale b (density proportional to exp(-|x|/b)),
// from a single uniform via the inverse CDF.
double SampleLaplace(double scale, RandomStream& rng);

enum class GateDecision { kPrivate, kPublic };

// AboveThreshold gate with reset-after-hit discipline. Confined to a single
// decoding worker; never shared across threads.
class SvtState {
 public:
  // Disabled gate: every check answers kPrivate without touching the rng.
  static SvtState Disabled();

  // Draws the initial noisy threshold. A threshold of -infinity produces a
  // disabled state and consumes no randomness.
  static SvtState Init(double threshold, double noise_scale,
                       RandomStream& rng);

  // Replay/bench constructor with an explicitly chosen noisy threshold.
  SvtState(double threshold, double noise_scale, double noisy_threshold);

  // Adds Laplace(2 * noise_scale) to `distance` and answers kPrivate iff the
  // noised value reaches the noisy threshold. One uniform draw when enabled,
  // zero when disabled.
  GateDecision Check(double distance, RandomStream& rng) const;

  // Redraws the noisy threshold; called once after every kPrivate decision.
  // No-op on a disabled state.
  void Reset(RandomStream& rng);

  bool enabled() const { return enabled_; }
  double threshold() const { return threshold_; }
  double noise_scale() const { return noise_scale_; }
  double noisy_threshold() const { return noisy_threshold_; }

 private:
  SvtState() = default;

  double threshold_ = 0.0;
  double noise_scale_ = 0.0;
  double noisy_threshold_ = 0.0;
  bool enabled_ = false;
};

}  // namespace dpdecode

#endif  // DPDECODE_MECHANISMS_H_
