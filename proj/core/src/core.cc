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

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "dpdecode/errors.h"

namespace dpdecode {

Vocabulary::Vocabulary(std::vector<std::string> tokens, TokenId eos_id)
    : tokens_(std::move(tokens)), eos_id_(eos_id) {
  if (tokens_.size() < 2) {
    throw InvalidParameterError("vocabulary needs at least two tokens");
  }
  if (eos_id_ < 0 || eos_id_ >= static_cast<TokenId>(tokens_.size())) {
    throw InvalidParameterError("eos_id out of range");
  }
  std::unordered_set<std::string> seen;
  for (const std::string& t : tokens_) {
    if (!seen.insert(t).second) {
      throw InvalidParameterError("duplicate token string: " + t);
    }
  }
}

ProbVector Softmax(const LogitVector& logits, double temperature) {
  if (!(temperature > 0)) {
    throw InvalidParameterError("softmax temperature must be positive");
  }
  ProbVector out;
  out.values.resize(logits.values.size());
  if (logits.values.empty()) return out;

  const double max_logit =
      *std::max_element(logits.values.begin(), logits.values.end());
  double sum = 0.0;
  for (size_t i = 0; i < logits.values.size(); ++i) {
    const double p = std::exp((logits.values[i] - max_logit) / temperature);
    out.values[i] = p;
    sum += p;
  }
  for (double& p : out.values) p /= sum;
  return out;
}

TokenId SampleCategorical(const ProbVector& probs, RandomStream& rng) {
  for (double p : probs.values) {
    if (std::isnan(p)) {
      throw InvalidParameterError("invalid distribution: NaN probability");
    }
  }
  const double u = rng.NextUnit();
  double cumulative = 0.0;
  TokenId last_positive = -1;
  for (size_t i = 0; i < probs.values.size(); ++i) {
    if (probs.values[i] > 0) last_positive = static_cast<TokenId>(i);
    cumulative += probs.values[i];
    if (u < cumulative) return static_cast<TokenId>(i);
  }
  if (last_positive < 0) {
    throw InvalidParameterError("invalid distribution: no positive mass");
  }
  // Rounding left the cumulative sum a hair below u; the draw belongs to the
  // last slot with mass.
  return last_positive;
}

std::vector<LogitVector> LogitsProvider::LogitsMany(
    const std::vector<TokenSequence>& contexts) {
  std::vector<LogitVector> out;
  out.reserve(contexts.size());
  for (const TokenSequence& context : contexts) {
    out.push_back(Logits(context));
  }
  return out;
}

TokenSequence Concat(const TokenSequence& prefix, const TokenSequence& suffix) {
  TokenSequence out;
  out.reserve(prefix.size() + suffix.size());
  out.insert(out.end(), prefix.begin(), prefix.end());
  out.insert(out.end(), suffix.begin(), suffix.end());
  return out;
}

}  // namespace dpdecode
