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

#ifndef DPDECODE_ENGINE_H_
#define DPDECODE_ENGINE_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dpdecode/accountant.h"
#include "dpdecode/batching.h"
#include "dpdecode/core.h"
#include "dpdecode/mechanisms.h"

namespace dpdecode {

struct GenerationConfig {
  PrivacyParams privacy;
  double public_temperature = 1.5;
  // Gate threshold; -infinity disables the public-token gate entirely.
  double svt_threshold = -std::numeric_limits<double>::infinity();
  int max_tokens_per_example = 256;
  TokenSequence public_prompt;
  // When set, both sampling branches are restricted to the top-k token ids
  // of the public logits at each step. The mask is a function of public data
  // only, so it leaves the guarantee untouched.
  std::optional<int> support_top_k;
  std::uint64_t seed = 0;
  // Target delta reported by the accountant.
  double delta = 1e-6;
  // Safety cap for configurations that can generate forever without spending
  // budget (an always-below-threshold gate). Unset means uncapped.
  std::optional<int> max_examples_per_batch;

  // Checks the config against the vocabulary when the size is known.
  void Validate(std::optional<int> vocab_size = std::nullopt) const;
};

enum class TokenSource {
  kPrivate,    // sampled from the aggregated clipped logits
  kPublic,     // sampled from the public logits, gate said close enough
  kForcedEos,  // appended deterministically at the length cap
};

struct TokenRecord {
  TokenSource source = TokenSource::kPrivate;
  double distance = 0.0;          // the gate query value for this step
  bool gate_noise_used = false;   // whether the decision consumed noise
  int private_count_after = 0;    // batch private counter after this step
};

struct GenerationRecord {
  std::vector<TokenRecord> tokens;
  int private_tokens = 0;
  int public_tokens = 0;
  bool forced_eos = false;
};

struct SyntheticExample {
  TokenSequence token_ids;  // ends with <eos> (possibly forced)
  std::string text;         // rendered form, empty if no renderer was given
  int batch_index = 0;
  GenerationRecord record;
};

// Renders token ids to text for the output file.
using TextRenderer = std::function<std::string(const TokenSequence&)>;

// Makes a provider for one decoding worker. Called once per worker, so
// remote backends can open one connection each; shared immutable models can
// return the same instance every time.
using ProviderFactory = std::function<std::shared_ptr<LogitsProvider>()>;

struct BatchFailure {
  int batch_index = 0;
  std::string message;
};

struct GenerateResult {
  std::vector<SyntheticExample> examples;
  PrivacyReport report;  // a function of the config alone, never of the data
  std::vector<BatchFailure> failures;
};

// Decodes one synthetic example against a batch of prompt contexts.
//
// Per step: score all prompt continuations and the public continuation,
// compute the distribution distance, and let the gate pick the branch. A
// private step spends one unit of budget and redraws the gate threshold; at
// the length cap an <eos> is appended deterministically. Returns nullopt if
// a private step is needed with no budget left; the partial example is
// discarded but its earlier private spends stand.
std::optional<SyntheticExample> GenerateExample(
    const std::vector<TokenSequence>& batch_prompts, LogitsProvider& provider,
    const GenerationConfig& config, SvtState& svt, int& budget_remaining,
    RandomStream& rng);

// Full run: hash-partitions the dataset, decodes every batch (concurrently
// when num_workers > 1), and returns the examples plus the certified report.
// Per-batch randomness derives from (seed, batch index), so output bytes do
// not depend on the worker count or scheduling. A provider failure stops its
// own batch only.
GenerateResult GenerateDataset(const std::vector<PromptRecord>& dataset,
                               const ProviderFactory& make_provider,
                               const GenerationConfig& config,
                               const BatchingOptions& batching,
                               int num_workers = 1,
                               const TextRenderer& renderer = nullptr);

}  // namespace dpdecode

#endif  // DPDECODE_ENGINE_H_
