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

#include "dpdecode/engine.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "dpdecode/errors.h"

namespace dpdecode {

void GenerationConfig::Validate(std::optional<int> vocab_size) const {
  privacy.Validate();
  if (!(public_temperature > 0)) {
    throw InvalidParameterError("public temperature must be positive");
  }
  if (max_tokens_per_example < 1) {
    throw InvalidParameterError("max_tokens_per_example must be >= 1");
  }
  if (support_top_k.has_value() &&
      (*support_top_k < 1 ||
       (vocab_size.has_value() && *support_top_k > *vocab_size))) {
    throw InvalidParameterError("support_top_k must lie in [1, vocab size]");
  }
  if (max_examples_per_batch.has_value() && *max_examples_per_batch < 1) {
    throw InvalidParameterError("max_examples_per_batch must be >= 1");
  }
  const bool gate_enabled =
      !(std::isinf(svt_threshold) && svt_threshold < 0);
  if (gate_enabled && !privacy.svt_noise_scale.has_value()) {
    throw InvalidParameterError(
        "an enabled gate threshold needs privacy.svt_noise_scale");
  }
}

namespace {

// Top-k token ids of the public logits, ties broken by index so the mask is
// deterministic.
std::vector<TokenId> TopKIds(const LogitVector& logits, int k) {
  std::vector<TokenId> ids(logits.values.size());
  std::iota(ids.begin(), ids.end(), 0);
  const auto by_score_desc = [&](TokenId a, TokenId b) {
    if (logits.values[a] != logits.values[b]) {
      return logits.values[a] > logits.values[b];
    }
    return a < b;
  };
  std::partial_sort(ids.begin(), ids.begin() + k, ids.end(), by_score_desc);
  ids.resize(k);
  return ids;
}

struct BatchOutcome {
  std::vector<SyntheticExample> examples;
  std::optional<std::string> error;
};

BatchOutcome DecodeBatch(const std::vector<TokenSequence>& batch_prompts,
                         LogitsProvider& provider,
                         const GenerationConfig& config, int batch_index,
                         const TextRenderer& renderer) {
  BatchOutcome outcome;
  RandomStream rng = RandomStream::Derive(config.seed, batch_index);
  try {
    SvtState svt = SvtState::Init(
        config.svt_threshold, config.privacy.svt_noise_scale.value_or(0.0),
        rng);
    int budget = config.privacy.private_token_budget;
    while (true) {
      std::optional<SyntheticExample> example =
          GenerateExample(batch_prompts, provider, config, svt, budget, rng);
      if (!example.has_value()) break;  // budget exhausted mid-example
      example->batch_index = batch_index;
      if (renderer) example->text = renderer(example->token_ids);
      outcome.examples.push_back(std::move(*example));
      if (budget <= 0) break;
      if (config.max_examples_per_batch.has_value() &&
          static_cast<int>(outcome.examples.size()) >=
              *config.max_examples_per_batch) {
        break;
      }
    }
  } catch (const std::exception& e) {
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace

std::optional<SyntheticExample> GenerateExample(
    const std::vector<TokenSequence>& batch_prompts, LogitsProvider& provider,
    const GenerationConfig& config, SvtState& svt, int& budget_remaining,
    RandomStream& rng) {
  if (budget_remaining < 0) {
    throw InvalidParameterError("budget_remaining must be >= 0");
  }
  const Vocabulary& vocab = provider.vocabulary();
  if (config.support_top_k.has_value() &&
      *config.support_top_k > vocab.size()) {
    throw InvalidParameterError("support_top_k exceeds the vocabulary size");
  }
  const TokenId eos = vocab.eos_id();
  const PrivacyParams& privacy = config.privacy;

  SyntheticExample example;
  TokenSequence& generated = example.token_ids;
  GenerationRecord& record = example.record;

  while (true) {
    if (static_cast<int>(generated.size()) >= config.max_tokens_per_example) {
      // Length cap reached: deterministic <eos>, no noise, no budget.
      generated.push_back(eos);
      record.tokens.push_back(TokenRecord{TokenSource::kForcedEos, 0.0, false,
                                          privacy.private_token_budget -
                                              budget_remaining});
      record.forced_eos = true;
      return example;
    }

    // Score each prompt continuation and the public continuation.
    std::vector<TokenSequence> contexts;
    contexts.reserve(batch_prompts.size());
    for (const TokenSequence& prompt : batch_prompts) {
      contexts.push_back(Concat(prompt, generated));
    }
    const std::vector<LogitVector> batch_logits =
        provider.LogitsMany(contexts);
    const LogitVector public_logits =
        provider.Logits(Concat(config.public_prompt, generated));

    const double distance =
        L1Distance(batch_logits, public_logits, privacy.expected_batch_size);
    const GateDecision decision = svt.Check(distance, rng);

    std::optional<std::vector<TokenId>> mask;
    if (config.support_top_k.has_value()) {
      mask = TopKIds(public_logits, *config.support_top_k);
    }
    const auto mask_span =
        mask.has_value()
            ? std::optional<std::span<const TokenId>>(std::span<const TokenId>(
                  mask->data(), mask->size()))
            : std::nullopt;

    TokenId token;
    if (decision == GateDecision::kPrivate) {
      if (budget_remaining == 0) {
        // The in-flight example is discarded; earlier private releases in it
        // were already charged and stay charged.
        return std::nullopt;
      }
      const LogitVector aggregated = Aggregate(
          batch_logits, privacy.expected_batch_size, privacy.clip_bound);
      token = ExpMechSample(aggregated, privacy.temperature, rng, mask_span);
      --budget_remaining;
      svt.Reset(rng);
      ++record.private_tokens;
      record.tokens.push_back(TokenRecord{TokenSource::kPrivate, distance,
                                          svt.enabled(),
                                          privacy.private_token_budget -
                                              budget_remaining});
    } else {
      token = ExpMechSample(public_logits, config.public_temperature, rng,
                            mask_span);
      ++record.public_tokens;
      record.tokens.push_back(TokenRecord{TokenSource::kPublic, distance, true,
                                          privacy.private_token_budget -
                                              budget_remaining});
    }
    generated.push_back(token);
    if (token == eos) {
      return example;
    }
  }
}

GenerateResult GenerateDataset(const std::vector<PromptRecord>& dataset,
                               const ProviderFactory& make_provider,
                               const GenerationConfig& config,
                               const BatchingOptions& batching,
                               int num_workers, const TextRenderer& renderer) {
  if (num_workers < 1) {
    throw InvalidParameterError("num_workers must be >= 1");
  }
  config.Validate();
  GenerateResult result;
  // The certificate depends on the configuration alone; it is computed
  // before any data is touched.
  result.report = MakeReport(config.privacy, config.delta);

  const BatchAssignment assignment = GroupedPartition(
      dataset, config.privacy.expected_batch_size, batching);
  const std::vector<std::vector<int>> members = BatchMembers(assignment);
  const int num_batches = assignment.num_batches;

  std::vector<std::vector<TokenSequence>> batch_prompts(num_batches);
  for (int b = 0; b < num_batches; ++b) {
    for (int i : members[b]) batch_prompts[b].push_back(dataset[i].token_ids);
  }

  std::vector<BatchOutcome> outcomes(num_batches);
  const int workers = std::min(num_workers, std::max(num_batches, 1));
  std::atomic<int> next_batch{0};

  auto run_worker = [&]() {
    std::shared_ptr<LogitsProvider> provider;
    std::optional<std::string> worker_error;
    try {
      provider = make_provider();
      if (!provider) {
        throw InvalidParameterError("provider factory returned null");
      }
    } catch (const std::exception& e) {
      worker_error = e.what();
    }
    while (true) {
      const int b = next_batch.fetch_add(1);
      if (b >= num_batches) break;
      if (worker_error.has_value()) {
        outcomes[b].error = worker_error;
        continue;
      }
      outcomes[b] =
          DecodeBatch(batch_prompts[b], *provider, config, b, renderer);
    }
  };

  if (workers == 1) {
    run_worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_worker);
    for (std::thread& t : pool) t.join();
  }

  for (int b = 0; b < num_batches; ++b) {
    if (outcomes[b].error.has_value()) {
      result.failures.push_back(BatchFailure{b, *outcomes[b].error});
      continue;
    }
    for (SyntheticExample& example : outcomes[b].examples) {
      result.examples.push_back(std::move(example));
    }
  }
  return result;
}

}  // namespace dpdecode
