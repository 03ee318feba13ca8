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

#include "dpdecode/distortion.h"

#include <cmath>
#include <sstream>

#include "dpdecode/errors.h"

namespace dpdecode {

namespace {

double L1Gap(const ProbVector& a, const ProbVector& b) {
  double gap = 0.0;
  for (int i = 0; i < a.size(); ++i) gap += std::abs(a[i] - b[i]);
  return gap;
}

LogitVector MeanOf(const std::vector<LogitVector>& logits, int divisor,
                   const std::vector<double>* clip_bounds, size_t which,
                   ClipMode mode) {
  // clip_bounds == nullptr: plain unclipped mean.
  LogitVector sum;
  if (logits.empty()) return sum;
  sum.values.assign(logits[0].values.size(), 0.0);
  for (const LogitVector& z : logits) {
    LogitVector member =
        clip_bounds == nullptr
            ? z
            : (mode == ClipMode::kRecenter
                   ? ClipRecenter(z, (*clip_bounds)[which])
                   : ClipFixed(z, (*clip_bounds)[which]));
    for (size_t i = 0; i < sum.values.size(); ++i) {
      sum.values[i] += member.values[i];
    }
  }
  for (double& v : sum.values) v /= static_cast<double>(divisor);
  return sum;
}

}  // namespace

std::vector<DistortionHistogram> RunDistortion(
    const std::vector<PromptRecord>& corpus,
    const DistortionOptions& options) {
  if (corpus.empty()) throw InvalidParameterError("corpus is empty");
  if (options.clip_bounds.empty()) {
    throw InvalidParameterError("at least one clip bound is required");
  }
  if (options.num_steps < 1 || options.num_bins < 1) {
    throw InvalidParameterError("num_steps and num_bins must be >= 1");
  }

  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const PromptRecord& record : corpus) texts.push_back(record.text);
  const TextCodec codec = TextCodec::Build(texts, options.tokenizer);
  const TokenId eos = codec.vocabulary().eos_id();

  std::vector<TokenSequence> sequences;
  sequences.reserve(texts.size());
  for (const std::string& text : texts) {
    TokenSequence ids = codec.Encode(text);
    ids.push_back(eos);
    sequences.push_back(std::move(ids));
  }
  auto model = std::make_shared<const NGramModel>(
      TrainNgram(sequences, options.order, options.alpha,
                 codec.shared_vocabulary(), codec.begin_id()));
  NGramProvider provider(model);

  std::vector<TokenSequence> prompts;
  prompts.reserve(texts.size());
  for (const std::string& text : texts) prompts.push_back(codec.Encode(text));
  const int batch_size = static_cast<int>(prompts.size());

  const size_t num_bounds = options.clip_bounds.size();
  std::vector<DistortionHistogram> histograms(2 * num_bounds);
  for (size_t c = 0; c < num_bounds; ++c) {
    histograms[2 * c] = {options.clip_bounds[c], ClipMode::kRecenter,
                         std::vector<std::int64_t>(options.num_bins, 0)};
    histograms[2 * c + 1] = {options.clip_bounds[c], ClipMode::kFixedInterval,
                             std::vector<std::int64_t>(options.num_bins, 0)};
  }

  RandomStream rng(options.seed);
  TokenSequence generated;
  for (int step = 0; step < options.num_steps; ++step) {
    std::vector<TokenSequence> contexts;
    contexts.reserve(prompts.size());
    for (const TokenSequence& prompt : prompts) {
      contexts.push_back(Concat(prompt, generated));
    }
    const std::vector<LogitVector> batch_logits =
        provider.LogitsMany(contexts);

    const LogitVector unclipped =
        MeanOf(batch_logits, batch_size, nullptr, 0, ClipMode::kRecenter);
    const ProbVector reference = Softmax(unclipped, 1.0);

    for (size_t c = 0; c < num_bounds; ++c) {
      for (int m = 0; m < 2; ++m) {
        const ClipMode mode =
            m == 0 ? ClipMode::kRecenter : ClipMode::kFixedInterval;
        const LogitVector clipped =
            MeanOf(batch_logits, batch_size, &options.clip_bounds, c, mode);
        const double gap = L1Gap(Softmax(clipped, 1.0), reference);
        int bin = static_cast<int>(gap / 2.0 * options.num_bins);
        if (bin >= options.num_bins) bin = options.num_bins - 1;
        if (bin < 0) bin = 0;
        ++histograms[2 * c + m].bin_counts[bin];
      }
    }

    // Advance the unclipped walk; a finished example starts a fresh one.
    const TokenId token =
        SampleCategorical(Softmax(unclipped, options.temperature), rng);
    if (token == eos) {
      generated.clear();
    } else {
      generated.push_back(token);
    }
  }
  return histograms;
}

std::string DistortionCsv(const std::vector<DistortionHistogram>& histograms,
                          int num_bins) {
  std::ostringstream out;
  out << "clip_bound,mode,bin_lo,bin_hi,count\n";
  for (const DistortionHistogram& h : histograms) {
    const char* mode = h.mode == ClipMode::kRecenter ? "recenter" : "fixed";
    for (int b = 0; b < num_bins; ++b) {
      const double lo = 2.0 * b / num_bins;
      const double hi = 2.0 * (b + 1) / num_bins;
      out << h.clip_bound << ',' << mode << ',' << lo << ',' << hi << ','
          << h.bin_counts[b] << '\n';
    }
  }
  return out.str();
}

}  // namespace dpdecode
