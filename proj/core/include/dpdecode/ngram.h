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

#ifndef DPDECODE_NGRAM_H_
#define DPDECODE_NGRAM_H_

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "dpdecode/core.h"

namespace dpdecode {

// Trivial reversible tokenization for desk-scale corpora. Character mode
// treats each byte as a token; word mode splits on whitespace.
enum class TokenizerMode { kChar, kWord };

class TextCodec {
 public:
  // Builds the vocabulary from the corpus: every observed unit plus a begin
  // marker and the end-of-sequence token.
  static TextCodec Build(const std::vector<std::string>& corpus,
                         TokenizerMode mode);

  // Units absent from the vocabulary are skipped.
  TokenSequence Encode(const std::string& text) const;

  // Inverse of Encode for known units; markers are dropped.
  std::string Decode(const TokenSequence& ids) const;

  const Vocabulary& vocabulary() const { return *vocabulary_; }
  std::shared_ptr<const Vocabulary> shared_vocabulary() const {
    return vocabulary_;
  }
  TokenId begin_id() const { return begin_id_; }
  TokenizerMode mode() const { return mode_; }

 private:
  TextCodec(std::shared_ptr<const Vocabulary> vocabulary, TokenId begin_id,
            TokenizerMode mode);

  std::shared_ptr<const Vocabulary> vocabulary_;
  std::unordered_map<std::string, TokenId> index_;
  TokenId begin_id_;
  TokenizerMode mode_;
};

// Add-alpha smoothed n-gram counts. Immutable once trained; safe to share.
struct NGramModel {
  int order = 1;              // context length is order - 1
  double alpha = 1.0;         // add-alpha smoothing mass
  std::shared_ptr<const Vocabulary> vocabulary;
  TokenId begin_id = 0;       // pads sequence starts

  struct ContextHash {
    std::size_t operator()(const TokenSequence& key) const;
  };
  struct Row {
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
  };
  std::unordered_map<TokenSequence, Row, ContextHash> rows;
};

// Counts every (context, next token) pair over the corpus, with contexts of
// length order - 1 and begin-marker padding at sequence starts.
NGramModel TrainNgram(const std::vector<TokenSequence>& corpus, int order,
                      double alpha, std::shared_ptr<const Vocabulary> vocab,
                      TokenId begin_id);

// logit[i] = ln((count(ctx, i) + alpha) / (total(ctx) + alpha * v)) for the
// longest stored suffix of the context that has counts, falling back through
// shorter suffixes to the uniform prior. softmax(logits, 1) is exactly the
// smoothed conditional.
LogitVector NgramLogits(const NGramModel& model, const TokenSequence& context);

class NGramProvider : public LogitsProvider {
 public:
  explicit NGramProvider(std::shared_ptr<const NGramModel> model)
      : model_(std::move(model)) {}

  const Vocabulary& vocabulary() const override {
    return *model_->vocabulary;
  }
  LogitVector Logits(const TokenSequence& context) override {
    return NgramLogits(*model_, context);
  }

 private:
  std::shared_ptr<const NGramModel> model_;
};

}  // namespace dpdecode

#endif  // DPDECODE_NGRAM_H_
