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

#include "dpdecode/ngram.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dpdecode/errors.h"
#include "dpdecode/siphash.h"

namespace dpdecode {

namespace {

constexpr char kBeginToken[] = "<bos>";
constexpr char kEosToken[] = "<eos>";

std::vector<std::string> SplitUnits(const std::string& text,
                                    TokenizerMode mode) {
  std::vector<std::string> units;
  if (mode == TokenizerMode::kChar) {
    units.reserve(text.size());
    for (char c : text) units.emplace_back(1, c);
  } else {
    std::istringstream stream(text);
    std::string word;
    while (stream >> word) units.push_back(word);
  }
  return units;
}

}  // namespace

TextCodec::TextCodec(std::shared_ptr<const Vocabulary> vocabulary,
                     TokenId begin_id, TokenizerMode mode)
    : vocabulary_(std::move(vocabulary)), begin_id_(begin_id), mode_(mode) {
  for (TokenId id = 0; id < vocabulary_->size(); ++id) {
    index_.emplace(vocabulary_->token(id), id);
  }
}

TextCodec TextCodec::Build(const std::vector<std::string>& corpus,
                           TokenizerMode mode) {
  std::set<std::string> units;  // ordered, for a stable vocabulary layout
  for (const std::string& line : corpus) {
    for (std::string& u : SplitUnits(line, mode)) units.insert(std::move(u));
  }
  units.erase(kBeginToken);
  units.erase(kEosToken);

  std::vector<std::string> tokens(units.begin(), units.end());
  const TokenId begin_id = static_cast<TokenId>(tokens.size());
  tokens.push_back(kBeginToken);
  const TokenId eos_id = static_cast<TokenId>(tokens.size());
  tokens.push_back(kEosToken);

  auto vocab = std::make_shared<const Vocabulary>(std::move(tokens), eos_id);
  return TextCodec(std::move(vocab), begin_id, mode);
}

TokenSequence TextCodec::Encode(const std::string& text) const {
  TokenSequence ids;
  for (const std::string& unit : SplitUnits(text, mode_)) {
    const auto it = index_.find(unit);
    if (it != index_.end()) ids.push_back(it->second);
  }
  return ids;
}

std::string TextCodec::Decode(const TokenSequence& ids) const {
  std::string out;
  bool first = true;
  for (TokenId id : ids) {
    if (id == begin_id_ || id == vocabulary_->eos_id()) continue;
    if (mode_ == TokenizerMode::kWord && !first) out += ' ';
    out += vocabulary_->token(id);
    first = false;
  }
  return out;
}

std::size_t NGramModel::ContextHash::operator()(
    const TokenSequence& key) const {
  return static_cast<std::size_t>(SipHash24(
      key.data(), key.size() * sizeof(TokenId), 0x6e6772616d637478ULL, 0));
}

NGramModel TrainNgram(const std::vector<TokenSequence>& corpus, int order,
                      double alpha, std::shared_ptr<const Vocabulary> vocab,
                      TokenId begin_id) {
  if (order < 1) throw InvalidParameterError("order must be >= 1");
  if (!(alpha > 0)) throw InvalidParameterError("alpha must be positive");
  if (corpus.empty()) throw InvalidParameterError("corpus is empty");
  if (!vocab) throw InvalidParameterError("vocabulary is required");

  NGramModel model;
  model.order = order;
  model.alpha = alpha;
  model.vocabulary = std::move(vocab);
  model.begin_id = begin_id;

  const int ctx_len = order - 1;
  const int v = model.vocabulary->size();
  for (const TokenSequence& sequence : corpus) {
    TokenSequence padded(ctx_len, begin_id);
    padded.insert(padded.end(), sequence.begin(), sequence.end());
    for (size_t pos = ctx_len; pos < padded.size(); ++pos) {
      const TokenId next = padded[pos];
      if (next < 0 || next >= v) {
        throw InvalidParameterError("token id out of vocabulary range");
      }
      TokenSequence context(padded.begin() + (pos - ctx_len),
                            padded.begin() + pos);
      NGramModel::Row& row = model.rows[context];
      if (row.counts.empty()) row.counts.assign(v, 0);
      ++row.counts[next];
      ++row.total;
    }
  }
  return model;
}

LogitVector NgramLogits(const NGramModel& model,
                        const TokenSequence& context) {
  const int v = model.vocabulary->size();
  const int ctx_len = model.order - 1;

  // Pad short contexts with the begin marker, then try successively shorter
  // suffixes until one has counts.
  TokenSequence padded;
  if (static_cast<int>(context.size()) < ctx_len) {
    padded.assign(ctx_len - context.size(), model.begin_id);
    padded.insert(padded.end(), context.begin(), context.end());
  } else {
    padded.assign(context.end() - ctx_len, context.end());
  }

  const NGramModel::Row* row = nullptr;
  for (int len = ctx_len; len >= 0 && row == nullptr; --len) {
    TokenSequence suffix(padded.end() - len, padded.end());
    const auto it = model.rows.find(suffix);
    if (it != model.rows.end() && it->second.total > 0) {
      row = &it->second;
    }
  }

  LogitVector logits;
  logits.values.resize(v);
  const double total = row ? static_cast<double>(row->total) : 0.0;
  const double denom = std::log(total + model.alpha * v);
  for (int i = 0; i < v; ++i) {
    const double count = row ? static_cast<double>(row->counts[i]) : 0.0;
    logits.values[i] = std::log(count + model.alpha) - denom;
  }
  return logits;
}

}  // namespace dpdecode
