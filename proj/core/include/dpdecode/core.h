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

#ifndef DPDECODE_CORE_H_
#define DPDECODE_CORE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dpdecode/random.h"

namespace dpdecode {

using TokenId = std::int32_t;

// A token sequence is a (possibly empty) list of vocabulary indices.
using TokenSequence = std::vector<TokenId>;

// Fixed token inventory shared by every component of a run. Immutable after
// construction and safe to share across threads.
class Vocabulary {
 public:
  // Requires at least two unique tokens and a valid end-of-sequence index.
  Vocabulary(std::vector<std::string> tokens, TokenId eos_id);

  int size() const { return static_cast<int>(tokens_.size()); }
  TokenId eos_id() const { return eos_id_; }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  TokenId eos_id_;
};

// Dense per-token scores, one entry per vocabulary slot.
struct LogitVector {
  std::vector<double> values;

  LogitVector() = default;
  explicit LogitVector(std::vector<double> v) : values(std::move(v)) {}
  LogitVector(std::initializer_list<double> v) : values(v) {}

  int size() const { return static_cast<int>(values.size()); }
  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }

  friend bool operator==(const LogitVector&, const LogitVector&) = default;
};

// Discrete distribution over the vocabulary, in vocabulary order.
struct ProbVector {
  std::vector<double> values;

  ProbVector() = default;
  explicit ProbVector(std::vector<double> v) : values(std::move(v)) {}
  ProbVector(std::initializer_list<double> v) : values(v) {}

  int size() const { return static_cast<int>(values.size()); }
  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
};

// Temperature softmax with max-subtraction, so arbitrarily large scores stay
// finite. Throws InvalidParameterError for temperature <= 0.
ProbVector Softmax(const LogitVector& logits, double temperature);

// Inverse-CDF sample over the stored order. Consumes exactly one uniform
// draw. Throws InvalidParameterError if the distribution contains NaN.
TokenId SampleCategorical(const ProbVector& probs, RandomStream& rng);

// Scores token sequences. Implementations must be deterministic: equal
// contexts yield equal logits, and the output length always matches the
// vocabulary size.
class LogitsProvider {
 public:
  virtual ~LogitsProvider() = default;

  virtual const Vocabulary& vocabulary() const = 0;
  virtual LogitVector Logits(const TokenSequence& context) = 0;

  // Scores several contexts; the default implementation loops over Logits.
  // Output order matches input order.
  virtual std::vector<LogitVector> LogitsMany(
      const std::vector<TokenSequence>& contexts);
};

// Concatenation helper: prompt followed by the generated continuation.
TokenSequence Concat(const TokenSequence& prefix, const TokenSequence& suffix);

}  // namespace dpdecode

#endif  // DPDECODE_CORE_H_
