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

#ifndef DPDECODE_BATCHING_H_
#define DPDECODE_BATCHING_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpdecode/core.h"

namespace dpdecode {

// One sensitive input example.
struct PromptRecord {
  std::string text;                  // non-empty
  std::optional<std::string> label;
  TokenSequence token_ids;           // rendered prompt, filled at run time
};

// 128-bit key for the keyed batch-assignment hash. The default key is fixed
// and published so runs reproduce; override it for production hygiene.
struct HashKey {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};

inline constexpr HashKey kDefaultHashKey{0x6470646563303036ULL,
                                         0x62617463682d6b31ULL};

enum class LabelMode {
  kNone,    // assignment from the prompt bytes only
  kHashed,  // label hash folded in; same-label prompts are not forced together
  kStrict,  // per-label sub-partitions over a configured label inventory
};

struct BatchingOptions {
  // Configured cardinality used to size the partition. Deliberately not
  // measured from the dataset: every prompt's assignment must be a pure
  // function of that prompt, so the batch count cannot depend on the data.
  int expected_dataset_size = 0;
  LabelMode label_mode = LabelMode::kNone;
  HashKey hash_key = kDefaultHashKey;
  // Strict mode only: the configured label inventory, in order, and the
  // expected number of prompts per label.
  std::vector<std::string> strict_labels;
  int expected_per_label = 0;
};

struct BatchAssignment {
  int num_batches = 0;
  std::vector<int> batch_of;  // parallel to the input dataset
};

// Pure per-prompt assignment: a keyed hash of the prompt bytes (and, in
// label-aware mode, its label) reduced mod num_batches. Depends on nothing
// but the prompt itself, the count, and the key, so adding or removing any
// other prompt never moves this one.
int AssignBatch(const PromptRecord& prompt, int num_batches, bool label_aware,
                const HashKey& key);

// Applies AssignBatch to every prompt. Batches are disjoint and cover the
// dataset; sizes are whatever the hash produces.
BatchAssignment Partition(const std::vector<PromptRecord>& dataset,
                          int num_batches, bool label_aware,
                          const HashKey& key);

// Chooses the batch count from the configured expected cardinality,
// k = ceil(expected / batch_size), then partitions. In strict label mode each
// configured label owns ceil(expected_per_label / batch_size) consecutive
// batch slots. If `warning` is non-null it receives a note when the expected
// cardinality is smaller than one batch.
BatchAssignment GroupedPartition(const std::vector<PromptRecord>& dataset,
                                 int expected_batch_size,
                                 const BatchingOptions& options,
                                 std::string* warning = nullptr);

// Batch members as index lists, in dataset order.
std::vector<std::vector<int>> BatchMembers(const BatchAssignment& assignment);

}  // namespace dpdecode

#endif  // DPDECODE_BATCHING_H_
