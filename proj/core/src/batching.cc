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

#include "dpdecode/batching.h"

#include <algorithm>

#include "dpdecode/errors.h"
#include "dpdecode/siphash.h"

namespace dpdecode {

namespace {

// Odd multiplier folding the label hash into the text hash, so the combined
// value stays a bijection of the text hash for any fixed label.
constexpr std::uint64_t kLabelFold = 0x9e3779b97f4a7c15ULL;

std::uint64_t HashText(const PromptRecord& prompt, const HashKey& key) {
  return SipHash24(prompt.text, key.lo, key.hi);
}

std::uint64_t HashLabel(const PromptRecord& prompt, const HashKey& key) {
  const std::string& label = prompt.label.value_or(std::string());
  return SipHash24(label, key.lo, key.hi ^ 0x6c6162656c6b6579ULL);
}

int CeilDiv(int a, int b) { return (a + b - 1) / b; }

}  // namespace

int AssignBatch(const PromptRecord& prompt, int num_batches, bool label_aware,
                const HashKey& key) {
  if (num_batches < 1) {
    throw InvalidParameterError("num_batches must be >= 1");
  }
  std::uint64_t h = HashText(prompt, key);
  if (label_aware) {
    h += HashLabel(prompt, key) * kLabelFold;
  }
  return static_cast<int>(h % static_cast<std::uint64_t>(num_batches));
}

BatchAssignment Partition(const std::vector<PromptRecord>& dataset,
                          int num_batches, bool label_aware,
                          const HashKey& key) {
  if (num_batches < 1) {
    throw InvalidParameterError("num_batches must be >= 1");
  }
  BatchAssignment assignment;
  assignment.num_batches = num_batches;
  assignment.batch_of.reserve(dataset.size());
  for (const PromptRecord& prompt : dataset) {
    assignment.batch_of.push_back(
        AssignBatch(prompt, num_batches, label_aware, key));
  }
  return assignment;
}

BatchAssignment GroupedPartition(const std::vector<PromptRecord>& dataset,
                                 int expected_batch_size,
                                 const BatchingOptions& options,
                                 std::string* warning) {
  if (expected_batch_size < 1) {
    throw InvalidParameterError("expected batch size must be >= 1");
  }

  if (options.label_mode == LabelMode::kStrict) {
    if (options.strict_labels.empty()) {
      throw InvalidParameterError(
          "strict label mode needs a configured label inventory");
    }
    if (options.expected_per_label < 1) {
      throw InvalidParameterError(
          "strict label mode needs expected_per_label >= 1");
    }
    int per_label = CeilDiv(options.expected_per_label, expected_batch_size);
    if (per_label < 1) per_label = 1;
    if (options.expected_per_label < expected_batch_size && warning) {
      *warning = "expected_per_label is smaller than one batch; using one "
                 "batch per label";
    }
    const int num_labels = static_cast<int>(options.strict_labels.size());
    const int total = num_labels * per_label;

    BatchAssignment assignment;
    assignment.num_batches = total;
    assignment.batch_of.reserve(dataset.size());
    for (const PromptRecord& prompt : dataset) {
      int index;
      const auto it =
          prompt.label.has_value()
              ? std::find(options.strict_labels.begin(),
                          options.strict_labels.end(), *prompt.label)
              : options.strict_labels.end();
      if (it != options.strict_labels.end()) {
        const int rank =
            static_cast<int>(it - options.strict_labels.begin());
        const int slot = static_cast<int>(
            HashText(prompt, options.hash_key) %
            static_cast<std::uint64_t>(per_label));
        index = rank * per_label + slot;
      } else {
        // Labels outside the configured inventory still get a pure
        // assignment over the full range.
        std::uint64_t h = HashText(prompt, options.hash_key) +
                          HashLabel(prompt, options.hash_key) * kLabelFold;
        index = static_cast<int>(h % static_cast<std::uint64_t>(total));
      }
      assignment.batch_of.push_back(index);
    }
    return assignment;
  }

  if (options.expected_dataset_size < 1) {
    throw InvalidParameterError(
        "batching needs a configured expected dataset size");
  }
  int num_batches = CeilDiv(options.expected_dataset_size, expected_batch_size);
  if (options.expected_dataset_size < expected_batch_size) {
    num_batches = 1;
    if (warning) {
      *warning = "expected dataset size is smaller than one batch; "
                 "using a single batch";
    }
  }
  return Partition(dataset, num_batches,
                   options.label_mode == LabelMode::kHashed, options.hash_key);
}

std::vector<std::vector<int>> BatchMembers(const BatchAssignment& assignment) {
  std::vector<std::vector<int>> members(assignment.num_batches);
  for (size_t i = 0; i < assignment.batch_of.size(); ++i) {
    members[assignment.batch_of[i]].push_back(static_cast<int>(i));
  }
  return members;
}

}  // namespace dpdecode
