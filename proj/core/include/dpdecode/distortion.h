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

#ifndef DPDECODE_DISTORTION_H_
#define DPDECODE_DISTORTION_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dpdecode/batching.h"
#include "dpdecode/mechanisms.h"
#include "dpdecode/ngram.h"

namespace dpdecode {

// Probe of how much each clipping function distorts the sampling
// distribution: decode with unclipped aggregation and, at every step, measure
// the L1 gap between the clipped-aggregate and unclipped-aggregate softmax
// for each candidate bound and both clip modes.
struct DistortionOptions {
  int order = 3;
  double alpha = 0.1;
  TokenizerMode tokenizer = TokenizerMode::kChar;
  std::vector<double> clip_bounds;
  int num_steps = 200;
  double temperature = 1.0;  // drives the unclipped decode, not the metric
  std::uint64_t seed = 0;
  int num_bins = 50;  // uniform bins over [0, 2], the L1 range
};

struct DistortionHistogram {
  double clip_bound = 0.0;
  ClipMode mode = ClipMode::kRecenter;
  std::vector<std::int64_t> bin_counts;
};

std::vector<DistortionHistogram> RunDistortion(
    const std::vector<PromptRecord>& corpus, const DistortionOptions& options);

// CSV rows: clip_bound,mode,bin_lo,bin_hi,count
std::string DistortionCsv(const std::vector<DistortionHistogram>& histograms,
                          int num_bins);

}  // namespace dpdecode

#endif  // DPDECODE_DISTORTION_H_
