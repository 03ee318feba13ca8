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

#ifndef DPDECODE_RUNCONFIG_H_
#define DPDECODE_RUNCONFIG_H_

#include <optional>
#include <string>

#include "dpdecode/batching.h"
#include "dpdecode/engine.h"
#include "dpdecode/ngram.h"
#include "dpdecode/remote.h"

namespace dpdecode {

struct NgramProviderSpec {
  std::string corpus_path;  // defaults to the run's input when empty
  int order = 3;
  double alpha = 0.1;
  TokenizerMode tokenizer = TokenizerMode::kChar;
};

enum class ProviderKind { kNgram, kRemote };

struct ProviderSpec {
  ProviderKind kind = ProviderKind::kNgram;
  NgramProviderSpec ngram;
  RemoteBackendConfig remote;
};

// Everything a generation run needs, loadable from one JSON document.
// Defaults follow the published preset values (clip bound 10, private
// temperature 2, public temperature 1.5, gate off).
struct RunConfig {
  GenerationConfig generation;   // public_prompt tokens are filled at run time
  std::string public_prompt_text;
  std::string prompt_template = "{text}";  // must contain {text}
  BatchingOptions batching;
  int workers = 1;
  ProviderSpec provider;
  std::string input_path;
  std::string output_path;
  std::string report_path;
};

// Named gate presets: off, low (0.3, 0.1), medium (0.5, 0.2),
// high (0.7, 0.3), high-table (0.7, 0.2). Both published variants of the
// high preset are kept; choose explicitly.
struct SvtPreset {
  double threshold;
  std::optional<double> noise_scale;
};
SvtPreset LookupSvtPreset(const std::string& name);

RunConfig ParseRunConfig(const std::string& json_text);
RunConfig LoadRunConfig(const std::string& path);

// Canonical single-line JSON of the effective configuration, used to bind
// reports to exact parameters.
std::string CanonicalConfigJson(const RunConfig& config);

// 16-hex-digit keyed hash of a canonical config document.
std::string ConfigHashHex(const std::string& canonical_json);

}  // namespace dpdecode

#endif  // DPDECODE_RUNCONFIG_H_
