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

#ifndef DPDECODE_DATAIO_H_
#define DPDECODE_DATAIO_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dpdecode/batching.h"
#include "dpdecode/engine.h"

namespace dpdecode {

// Reads UTF-8 JSON lines of {"text": string, "label": optional string}.
// Order is preserved; CRLF endings are accepted. Throws DataFormatError
// naming the 1-based line on the first malformed line, and on empty input.
std::vector<PromptRecord> IngestPrompts(const std::string& path);
std::vector<PromptRecord> IngestPrompts(std::istream& in);

// Replaces every {text} and {label} placeholder. Records without a label
// substitute the empty string.
std::string ApplyTemplate(const std::string& prompt_template,
                          const PromptRecord& record);

// One JSON line per example:
// {"batch":…, "forced_eos":…, "private_tokens":…, "public_tokens":…,
//  "text":…, "tokens":[…]}
void WriteExamples(const std::string& path,
                   const std::vector<SyntheticExample>& examples);
void WriteExamples(std::ostream& out,
                   const std::vector<SyntheticExample>& examples);

struct RunMetadata {
  std::uint64_t seed = 0;
  std::string provider;
  std::string config_hash;
  int num_examples = 0;
  int num_batches = 0;
  std::vector<BatchFailure> failures;
};

// Sidecar report: the certified guarantee plus run metadata.
std::string ReportJson(const PrivacyReport& report, const RunMetadata& meta);
void WriteReportFile(const std::string& path, const PrivacyReport& report,
                     const RunMetadata& meta);

// Schema checks applied to generated text that should itself be JSON.
struct SchemaField {
  std::string type;          // string|integer|number|boolean|array|object
  bool no_whitespace = false;  // strings only
};

struct JsonSchemaSpec {
  std::vector<std::pair<std::string, SchemaField>> required;  // at least one
  bool allow_extra_fields = false;
};

JsonSchemaSpec ParseSchemaSpec(const std::string& json_text);
JsonSchemaSpec LoadSchemaSpec(const std::string& path);

struct ValidationFailure {
  int line = 0;
  std::string reason;
};

struct ValidationOutcome {
  int total = 0;
  int parsed = 0;
  int validated = 0;
  std::vector<ValidationFailure> failures;

  double parses_pct() const {
    return total == 0 ? 0.0 : 100.0 * parsed / total;
  }
  double validates_pct() const {
    return total == 0 ? 0.0 : 100.0 * validated / total;
  }
};

// Reads a generated output file, parses each example's text as JSON, and
// applies the schema. Failures are counted and described, never thrown.
ValidationOutcome ValidateJsonOutputs(const std::string& outputs_path,
                                      const JsonSchemaSpec& schema);
ValidationOutcome ValidateJsonOutputs(std::istream& in,
                                      const JsonSchemaSpec& schema);

}  // namespace dpdecode

#endif  // DPDECODE_DATAIO_H_
