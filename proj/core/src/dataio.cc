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

#include "dpdecode/dataio.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "dpdecode/errors.h"

namespace dpdecode {

using nlohmann::json;

std::vector<PromptRecord> IngestPrompts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open input file: " + path);
  return IngestPrompts(in);
}

std::vector<PromptRecord> IngestPrompts(std::istream& in) {
  std::vector<PromptRecord> records;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error&) {
      throw DataFormatError("malformed JSON line", line_number);
    }
    if (!doc.is_object() || !doc.contains("text") ||
        !doc["text"].is_string()) {
      throw DataFormatError("expected an object with a \"text\" string",
                            line_number);
    }
    PromptRecord record;
    record.text = doc["text"].get<std::string>();
    if (record.text.empty()) {
      throw DataFormatError("\"text\" must be non-empty", line_number);
    }
    if (doc.contains("label") && !doc["label"].is_null()) {
      if (!doc["label"].is_string()) {
        throw DataFormatError("\"label\" must be a string", line_number);
      }
      record.label = doc["label"].get<std::string>();
    }
    records.push_back(std::move(record));
  }
  if (records.empty()) {
    throw DataFormatError("input file contains no records");
  }
  return records;
}

std::string ApplyTemplate(const std::string& prompt_template,
                          const PromptRecord& record) {
  std::string out = prompt_template;
  const auto replace_all = [&out](const std::string& needle,
                                  const std::string& value) {
    size_t pos = 0;
    while ((pos = out.find(needle, pos)) != std::string::npos) {
      out.replace(pos, needle.size(), value);
      pos += value.size();
    }
  };
  replace_all("{text}", record.text);
  replace_all("{label}", record.label.value_or(std::string()));
  return out;
}

void WriteExamples(const std::string& path,
                   const std::vector<SyntheticExample>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataFormatError("cannot open output file: " + path);
  WriteExamples(out, examples);
}

void WriteExamples(std::ostream& out,
                   const std::vector<SyntheticExample>& examples) {
  for (const SyntheticExample& example : examples) {
    json line;
    line["text"] = example.text;
    line["tokens"] = example.token_ids;
    line["batch"] = example.batch_index;
    line["private_tokens"] = example.record.private_tokens;
    line["public_tokens"] = example.record.public_tokens;
    line["forced_eos"] = example.record.forced_eos;
    out << line.dump() << '\n';
  }
}

namespace {

json ReportToJsonDoc(const PrivacyReport& report, const RunMetadata& meta) {
  json params;
  params["clip_bound"] = report.params.clip_bound;
  params["batch_size"] = report.params.expected_batch_size;
  params["temperature"] = report.params.temperature;
  params["svt_sigma"] = report.params.svt_noise_scale.has_value()
                            ? json(*report.params.svt_noise_scale)
                            : json(nullptr);
  params["private_token_budget"] = report.params.private_token_budget;

  json privacy;
  privacy["rho"] = report.rho;
  privacy["per_token_rho"] = report.per_token_rho;
  privacy["svt_rho"] = report.svt_rho;
  privacy["delta"] = report.delta;
  privacy["eps_simple"] = report.eps_simple;
  privacy["eps_optimal"] = report.eps_optimal;
  privacy["alpha_star"] = report.alpha_star;
  privacy["params"] = params;

  json failures = json::array();
  for (const BatchFailure& failure : meta.failures) {
    failures.push_back(
        {{"batch", failure.batch_index}, {"message", failure.message}});
  }
  json run;
  run["seed"] = meta.seed;
  run["provider"] = meta.provider;
  run["config_hash"] = meta.config_hash;
  run["num_examples"] = meta.num_examples;
  run["num_batches"] = meta.num_batches;
  run["failures"] = failures;

  json doc;
  doc["privacy"] = privacy;
  doc["run"] = run;
  return doc;
}

}  // namespace

std::string ReportJson(const PrivacyReport& report, const RunMetadata& meta) {
  return ReportToJsonDoc(report, meta).dump(2);
}

void WriteReportFile(const std::string& path, const PrivacyReport& report,
                     const RunMetadata& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataFormatError("cannot open report file: " + path);
  out << ReportJson(report, meta) << '\n';
}

JsonSchemaSpec ParseSchemaSpec(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidParameterError(std::string("schema is not valid JSON: ") +
                                e.what());
  }
  if (!doc.is_object() || !doc.contains("fields") ||
      !doc["fields"].is_object()) {
    throw InvalidParameterError("schema needs a \"fields\" object");
  }
  JsonSchemaSpec spec;
  for (const auto& [name, body] : doc["fields"].items()) {
    SchemaField field;
    if (body.is_string()) {
      field.type = body.get<std::string>();
    } else if (body.is_object() && body.contains("type")) {
      field.type = body["type"].get<std::string>();
      if (body.contains("no_whitespace")) {
        field.no_whitespace = body["no_whitespace"].get<bool>();
      }
    } else {
      throw InvalidParameterError("field " + name +
                                  " needs a type name or {\"type\": ...}");
    }
    static const char* kTypes[] = {"string",  "integer", "number",
                                   "boolean", "array",   "object"};
    bool known = false;
    for (const char* t : kTypes) known = known || field.type == t;
    if (!known) {
      throw InvalidParameterError("unknown type for field " + name + ": " +
                                  field.type);
    }
    spec.required.emplace_back(name, field);
  }
  if (spec.required.empty()) {
    throw InvalidParameterError("schema needs at least one required field");
  }
  if (doc.contains("allow_extra_fields")) {
    spec.allow_extra_fields = doc["allow_extra_fields"].get<bool>();
  }
  return spec;
}

JsonSchemaSpec LoadSchemaSpec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open schema file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseSchemaSpec(buffer.str());
}

namespace {

bool TypeMatches(const json& value, const std::string& type) {
  if (type == "string") return value.is_string();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  if (type == "boolean") return value.is_boolean();
  if (type == "array") return value.is_array();
  if (type == "object") return value.is_object();
  return false;
}

bool HasWhitespace(const std::string& s) {
  for (unsigned char c : s) {
    if (std::isspace(c)) return true;
  }
  return false;
}

// Empty string means the document conforms.
std::string CheckSchema(const json& doc, const JsonSchemaSpec& schema) {
  if (!doc.is_object()) return "top-level value is not an object";
  for (const auto& [name, field] : schema.required) {
    if (!doc.contains(name)) return "missing required field: " + name;
    if (!TypeMatches(doc[name], field.type)) {
      return "field " + name + " is not of type " + field.type;
    }
    if (field.no_whitespace && doc[name].is_string() &&
        HasWhitespace(doc[name].get<std::string>())) {
      return "field " + name + " contains whitespace";
    }
  }
  if (!schema.allow_extra_fields) {
    for (const auto& [key, value] : doc.items()) {
      (void)value;
      bool known = false;
      for (const auto& [name, field] : schema.required) {
        (void)field;
        known = known || name == key;
      }
      if (!known) return "unexpected extra field: " + key;
    }
  }
  return std::string();
}

}  // namespace

ValidationOutcome ValidateJsonOutputs(const std::string& outputs_path,
                                      const JsonSchemaSpec& schema) {
  std::ifstream in(outputs_path);
  if (!in) throw DataFormatError("cannot open outputs file: " + outputs_path);
  return ValidateJsonOutputs(in, schema);
}

ValidationOutcome ValidateJsonOutputs(std::istream& in,
                                      const JsonSchemaSpec& schema) {
  ValidationOutcome outcome;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++outcome.total;

    std::string text;
    try {
      const json wrapper = json::parse(line);
      if (!wrapper.is_object() || !wrapper.contains("text") ||
          !wrapper["text"].is_string()) {
        outcome.failures.push_back(
            {line_number, "output line has no \"text\" field"});
        continue;
      }
      text = wrapper["text"].get<std::string>();
    } catch (const json::parse_error&) {
      outcome.failures.push_back({line_number, "output line is not JSON"});
      continue;
    }

    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error&) {
      outcome.failures.push_back({line_number, "text does not parse as JSON"});
      continue;
    }
    ++outcome.parsed;

    const std::string reason = CheckSchema(doc, schema);
    if (reason.empty()) {
      ++outcome.validated;
    } else {
      outcome.failures.push_back({line_number, reason});
    }
  }
  return outcome;
}

}  // namespace dpdecode
