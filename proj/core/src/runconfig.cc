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

#include "dpdecode/runconfig.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "dpdecode/errors.h"
#include "dpdecode/siphash.h"

namespace dpdecode {

using nlohmann::json;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double ParseThreshold(const json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (s == "-inf" || s == "-infinity") return kNegInf;
  }
  throw InvalidParameterError("svt theta must be a number or \"-inf\"");
}

HashKey ParseHashKey(const std::string& hex) {
  if (hex.size() != 32 ||
      hex.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
    throw InvalidParameterError("hash_key must be 32 hex digits");
  }
  HashKey key;
  key.lo = std::stoull(hex.substr(0, 16), nullptr, 16);
  key.hi = std::stoull(hex.substr(16, 16), nullptr, 16);
  return key;
}

std::string HashKeyHex(const HashKey& key) {
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%016llx%016llx",
                static_cast<unsigned long long>(key.lo),
                static_cast<unsigned long long>(key.hi));
  return std::string(buf);
}

TokenizerMode ParseTokenizerMode(const std::string& name) {
  if (name == "char") return TokenizerMode::kChar;
  if (name == "word") return TokenizerMode::kWord;
  throw InvalidParameterError("tokenizer must be \"char\" or \"word\"");
}

LabelMode ParseLabelMode(const std::string& name) {
  if (name == "none") return LabelMode::kNone;
  if (name == "hashed") return LabelMode::kHashed;
  if (name == "strict") return LabelMode::kStrict;
  throw InvalidParameterError("label_mode must be none, hashed, or strict");
}

}  // namespace

SvtPreset LookupSvtPreset(const std::string& name) {
  if (name == "off") return SvtPreset{kNegInf, std::nullopt};
  if (name == "low") return SvtPreset{0.3, 0.1};
  if (name == "medium") return SvtPreset{0.5, 0.2};
  if (name == "high") return SvtPreset{0.7, 0.3};
  if (name == "high-table") return SvtPreset{0.7, 0.2};
  throw InvalidParameterError("unknown svt preset: " + name);
}

RunConfig ParseRunConfig(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidParameterError(std::string("config is not valid JSON: ") +
                                e.what());
  }
  if (!doc.is_object()) {
    throw InvalidParameterError("config must be a JSON object");
  }

  RunConfig config;
  GenerationConfig& gen = config.generation;

  if (doc.contains("privacy")) {
    const json& p = doc["privacy"];
    if (p.contains("clip_bound")) {
      gen.privacy.clip_bound = p["clip_bound"].get<double>();
    }
    if (p.contains("batch_size")) {
      gen.privacy.expected_batch_size = p["batch_size"].get<int>();
    }
    if (p.contains("temperature")) {
      gen.privacy.temperature = p["temperature"].get<double>();
    }
    if (p.contains("private_token_budget")) {
      gen.privacy.private_token_budget = p["private_token_budget"].get<int>();
    }
  }

  if (doc.contains("svt")) {
    const json& s = doc["svt"];
    if (s.contains("preset")) {
      const SvtPreset preset = LookupSvtPreset(s["preset"].get<std::string>());
      gen.svt_threshold = preset.threshold;
      gen.privacy.svt_noise_scale = preset.noise_scale;
    }
    if (s.contains("theta")) {
      gen.svt_threshold = ParseThreshold(s["theta"]);
    }
    if (s.contains("sigma")) {
      gen.privacy.svt_noise_scale = s["sigma"].get<double>();
    }
    if (std::isinf(gen.svt_threshold) && gen.svt_threshold < 0) {
      gen.privacy.svt_noise_scale.reset();
    }
  }

  if (doc.contains("public_temperature")) {
    gen.public_temperature = doc["public_temperature"].get<double>();
  }
  if (doc.contains("max_tokens_per_example")) {
    gen.max_tokens_per_example = doc["max_tokens_per_example"].get<int>();
  }
  if (doc.contains("support_top_k") && !doc["support_top_k"].is_null()) {
    gen.support_top_k = doc["support_top_k"].get<int>();
  }
  if (doc.contains("delta")) gen.delta = doc["delta"].get<double>();
  if (doc.contains("seed")) gen.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("max_examples_per_batch") &&
      !doc["max_examples_per_batch"].is_null()) {
    gen.max_examples_per_batch = doc["max_examples_per_batch"].get<int>();
  }

  if (doc.contains("public_prompt")) {
    config.public_prompt_text = doc["public_prompt"].get<std::string>();
  }
  if (doc.contains("template")) {
    config.prompt_template = doc["template"].get<std::string>();
  }
  if (config.prompt_template.find("{text}") == std::string::npos) {
    throw InvalidParameterError("template must contain {text}");
  }
  if (doc.contains("workers")) config.workers = doc["workers"].get<int>();

  if (doc.contains("batching")) {
    const json& b = doc["batching"];
    if (b.contains("expected_size")) {
      config.batching.expected_dataset_size = b["expected_size"].get<int>();
    }
    if (b.contains("label_mode")) {
      config.batching.label_mode =
          ParseLabelMode(b["label_mode"].get<std::string>());
    }
    if (b.contains("hash_key")) {
      config.batching.hash_key = ParseHashKey(b["hash_key"].get<std::string>());
    }
    if (b.contains("labels")) {
      config.batching.strict_labels =
          b["labels"].get<std::vector<std::string>>();
    }
    if (b.contains("expected_per_label")) {
      config.batching.expected_per_label = b["expected_per_label"].get<int>();
    }
  }

  if (doc.contains("provider")) {
    const json& p = doc["provider"];
    const std::string type =
        p.contains("type") ? p["type"].get<std::string>() : "ngram";
    if (type == "ngram") {
      config.provider.kind = ProviderKind::kNgram;
      if (p.contains("corpus")) {
        config.provider.ngram.corpus_path = p["corpus"].get<std::string>();
      }
      if (p.contains("order")) {
        config.provider.ngram.order = p["order"].get<int>();
      }
      if (p.contains("alpha")) {
        config.provider.ngram.alpha = p["alpha"].get<double>();
      }
      if (p.contains("tokenizer")) {
        config.provider.ngram.tokenizer =
            ParseTokenizerMode(p["tokenizer"].get<std::string>());
      }
    } else if (type == "remote") {
      config.provider.kind = ProviderKind::kRemote;
      if (!p.contains("endpoint")) {
        throw InvalidParameterError("remote provider needs an endpoint");
      }
      config.provider.remote.endpoint = p["endpoint"].get<std::string>();
      if (p.contains("timeout_ms")) {
        config.provider.remote.timeout_ms = p["timeout_ms"].get<int>();
      }
      if (p.contains("max_batch")) {
        config.provider.remote.max_batch = p["max_batch"].get<int>();
      }
    } else {
      throw InvalidParameterError("provider type must be ngram or remote");
    }
  }

  if (doc.contains("input")) config.input_path = doc["input"].get<std::string>();
  if (doc.contains("output")) {
    config.output_path = doc["output"].get<std::string>();
  }
  if (doc.contains("report")) {
    config.report_path = doc["report"].get<std::string>();
  }
  return config;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataFormatError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseRunConfig(buffer.str());
}

std::string CanonicalConfigJson(const RunConfig& config) {
  const GenerationConfig& gen = config.generation;
  json doc;
  doc["privacy"] = {
      {"clip_bound", gen.privacy.clip_bound},
      {"batch_size", gen.privacy.expected_batch_size},
      {"temperature", gen.privacy.temperature},
      {"private_token_budget", gen.privacy.private_token_budget},
  };
  if (gen.privacy.svt_noise_scale.has_value()) {
    doc["svt"]["sigma"] = *gen.privacy.svt_noise_scale;
  }
  doc["svt"]["theta"] = std::isinf(gen.svt_threshold) && gen.svt_threshold < 0
                            ? json("-inf")
                            : json(gen.svt_threshold);
  doc["public_temperature"] = gen.public_temperature;
  doc["max_tokens_per_example"] = gen.max_tokens_per_example;
  doc["support_top_k"] =
      gen.support_top_k.has_value() ? json(*gen.support_top_k) : json(nullptr);
  doc["delta"] = gen.delta;
  doc["seed"] = gen.seed;
  doc["max_examples_per_batch"] = gen.max_examples_per_batch.has_value()
                                      ? json(*gen.max_examples_per_batch)
                                      : json(nullptr);
  doc["public_prompt"] = config.public_prompt_text;
  doc["template"] = config.prompt_template;
  doc["workers"] = config.workers;
  doc["batching"] = {
      {"expected_size", config.batching.expected_dataset_size},
      {"label_mode", config.batching.label_mode == LabelMode::kNone ? "none"
                     : config.batching.label_mode == LabelMode::kHashed
                         ? "hashed"
                         : "strict"},
      {"hash_key", HashKeyHex(config.batching.hash_key)},
      {"labels", config.batching.strict_labels},
      {"expected_per_label", config.batching.expected_per_label},
  };
  if (config.provider.kind == ProviderKind::kNgram) {
    doc["provider"] = {
        {"type", "ngram"},
        {"corpus", config.provider.ngram.corpus_path},
        {"order", config.provider.ngram.order},
        {"alpha", config.provider.ngram.alpha},
        {"tokenizer",
         config.provider.ngram.tokenizer == TokenizerMode::kChar ? "char"
                                                                 : "word"},
    };
  } else {
    doc["provider"] = {
        {"type", "remote"},
        {"endpoint", config.provider.remote.endpoint},
        {"timeout_ms", config.provider.remote.timeout_ms},
        {"max_batch", config.provider.remote.max_batch},
    };
  }
  return doc.dump();
}

std::string ConfigHashHex(const std::string& canonical_json) {
  const std::uint64_t h = SipHash24(canonical_json, 0x636f6e666967686bULL,
                                    0x647064656364686bULL);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace dpdecode
