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

// dp-decode: differentially private synthetic text generation and the
// accounting that certifies it.
//
//   dp-decode generate      run a generation job from a JSON config
//   dp-decode account       report the privacy guarantee of a parameter set
//   dp-decode calibrate     largest private-token budget for a target (eps, delta)
//   dp-decode distortion    clipping-distortion histograms as CSV
//   dp-decode validate-json structure checks over generated outputs
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dpdecode/accountant.h"
#include "dpdecode/dataio.h"
#include "dpdecode/distortion.h"
#include "dpdecode/engine.h"
#include "dpdecode/errors.h"
#include "dpdecode/ngram.h"
#include "dpdecode/remote.h"
#include "dpdecode/runconfig.h"

namespace {

using nlohmann::json;
using namespace dpdecode;

void WriteTextFile(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataFormatError("cannot open file for writing: " + path);
  out << body;
}

json PrivacyJson(const PrivacyReport& report) {
  json params;
  params["clip_bound"] = report.params.clip_bound;
  params["batch_size"] = report.params.expected_batch_size;
  params["temperature"] = report.params.temperature;
  params["svt_sigma"] = report.params.svt_noise_scale.has_value()
                            ? json(*report.params.svt_noise_scale)
                            : json(nullptr);
  params["private_token_budget"] = report.params.private_token_budget;
  json out;
  out["rho"] = report.rho;
  out["per_token_rho"] = report.per_token_rho;
  out["svt_rho"] = report.svt_rho;
  out["delta"] = report.delta;
  out["eps_simple"] = report.eps_simple;
  out["eps_optimal"] = report.eps_optimal;
  out["alpha_star"] = report.alpha_star;
  out["params"] = params;
  return out;
}

// Tokenization for remote providers: prompts arrive pre-tokenized as
// whitespace-separated ids.
TokenSequence ParseTokenIds(const std::string& text, int vocab_size) {
  TokenSequence ids;
  std::istringstream stream(text);
  std::string unit;
  while (stream >> unit) {
    size_t used = 0;
    long value = 0;
    try {
      value = std::stol(unit, &used);
    } catch (const std::exception&) {
      throw InvalidParameterError(
          "remote runs need whitespace-separated token ids; got: " + unit);
    }
    if (used != unit.size() || value < 0 || value >= vocab_size) {
      throw InvalidParameterError("token id out of range: " + unit);
    }
    ids.push_back(static_cast<TokenId>(value));
  }
  return ids;
}

std::string RenderTokenIds(const TokenSequence& ids) {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(ids[i]);
  }
  return out;
}

int RunGenerate(RunConfig config) {
  if (config.input_path.empty()) {
    throw InvalidParameterError("generate needs an input file");
  }
  if (config.output_path.empty()) {
    throw InvalidParameterError("generate needs an output file");
  }
  std::vector<PromptRecord> records = IngestPrompts(config.input_path);

  ProviderFactory factory;
  TextRenderer renderer;
  std::string provider_name;

  if (config.provider.kind == ProviderKind::kNgram) {
    provider_name = "ngram";
    const NgramProviderSpec& spec = config.provider.ngram;
    std::vector<PromptRecord> corpus =
        spec.corpus_path.empty() || spec.corpus_path == config.input_path
            ? records
            : IngestPrompts(spec.corpus_path);

    // The codec has to cover the corpus, the rendered prompts, and the
    // public prompt.
    std::vector<std::string> coverage;
    coverage.reserve(corpus.size() + records.size() + 1);
    for (const PromptRecord& r : corpus) coverage.push_back(r.text);
    for (const PromptRecord& r : records) {
      coverage.push_back(ApplyTemplate(config.prompt_template, r));
    }
    coverage.push_back(config.public_prompt_text);
    const TextCodec codec = TextCodec::Build(coverage, spec.tokenizer);

    std::vector<TokenSequence> training;
    training.reserve(corpus.size());
    for (const PromptRecord& r : corpus) {
      TokenSequence ids = codec.Encode(r.text);
      ids.push_back(codec.vocabulary().eos_id());
      training.push_back(std::move(ids));
    }
    auto model = std::make_shared<const NGramModel>(
        TrainNgram(training, spec.order, spec.alpha,
                   codec.shared_vocabulary(), codec.begin_id()));
    auto provider = std::make_shared<NGramProvider>(model);

    for (PromptRecord& r : records) {
      r.token_ids = codec.Encode(ApplyTemplate(config.prompt_template, r));
    }
    config.generation.public_prompt = codec.Encode(config.public_prompt_text);
    factory = [provider]() { return provider; };
    renderer = [codec](const TokenSequence& ids) { return codec.Decode(ids); };
  } else {
    provider_name = "remote";
    const RemoteBackendConfig backend = config.provider.remote;
    // One probe connection up front surfaces the vocabulary for
    // tokenization; each worker then opens its own connection.
    auto probe = RemoteClient::Connect(backend);
    const int vocab_size = probe->vocabulary().size();
    for (PromptRecord& r : records) {
      PromptRecord rendered = r;
      rendered.text = ApplyTemplate(config.prompt_template, r);
      r.token_ids = ParseTokenIds(rendered.text, vocab_size);
    }
    config.generation.public_prompt =
        ParseTokenIds(config.public_prompt_text, vocab_size);
    factory = [backend]() -> std::shared_ptr<LogitsProvider> {
      return RemoteClient::Connect(backend);
    };
    renderer = RenderTokenIds;
  }

  if (config.batching.expected_dataset_size == 0 &&
      config.batching.label_mode != LabelMode::kStrict) {
    throw InvalidParameterError(
        "batching.expected_size must be configured for the run");
  }

  const GenerateResult result =
      GenerateDataset(records, factory, config.generation, config.batching,
                      config.workers, renderer);

  WriteExamples(config.output_path, result.examples);

  RunMetadata meta;
  meta.seed = config.generation.seed;
  meta.provider = provider_name;
  meta.config_hash = ConfigHashHex(CanonicalConfigJson(config));
  meta.num_examples = static_cast<int>(result.examples.size());
  meta.num_batches = 0;
  for (const SyntheticExample& e : result.examples) {
    meta.num_batches = std::max(meta.num_batches, e.batch_index + 1);
  }
  meta.failures = result.failures;
  if (!config.report_path.empty()) {
    WriteReportFile(config.report_path, result.report, meta);
  }

  std::cout << "examples written: " << result.examples.size() << " -> "
            << config.output_path << "\n"
            << "rho = " << result.report.rho
            << ", eps_simple(delta=" << result.report.delta
            << ") = " << result.report.eps_simple
            << ", eps_optimal = " << result.report.eps_optimal << "\n";
  for (const BatchFailure& failure : result.failures) {
    std::cerr << "batch " << failure.batch_index
              << " failed: " << failure.message << "\n";
  }
  return result.failures.empty() ? 0 : 1;
}

struct AccountFlags {
  double clip_bound = 10.0;
  int batch_size = 250;
  double temperature = 2.0;
  double sigma = 0.2;
  bool no_svt = false;
  int budget = 1000;
  double delta = 1e-6;
  std::string report_path;
};

int RunAccount(const AccountFlags& flags) {
  PrivacyParams params;
  params.clip_bound = flags.clip_bound;
  params.expected_batch_size = flags.batch_size;
  params.temperature = flags.temperature;
  if (!flags.no_svt) params.svt_noise_scale = flags.sigma;
  params.private_token_budget = flags.budget;

  const PrivacyReport report = MakeReport(params, flags.delta);
  const double eps_pure =
      2.0 * flags.clip_bound / (flags.batch_size * flags.temperature);
  const double sigma_classic = GaussianSigmaClassic(
      flags.clip_bound, flags.batch_size, flags.temperature, flags.delta);
  const double sigma_bw = GaussianSigmaBalleWang(
      eps_pure, flags.delta, 1.0 / static_cast<double>(flags.batch_size));
  const double sigma_zcdp = GaussianSigmaZcdp(flags.clip_bound,
                                              flags.batch_size,
                                              flags.temperature);

  std::cout.precision(10);
  std::cout << "rho_total            = " << report.rho << "\n"
            << "rho_per_private_tok  = " << report.per_token_rho << "\n"
            << "rho_svt_per_token    = " << report.svt_rho << "\n"
            << "eps_simple  (delta=" << flags.delta
            << ") = " << report.eps_simple << "\n"
            << "eps_optimal (delta=" << flags.delta
            << ") = " << report.eps_optimal << "\n"
            << "alpha_star           = " << report.alpha_star << "\n"
            << "gaussian sigma (classic)    = " << sigma_classic << "\n"
            << "gaussian sigma (balle-wang) = " << sigma_bw << "\n"
            << "gaussian sigma (zcdp)       = " << sigma_zcdp << "\n";

  json doc;
  doc["privacy"] = PrivacyJson(report);
  doc["gaussian_equivalents"] = {{"classic", sigma_classic},
                                 {"balle_wang", sigma_bw},
                                 {"zcdp", sigma_zcdp}};
  if (!flags.report_path.empty()) {
    WriteTextFile(flags.report_path, doc.dump(2) + "\n");
  }
  return 0;
}

struct CalibrateFlags {
  double epsilon = 0.0;
  double delta = 1e-6;
  double clip_bound = 10.0;
  int batch_size = 250;
  double temperature = 2.0;
  double sigma = 0.2;
  bool no_svt = false;
  std::string report_path;
};

int RunCalibrate(const CalibrateFlags& flags) {
  std::optional<double> sigma;
  if (!flags.no_svt) sigma = flags.sigma;
  const int budget =
      CalibrateBudget(flags.epsilon, flags.delta, flags.clip_bound,
                      flags.batch_size, flags.temperature, sigma);
  double per_step = PerTokenRho(flags.clip_bound, flags.batch_size,
                                flags.temperature);
  if (sigma.has_value()) per_step += SvtRho(flags.batch_size, *sigma);
  const double achieved =
      RhoToEpsSimple(static_cast<double>(budget) * per_step, flags.delta);

  std::cout.precision(10);
  std::cout << "max private tokens per batch r = " << budget << "\n"
            << "achieved eps_simple            = " << achieved << "\n";

  if (!flags.report_path.empty()) {
    json doc;
    doc["max_private_token_budget"] = budget;
    doc["achieved_eps_simple"] = achieved;
    doc["target"] = {{"epsilon", flags.epsilon}, {"delta", flags.delta}};
    doc["params"] = {{"clip_bound", flags.clip_bound},
                     {"batch_size", flags.batch_size},
                     {"temperature", flags.temperature},
                     {"svt_sigma", sigma ? json(*sigma) : json(nullptr)}};
    WriteTextFile(flags.report_path, doc.dump(2) + "\n");
  }
  return 0;
}

struct DistortionFlags {
  std::string input_path;
  std::string output_path;
  int order = 3;
  double alpha = 0.1;
  std::string tokenizer = "char";
  std::vector<double> clip_bounds;
  int num_steps = 200;
  double temperature = 1.0;
  std::uint64_t seed = 0;
};

int RunDistortionCmd(const DistortionFlags& flags) {
  DistortionOptions options;
  options.order = flags.order;
  options.alpha = flags.alpha;
  options.tokenizer = flags.tokenizer == "word" ? TokenizerMode::kWord
                                                : TokenizerMode::kChar;
  options.clip_bounds = flags.clip_bounds;
  options.num_steps = flags.num_steps;
  options.temperature = flags.temperature;
  options.seed = flags.seed;

  const std::vector<PromptRecord> corpus = IngestPrompts(flags.input_path);
  const std::vector<DistortionHistogram> histograms =
      RunDistortion(corpus, options);
  const std::string csv = DistortionCsv(histograms, options.num_bins);
  if (flags.output_path.empty()) {
    std::cout << csv;
  } else {
    WriteTextFile(flags.output_path, csv);
    std::cout << "histograms written to " << flags.output_path << "\n";
  }
  return 0;
}

int RunValidateJson(const std::string& input_path,
                    const std::string& schema_path,
                    const std::string& report_path) {
  const JsonSchemaSpec schema = LoadSchemaSpec(schema_path);
  const ValidationOutcome outcome = ValidateJsonOutputs(input_path, schema);

  std::cout << "examples: " << outcome.total << "\n"
            << "parses:    " << outcome.parses_pct() << "% ("
            << outcome.parsed << "/" << outcome.total << ")\n"
            << "validates: " << outcome.validates_pct() << "% ("
            << outcome.validated << "/" << outcome.total << ")\n";
  for (const ValidationFailure& failure : outcome.failures) {
    std::cout << "  line " << failure.line << ": " << failure.reason << "\n";
  }

  if (!report_path.empty()) {
    json failures = json::array();
    for (const ValidationFailure& failure : outcome.failures) {
      failures.push_back({{"line", failure.line}, {"reason", failure.reason}});
    }
    json doc;
    doc["total"] = outcome.total;
    doc["parsed"] = outcome.parsed;
    doc["validated"] = outcome.validated;
    doc["parses_pct"] = outcome.parses_pct();
    doc["validates_pct"] = outcome.validates_pct();
    doc["failures"] = failures;
    WriteTextFile(report_path, doc.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"differentially private synthetic text via private prediction"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "run a generation job");
  std::string gen_config_path;
  std::string gen_input, gen_output, gen_report;
  std::optional<std::uint64_t> gen_seed;
  generate->add_option("--config", gen_config_path, "run config JSON")
      ->required();
  generate->add_option("--input", gen_input, "prompts JSONL (overrides config)");
  generate->add_option("--output", gen_output, "output JSONL (overrides config)");
  generate->add_option("--report", gen_report, "report JSON (overrides config)");
  generate->add_option("--seed", gen_seed, "seed (overrides config)");

  // account
  auto* account = app.add_subcommand("account", "privacy guarantee report");
  AccountFlags account_flags;
  account->add_option("--c", account_flags.clip_bound, "clip bound");
  account->add_option("--s", account_flags.batch_size, "expected batch size");
  account->add_option("--tau", account_flags.temperature, "temperature");
  account->add_option("--sigma", account_flags.sigma, "svt noise scale");
  account->add_flag("--no-svt", account_flags.no_svt, "gate disabled");
  account->add_option("--r", account_flags.budget, "private token budget");
  account->add_option("--delta", account_flags.delta, "target delta");
  account->add_option("--report", account_flags.report_path, "JSON out");

  // calibrate
  auto* calibrate =
      app.add_subcommand("calibrate", "budget for a target (eps, delta)");
  CalibrateFlags calibrate_flags;
  calibrate->add_option("--epsilon", calibrate_flags.epsilon, "target epsilon")
      ->required();
  calibrate->add_option("--delta", calibrate_flags.delta, "target delta");
  calibrate->add_option("--c", calibrate_flags.clip_bound, "clip bound");
  calibrate->add_option("--s", calibrate_flags.batch_size, "batch size");
  calibrate->add_option("--tau", calibrate_flags.temperature, "temperature");
  calibrate->add_option("--sigma", calibrate_flags.sigma, "svt noise scale");
  calibrate->add_flag("--no-svt", calibrate_flags.no_svt, "gate disabled");
  calibrate->add_option("--report", calibrate_flags.report_path, "JSON out");

  // distortion
  auto* distortion =
      app.add_subcommand("distortion", "clipping distortion histograms");
  DistortionFlags distortion_flags;
  distortion->add_option("--input", distortion_flags.input_path, "corpus JSONL")
      ->required();
  distortion->add_option("--output", distortion_flags.output_path, "CSV out");
  distortion->add_option("--order", distortion_flags.order, "n-gram order");
  distortion->add_option("--alpha", distortion_flags.alpha, "smoothing");
  distortion->add_option("--tokenizer", distortion_flags.tokenizer,
                         "char or word");
  distortion
      ->add_option("--c-values", distortion_flags.clip_bounds,
                   "clip bounds to probe")
      ->delimiter(',')
      ->required();
  distortion->add_option("--num-steps", distortion_flags.num_steps,
                         "decode steps");
  distortion->add_option("--tau", distortion_flags.temperature,
                         "decode temperature");
  distortion->add_option("--seed", distortion_flags.seed, "seed");

  // validate-json
  auto* validate =
      app.add_subcommand("validate-json", "structure checks over outputs");
  std::string validate_input, validate_schema, validate_report;
  validate->add_option("--input", validate_input, "generated outputs JSONL")
      ->required();
  validate->add_option("--schema", validate_schema, "schema spec JSON")
      ->required();
  validate->add_option("--report", validate_report, "JSON out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) {
      RunConfig config = LoadRunConfig(gen_config_path);
      if (!gen_input.empty()) config.input_path = gen_input;
      if (!gen_output.empty()) config.output_path = gen_output;
      if (!gen_report.empty()) config.report_path = gen_report;
      if (gen_seed.has_value()) config.generation.seed = *gen_seed;
      return RunGenerate(std::move(config));
    }
    if (account->parsed()) return RunAccount(account_flags);
    if (calibrate->parsed()) return RunCalibrate(calibrate_flags);
    if (distortion->parsed()) return RunDistortionCmd(distortion_flags);
    if (validate->parsed()) {
      return RunValidateJson(validate_input, validate_schema, validate_report);
    }
  } catch (const InvalidParameterError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
