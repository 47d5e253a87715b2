// Copyright 2026 The topaug Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "topaug/pipeline.h"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <utility>

#include "topaug/toy_treebank.h"

namespace topaug {
namespace fs = std::filesystem;
namespace {

using Json = nlohmann::json;

std::string Dump(const Json &j) { return j.dump(2) + "\n"; }

Json Manifest(const PipelineConfig &config, const std::string &stage,
              uint64_t seed, Json inputs) {
  return {{"stage", stage},
          {"seed", seed},
          {"config", config.ToJson()},
          {"inputs", std::move(inputs)}};
}

// Copies the input digests into a JSON artifact.
Json Embed(Json artifact, const Json &manifest) {
  artifact["provenance"] = {{"stage", manifest.at("stage")},
                            {"seed", manifest.at("seed")},
                            {"inputs", manifest.at("inputs")}};
  return artifact;
}

void WriteFileAtomic(const fs::path &path, const std::string &content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path partial = path;
  partial += ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + partial.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + partial.string());
  }
  fs::rename(partial, path);
}

Json StatsJson(const GenerateStats &stats) {
  Json backoff = Json::object();
  for (const auto &[level, n] : stats.backoff_histogram) {
    backoff[std::to_string(level)] = n;
  }
  return {{"drawn", stats.drawn},
          {"duplicates", stats.duplicates},
          {"excluded", stats.excluded},
          {"rejected", stats.rejected},
          {"backoff_histogram", backoff}};
}

// Maps library exceptions to stage errors with exit codes.
template <typename Fn>
auto Guard(const std::string &stage, Fn &&fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError &) {
    throw;
  } catch (const TreeError &e) {
    throw StageError(stage, TreeErrorCodeName(e.code()), kExitData, e.what());
  } catch (const CorpusError &e) {
    throw StageError(stage, "CorpusError", kExitData, e.what());
  } catch (const GrammarError &e) {
    throw StageError(stage, "GrammarError", kExitData, e.what());
  } catch (const InfillError &e) {
    throw StageError(stage, "InfillError", kExitData, e.what());
  } catch (const EvalError &e) {
    throw StageError(stage, "EvalError", kExitData, e.what());
  } catch (const nlohmann::json::exception &e) {
    throw StageError(stage, "JsonError", kExitData, e.what());
  } catch (const fs::filesystem_error &e) {
    throw StageError(stage, "IoError", kExitData, e.what());
  }
}

void Require(const std::string &stage, const std::string &value,
             const std::string &flag) {
  if (value.empty()) {
    throw StageError(stage, "MissingInput", kExitUsage, flag + " is required");
  }
}

Grammar LoadGrammar(const std::string &path) {
  return Grammar::FromJson(Json::parse(ReadFile(path)));
}

std::vector<SyntheticSample> LoadSamples(const std::string &path) {
  return SamplesFromJsonl(ReadFile(path));
}

AdapterOptions Adapter(const PipelineConfig &config, const std::string &cmd) {
  AdapterOptions options;
  options.command = cmd;
  options.timeout = std::chrono::milliseconds(config.adapter_timeout_ms);
  return options;
}

GenerateOptions GenerationOptions(const PipelineConfig &config, uint64_t seed,
                                  const Corpus &train) {
  GenerateOptions options;
  options.k = config.k;
  options.p = config.p;
  options.seed = seed;
  options.dedup = config.dedup;
  options.with_replacement = config.with_replacement;
  if (config.dedup) options.exclusion = ExclusionSet(train);
  options.jobs = config.jobs;
  return options;
}

struct Generated {
  std::vector<SyntheticSample> samples;
  GenerateStats stats;
};

// Built-in or external generation over the training templates. Adapter
// failures quarantine the partial candidates and raise.
Generated GenerateFor(const PipelineConfig &config, const Corpus &train,
                      uint64_t seed, const fs::path &out_dir,
                      const Json &manifest) {
  const std::vector<Template> templates = DistinctTemplates(train);
  const GenerateOptions options = GenerationOptions(config, seed, train);
  Generated out;
  if (!config.external_generator()) {
    out.samples = Generate(FitInfiller(train), templates, options, &out.stats);
    return out;
  }
  ExternalGenerateResult result = ExternalGenerate(
      Adapter(config, config.generator), templates, options, train.Labels());
  if (result.error) {
    Json m = manifest;
    m["error"] = result.error->ToString();
    fs::path q = QuarantineArtifact(out_dir, "candidates.jsonl",
                                    SamplesToJsonl(result.samples), m);
    throw StageError("generate", AdapterErrorKindName(result.error->kind),
                     kExitAdapter, result.error->ToString(), {q.string()});
  }
  out.samples = std::move(result.samples);
  out.stats = result.stats;
  return out;
}

// Auxiliary parser: the given grammar, or an external parser queried for
// every distinct utterance of the valid samples.
ParserFn AuxParserFor(const PipelineConfig &config, const Grammar *grammar,
                      const std::vector<SyntheticSample> &samples,
                      const fs::path &out_dir, const Json &manifest) {
  if (!config.external_parser()) return MakeCkyParser(*grammar);
  std::map<Tokens, std::optional<ParseTree>> table;
  for (const SyntheticSample &s : samples) {
    if (s.valid()) table.emplace(s.utterance, std::nullopt);
  }
  std::vector<Tokens> utterances;
  for (const auto &[tokens, unused] : table) utterances.push_back(tokens);
  ExternalParseResult result =
      ExternalParse(Adapter(config, config.parser), utterances);
  if (result.error) {
    Json partial = Json::array();
    for (size_t i = 0; i < utterances.size(); ++i) {
      if (i < result.trees.size() && result.trees[i]) {
        partial.push_back({{"utterance", JoinTokens(utterances[i])},
                           {"tree", Serialize(*result.trees[i])}});
      }
    }
    Json m = manifest;
    m["error"] = result.error->ToString();
    fs::path q = QuarantineArtifact(out_dir, "parses.json", Dump(partial), m);
    throw StageError("filter", AdapterErrorKindName(result.error->kind),
                     kExitAdapter, result.error->ToString(), {q.string()});
  }
  for (size_t i = 0; i < utterances.size(); ++i) {
    table[utterances[i]] = result.trees[i];
  }
  return MakeLookupParser(std::move(table));
}

size_t CountKept(const std::vector<SyntheticSample> &samples) {
  size_t n = 0;
  for (const SyntheticSample &s : samples) {
    n += s.verdict == FilterVerdict::kKept;
  }
  return n;
}

}  // namespace

StageError::StageError(std::string stage, std::string kind, int exit_code,
                       const std::string &message,
                       std::vector<std::string> quarantined)
    : std::runtime_error(message),
      stage_(std::move(stage)),
      kind_(std::move(kind)),
      exit_code_(exit_code),
      quarantined_(std::move(quarantined)) {}

nlohmann::json StageError::ToJson() const {
  return {{"error", kind_},
          {"stage", stage_},
          {"message", what()},
          {"exit_code", exit_code_},
          {"quarantined", quarantined_}};
}

void PipelineConfig::Validate() const {
  auto fail = [](const std::string &message) {
    throw StageError("config", "InvalidConfig", kExitUsage, message);
  };
  if (k < 1) fail("k must be at least 1, got " + std::to_string(k));
  if (!(p > 0.0 && p <= 1.0)) fail("p must lie in (0, 1]");
  if (seeds.empty()) fail("at least one seed is required");
  if (jobs < 1) fail("jobs must be at least 1");
  if (!(smoothing.rule_smoothing >= 0.0)) fail("rule smoothing must be >= 0");
  if (!(smoothing.unknown_mass >= 0.0 && smoothing.unknown_mass < 1.0)) {
    fail("unknown mass must lie in [0, 1)");
  }
  if (adapter_timeout_ms <= 0) fail("adapter timeout must be positive");
  if (subsample_cap && *subsample_cap == 0) fail("subsample cap must be > 0");
  if (generator.empty()) fail("generator must be 'builtin' or a command");
  if (parser.empty()) fail("parser must be 'builtin' or a command");
  try {
    ColumnLayout::FromSpec(columns);
  } catch (const CorpusError &e) {
    fail(e.what());
  }
}

nlohmann::json PipelineConfig::ToJson() const {
  Json j;
  j["train"] = train_path;
  j["valid"] = valid_path;
  j["test"] = test_path;
  j["out_dir"] = out_dir;
  j["columns"] = columns;
  j["split"] = SplitName(split);
  j["keep_unsupported"] = keep_unsupported;
  j["dedup"] = dedup;
  j["strict"] = strict;
  j["k"] = k;
  j["p"] = p;
  j["seeds"] = seeds;
  j["with_replacement"] = with_replacement;
  j["rule_smoothing"] = smoothing.rule_smoothing;
  j["unknown_mass"] = smoothing.unknown_mass;
  j["generator"] = generator;
  j["parser"] = parser;
  j["adapter_timeout_ms"] = adapter_timeout_ms;
  j["subsample"] = subsample;
  j["subsample_cap"] = subsample_cap ? Json(*subsample_cap) : Json(nullptr);
  j["grammar"] = grammar_path;
  j["samples"] = samples_path;
  j["report_name"] = report_name;
  return j;
}

std::string Sha256Hex(const std::string &bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 15]);
  }
  return hex;
}

std::string ReadFile(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw fs::filesystem_error("cannot read", path,
                               std::make_error_code(std::errc::io_error));
  }
  return std::string(std::istreambuf_iterator<char>(in), {});
}

nlohmann::json InputDigest(const std::string &role, const fs::path &path) {
  return {{"role", role},
          {"path", path.string()},
          {"sha256", Sha256Hex(ReadFile(path))}};
}

fs::path CommitArtifact(const fs::path &path, const std::string &content,
                        nlohmann::json manifest) {
  manifest["artifact"] = path.filename().string();
  manifest["sha256"] = Sha256Hex(content);
  WriteFileAtomic(path, content);
  fs::path manifest_path = path;
  manifest_path += ".manifest.json";
  WriteFileAtomic(manifest_path, Dump(manifest));
  return path;
}

fs::path QuarantineArtifact(const fs::path &out_dir, const std::string &name,
                            const std::string &content,
                            nlohmann::json manifest) {
  manifest["quarantined"] = true;
  return CommitArtifact(out_dir / "quarantine" / name, content,
                        std::move(manifest));
}

const std::string &SplitPath(const PipelineConfig &config, Split split) {
  switch (split) {
    case Split::kTrain:
      return config.train_path;
    case Split::kValid:
      return config.valid_path;
    case Split::kTest:
      return config.test_path;
  }
  return config.train_path;
}

Corpus LoadSplit(const PipelineConfig &config, Split split) {
  const std::string stage = std::string("load ") + SplitName(split);
  const std::string &path = SplitPath(config, split);
  Require(stage, path, std::string("--") + SplitName(split));
  return Guard(stage, [&] {
    LoadOptions options;
    options.layout = ColumnLayout::FromSpec(config.columns);
    options.split = split;
    options.strict = config.strict;
    Corpus corpus = LoadTsv(path, options);
    if (!config.keep_unsupported) corpus = FilterUnsupported(corpus);
    if (corpus.items.empty()) {
      throw CorpusError(path + ": no items left after removing UNSUPPORTED");
    }
    return corpus;
  });
}

std::string TemplatesTsv(const FrequencyTable &table) {
  std::string out;
  for (const auto &[key, count] : table.RankFrequency()) {
    out += std::to_string(count) + "\t" + key + "\n";
  }
  return out;
}

std::string GeneratorPairsTsv(const Corpus &corpus) {
  std::string out;
  for (const AnnotatedUtterance &item : corpus.items) {
    out += Serialize(ExtractTemplate(item.tree), TreeForm::kGeneratorSource) +
           "\t" + Serialize(item.tree, TreeForm::kGeneratorTarget) + "\n";
  }
  return out;
}

std::vector<ParseTree> UnionTrees(const Corpus &real,
                                  const std::vector<SyntheticSample> &samples) {
  std::vector<ParseTree> trees;
  trees.reserve(real.size() + samples.size());
  for (const AnnotatedUtterance &item : real.items) trees.push_back(item.tree);
  for (const SyntheticSample &s : samples) {
    if (s.verdict == FilterVerdict::kKept && s.tree) trees.push_back(*s.tree);
  }
  return trees;
}

std::vector<fs::path> RunStats(const PipelineConfig &config) {
  Corpus corpus = LoadSplit(config, config.split);
  return Guard("stats", [&] {
    const fs::path out(config.out_dir);
    const FrequencyTable table = TemplateStats(corpus);
    Json manifest =
        Manifest(config, "stats", config.seed(),
                 {InputDigest(SplitName(config.split),
                              SplitPath(config, config.split))});
    return std::vector<fs::path>{
        CommitArtifact(out / "stats.json",
                       Dump(Embed(StatsToJson(table, config.split), manifest)),
                       manifest),
        CommitArtifact(out / "rank_frequency.csv", RankFrequencyCsv(table),
                       manifest)};
  });
}

std::vector<fs::path> RunTemplates(const PipelineConfig &config) {
  Corpus corpus = LoadSplit(config, config.split);
  return Guard("templates", [&] {
    Json manifest =
        Manifest(config, "templates", config.seed(),
                 {InputDigest(SplitName(config.split),
                              SplitPath(config, config.split))});
    return std::vector<fs::path>{
        CommitArtifact(fs::path(config.out_dir) / "templates.tsv",
                       TemplatesTsv(TemplateStats(corpus)), manifest)};
  });
}

std::vector<fs::path> RunMakePairs(const PipelineConfig &config) {
  Corpus corpus = LoadSplit(config, config.split);
  return Guard("make-pairs", [&] {
    Json manifest =
        Manifest(config, "make-pairs", config.seed(),
                 {InputDigest(SplitName(config.split),
                              SplitPath(config, config.split))});
    return std::vector<fs::path>{
        CommitArtifact(fs::path(config.out_dir) / "pairs.tsv",
                       GeneratorPairsTsv(corpus), manifest)};
  });
}

std::vector<fs::path> RunGenerate(const PipelineConfig &config) {
  Corpus train = LoadSplit(config, Split::kTrain);
  return Guard("generate", [&] {
    const fs::path out(config.out_dir);
    Json manifest = Manifest(config, "generate", config.seed(),
                             {InputDigest("train", config.train_path)});
    Generated g = GenerateFor(config, train, config.seed(), out, manifest);
    manifest["generation"] = StatsJson(g.stats);
    manifest["generator_id"] =
        config.external_generator() ? "external:" + config.generator
                                    : std::string(kBuiltinGeneratorId);
    return std::vector<fs::path>{CommitArtifact(
        out / "candidates.jsonl", SamplesToJsonl(g.samples), manifest)};
  });
}

std::vector<fs::path> RunFilter(const PipelineConfig &config) {
  Require("filter", config.samples_path, "--samples");
  if (!config.external_parser()) {
    Require("filter", config.grammar_path, "--grammar");
  }
  std::optional<Corpus> train;
  if (!config.train_path.empty()) train = LoadSplit(config, Split::kTrain);
  return Guard("filter", [&] {
    const fs::path out(config.out_dir);
    Json inputs = {InputDigest("samples", config.samples_path)};
    std::optional<Grammar> grammar;
    if (!config.external_parser()) {
      inputs.push_back(InputDigest("grammar", config.grammar_path));
      grammar = LoadGrammar(config.grammar_path);
    }
    if (train) inputs.push_back(InputDigest("train", config.train_path));
    Json manifest = Manifest(config, "filter", config.seed(), inputs);

    std::vector<SyntheticSample> samples = LoadSamples(config.samples_path);
    ParserFn parser = AuxParserFor(config, grammar ? &*grammar : nullptr,
                                   samples, out, manifest);
    std::optional<FrequencyTable> stats;
    if (train) stats = TemplateStats(*train);
    FilterReport report;
    samples = FilterSynthetic(parser, std::move(samples), &report,
                              stats ? &*stats : nullptr, config.jobs);
    manifest["filter"] = report.ToJson();
    return std::vector<fs::path>{
        CommitArtifact(out / "filtered.jsonl", SamplesToJsonl(samples),
                       manifest),
        CommitArtifact(out / "filter_report.json",
                       Dump(Embed(report.ToJson(), manifest)), manifest)};
  });
}

std::vector<fs::path> RunTrainParser(const PipelineConfig &config) {
  Corpus train = LoadSplit(config, Split::kTrain);
  return Guard("train-parser", [&] {
    Json inputs = {InputDigest("train", config.train_path)};
    std::vector<SyntheticSample> samples;
    if (!config.samples_path.empty()) {
      inputs.push_back(InputDigest("samples", config.samples_path));
      samples = LoadSamples(config.samples_path);
    }
    Json manifest = Manifest(config, "train-parser", config.seed(), inputs);
    const std::vector<ParseTree> trees = UnionTrees(train, samples);
    manifest["training_trees"] = trees.size();
    Grammar grammar = InduceGrammar(trees, config.smoothing);
    return std::vector<fs::path>{
        CommitArtifact(fs::path(config.out_dir) / "grammar.json",
                       Dump(Embed(grammar.ToJson(), manifest)), manifest)};
  });
}

std::vector<fs::path> RunEval(const PipelineConfig &config) {
  Require("eval", config.grammar_path, "--grammar");
  Corpus train = LoadSplit(config, Split::kTrain);
  Corpus test = LoadSplit(config, Split::kTest);
  return Guard("eval", [&] {
    Json inputs = {InputDigest("grammar", config.grammar_path),
                   InputDigest("train", config.train_path),
                   InputDigest("test", config.test_path)};
    std::vector<SyntheticSample> samples;
    if (!config.samples_path.empty()) {
      inputs.push_back(InputDigest("samples", config.samples_path));
      samples = LoadSamples(config.samples_path);
    }
    Json manifest = Manifest(config, "eval", config.seed(), inputs);
    const Grammar grammar = LoadGrammar(config.grammar_path);
    EvalReport report = Evaluate(MakeCkyParser(grammar), test,
                                 TemplateStats(train), config.jobs);
    report.name = config.report_name;
    report.samples.real = train.size();
    report.samples.synthetic_generated = samples.size();
    report.samples.synthetic_kept = CountKept(samples);
    const fs::path out(config.out_dir);
    return std::vector<fs::path>{
        CommitArtifact(out / ("report_" + config.report_name + ".json"),
                       Dump(Embed(report.ToJson(), manifest)), manifest),
        CommitArtifact(out / ("report_" + config.report_name + ".txt"),
                       RenderResultsTable({report}), manifest)};
  });
}

std::vector<fs::path> RunSubsample(const PipelineConfig &config) {
  Corpus train = LoadSplit(config, Split::kTrain);
  return Guard("subsample", [&] {
    std::vector<fs::path> written;
    for (uint64_t seed : config.seeds) {
      Json manifest = Manifest(config, "subsample", seed,
                               {InputDigest("train", config.train_path)});
      Corpus sub = SubsampleOnePerTemplate(train, seed, config.subsample_cap);
      manifest["items"] = sub.size();
      manifest["distinct_templates"] = TemplateStats(train).distinct();
      written.push_back(CommitArtifact(
          fs::path(config.out_dir) / ("subsample_" + std::to_string(seed) + ".tsv"),
          ToTsv(sub), manifest));
    }
    return written;
  });
}

AugmentOutcome RunAugment(const PipelineConfig &config) {
  config.Validate();
  Corpus train = LoadSplit(config, Split::kTrain);
  Corpus test = LoadSplit(config, Split::kTest);
  std::optional<Corpus> valid;
  if (!config.valid_path.empty()) valid = LoadSplit(config, Split::kValid);

  Json inputs = {InputDigest("train", config.train_path),
                 InputDigest("test", config.test_path)};
  if (valid) inputs.push_back(InputDigest("valid", config.valid_path));

  AugmentOutcome outcome;
  std::vector<EvalReport> baselines, augmented;
  Json runs = Json::array();
  std::string tables;
  for (uint64_t seed : config.seeds) {
    const fs::path out = fs::path(config.out_dir) / ("seed_" + std::to_string(seed));
    Json manifest = Manifest(config, "augment", seed, inputs);
    auto commit = [&](const std::string &name, const std::string &content) {
      outcome.artifacts.push_back(CommitArtifact(out / name, content, manifest));
    };

    Corpus used = config.subsample
                      ? Guard("subsample", [&] {
                          return SubsampleOnePerTemplate(train, seed,
                                                         config.subsample_cap);
                        })
                      : train;
    if (config.subsample) commit("train_used.tsv", ToTsv(used));
    const FrequencyTable stats = TemplateStats(used);

    Grammar ap = Guard("induce", [&] {
      return InduceGrammar(used, config.smoothing);
    });
    commit("ap_grammar.json", Dump(Embed(ap.ToJson(), manifest)));

    Generated g = Guard("generate", [&] {
      return GenerateFor(config, used, seed, out, manifest);
    });
    commit("candidates.jsonl", SamplesToJsonl(g.samples));

    SeedOutcome run;
    run.seed = seed;
    run.generation = g.stats;
    std::vector<SyntheticSample> filtered = Guard("filter", [&] {
      ParserFn parser = AuxParserFor(config, &ap, g.samples, out, manifest);
      return FilterSynthetic(parser, g.samples, &run.filter, &stats,
                             config.jobs);
    });
    commit("filtered.jsonl", SamplesToJsonl(filtered));

    const std::vector<ParseTree> trees = UnionTrees(used, filtered);
    Corpus union_corpus;
    for (const ParseTree &t : trees) {
      union_corpus.items.push_back(AnnotatedUtterance::FromTree(t));
    }
    commit("augmented_train.tsv", ToTsv(union_corpus));
    Grammar target = Guard("retrain", [&] {
      return InduceGrammar(trees, config.smoothing);
    });
    commit("target_grammar.json", Dump(Embed(target.ToJson(), manifest)));

    Guard("evaluate", [&] {
      run.baseline = Evaluate(MakeCkyParser(ap), test, stats, config.jobs);
      run.baseline.name = "Real";
      run.baseline.samples.real = used.size();
      run.augmented = Evaluate(MakeCkyParser(target), test, stats, config.jobs);
      run.augmented.name = "+syn";
      run.augmented.samples.real = used.size();
      run.augmented.samples.synthetic_generated = g.samples.size();
      run.augmented.samples.synthetic_kept = CountKept(filtered);
      run.delta = Compare(run.baseline, run.augmented);
      return 0;
    });
    commit("baseline_report.json",
           Dump(Embed(run.baseline.ToJson(), manifest)));
    commit("augmented_report.json",
           Dump(Embed(run.augmented.ToJson(), manifest)));
    const std::string table = RenderResultsTable({run.baseline, run.augmented});
    commit("results.txt", table);
    tables += "seed " + std::to_string(seed) + "\n" + table + "\n";

    runs.push_back({{"seed", seed},
                    {"training_items", used.size()},
                    {"generation", StatsJson(run.generation)},
                    {"filter", run.filter.ToJson()},
                    {"baseline", run.baseline.ToJson()},
                    {"augmented", run.augmented.ToJson()},
                    {"delta", run.delta.ToJson()}});
    baselines.push_back(run.baseline);
    augmented.push_back(run.augmented);
    outcome.runs.push_back(std::move(run));
  }

  Json summary = {{"runs", runs}};
  if (outcome.runs.size() >= 2) {
    outcome.baseline_summary = MultiSeedSummary(baselines);
    outcome.augmented_summary = MultiSeedSummary(augmented);
    summary["baseline_summary"] = outcome.baseline_summary->ToJson();
    summary["augmented_summary"] = outcome.augmented_summary->ToJson();
    tables += "mean over " + std::to_string(outcome.runs.size()) + " seeds\n";
    tables += "Real  " + outcome.baseline_summary->Render() + "\n";
    tables += "+syn  " + outcome.augmented_summary->Render() + "\n";
  }
  Json manifest = Manifest(config, "augment", config.seed(), inputs);
  const fs::path out(config.out_dir);
  outcome.artifacts.push_back(CommitArtifact(
      out / "augment_summary.json", Dump(Embed(summary, manifest)), manifest));
  outcome.artifacts.push_back(
      CommitArtifact(out / "augment_results.txt", tables, manifest));
  return outcome;
}

std::vector<fs::path> RunMakeToy(const PipelineConfig &config,
                                 size_t train_size, size_t valid_size,
                                 size_t test_size) {
  const fs::path out(config.out_dir);
  std::vector<fs::path> written;
  const struct {
    const char *name;
    size_t size;
    uint64_t seed;
    Split split;
  } parts[] = {{"toy_train.tsv", train_size, kToyTrainSeed, Split::kTrain},
               {"toy_valid.tsv", valid_size, kToyValidSeed, Split::kValid},
               {"toy_test.tsv", test_size, kToyTestSeed, Split::kTest}};
  for (const auto &part : parts) {
    if (part.size == 0) continue;
    Json manifest = Manifest(config, "make-toy", part.seed, Json::array());
    manifest["items"] = part.size;
    written.push_back(CommitArtifact(
        out / part.name, ToTsv(SampleToyCorpus(part.size, part.seed, part.split)),
        manifest));
  }
  return written;
}

}  // namespace topaug
