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

// topaug: template-based synthetic data augmentation for TOP-style
// semantic parsing.
//
// Usage:
//   topaug stats       --train train.tsv [--split valid --valid valid.tsv]
//   topaug templates   --train train.tsv --out out/
//   topaug make-pairs  --train train.tsv --out out/
//   topaug generate    --train train.tsv -k 5 -p 0.9 --seed 7 --out out/
//   topaug train-parser --train train.tsv [--samples filtered.jsonl]
//   topaug filter      --grammar grammar.json --samples candidates.jsonl
//   topaug eval        --grammar grammar.json --train train.tsv --test test.tsv
//   topaug subsample   --train train.tsv --seeds 1,2,3,4,5
//   topaug augment     --train train.tsv --test test.tsv [--subsample]
//   topaug make-toy    --out data/
//
// TOPAUG_TRAIN, TOPAUG_VALID, TOPAUG_TEST and TOPAUG_OUT supply default
// paths. Exit status: 0 success, 1 usage, 2 data error, 3 adapter error.
// Failures print one JSON error record on stderr.

#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "topaug/pipeline.h"

namespace {

using topaug::PipelineConfig;
using topaug::Split;

void AddConfigFlags(CLI::App *cmd, PipelineConfig *c, size_t *cap) {
  cmd->add_option("--train", c->train_path, "Training TSV")
      ->envname("TOPAUG_TRAIN");
  cmd->add_option("--valid", c->valid_path, "Validation TSV")
      ->envname("TOPAUG_VALID");
  cmd->add_option("--test", c->test_path, "Test TSV")->envname("TOPAUG_TEST");
  cmd->add_option("--out", c->out_dir, "Output directory")
      ->envname("TOPAUG_OUT")
      ->capture_default_str();
  cmd->add_option("--columns", c->columns,
                  "Column roles, e.g. raw,tokens,tree or tree")
      ->capture_default_str();
  cmd->add_option("--split", c->split,
                  "Split read by single-corpus commands")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Split>{{"train", Split::kTrain},
                                       {"valid", Split::kValid},
                                       {"test", Split::kTest}},
          CLI::ignore_case));
  cmd->add_flag("!--drop-unsupported", c->keep_unsupported,
                "Remove UNSUPPORTED* items from every split");
  cmd->add_flag("!--no-dedup", c->dedup,
                "Keep duplicate synthetic samples");
  cmd->add_flag("--strict", c->strict, "Abort on the first malformed line");
  cmd->add_option("-k", c->k, "Samples per template")->capture_default_str();
  cmd->add_option("-p,--top-p", c->p, "Nucleus mass")->capture_default_str();
  cmd->add_option("--seed,--seeds", c->seeds, "Seed or comma-separated seeds")
      ->delimiter(',');
  cmd->add_flag("--with-replacement", c->with_replacement,
                "Draw templates uniformly with replacement");
  cmd->add_option("--rule-smoothing", c->smoothing.rule_smoothing,
                  "Additive rule smoothing")
      ->capture_default_str();
  cmd->add_option("--unknown-mass", c->smoothing.unknown_mass,
                  "Unknown-token mass per preterminal")
      ->capture_default_str();
  cmd->add_option("--generator", c->generator,
                  "'builtin' or an adapter command line")
      ->capture_default_str();
  cmd->add_option("--parser", c->parser,
                  "Auxiliary parser: 'builtin' or an adapter command line")
      ->capture_default_str();
  cmd->add_option("--adapter-timeout-ms", c->adapter_timeout_ms,
                  "Adapter inactivity timeout")
      ->capture_default_str();
  cmd->add_flag("--subsample", c->subsample,
                "Low-resource mode: one utterance per template");
  cmd->add_option("--subsample-cap", *cap,
                  "Keep at most this many templates when subsampling");
  cmd->add_option("--grammar", c->grammar_path, "Grammar JSON");
  cmd->add_option("--samples", c->samples_path, "Samples JSONL");
  cmd->add_option("--name", c->report_name, "Report name")
      ->capture_default_str();
  cmd->add_option("-j,--jobs", c->jobs, "Worker threads")
      ->capture_default_str();
}

void PrintPaths(const std::vector<std::filesystem::path> &paths) {
  for (const auto &path : paths) std::cout << path.string() << "\n";
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Template-based synthetic data augmentation for TOP parsing"};
  app.require_subcommand(1);

  PipelineConfig config;
  size_t cap = 0;
  size_t toy_train = 2000, toy_valid = 500, toy_test = 500;
  std::function<int()> run;

  using Stage = std::vector<std::filesystem::path> (*)(const PipelineConfig &);
  const std::pair<const char *, std::pair<const char *, Stage>> stages[] = {
      {"stats", {"Template statistics and rank-frequency CSV", topaug::RunStats}},
      {"templates", {"Templates with frequencies", topaug::RunTemplates}},
      {"make-pairs", {"Generator (source, target) pairs", topaug::RunMakePairs}},
      {"generate", {"Synthetic candidates from training templates",
                    topaug::RunGenerate}},
      {"filter", {"Auxiliary-parser filtering of candidates", topaug::RunFilter}},
      {"train-parser", {"Induce a PCFG from real and kept samples",
                        topaug::RunTrainParser}},
      {"eval", {"Exact-match report by frequency bucket", topaug::RunEval}},
      {"subsample", {"One utterance per template, per seed",
                     topaug::RunSubsample}},
  };
  for (const auto &[name, entry] : stages) {
    CLI::App *cmd = app.add_subcommand(name, entry.first);
    AddConfigFlags(cmd, &config, &cap);
    Stage stage = entry.second;
    cmd->callback([&, stage] {
      run = [&, stage] {
        PrintPaths(stage(config));
        return topaug::kExitOk;
      };
    });
  }

  CLI::App *augment = app.add_subcommand(
      "augment", "Generate, filter, retrain and evaluate against the baseline");
  AddConfigFlags(augment, &config, &cap);
  augment->callback([&] {
    run = [&] {
      topaug::AugmentOutcome outcome = topaug::RunAugment(config);
      std::cout << topaug::ReadFile(std::filesystem::path(config.out_dir) /
                                    "augment_results.txt");
      return topaug::kExitOk;
    };
  });

  CLI::App *toy = app.add_subcommand("make-toy", "Write the toy treebank splits");
  AddConfigFlags(toy, &config, &cap);
  toy->add_option("--train-size", toy_train)->capture_default_str();
  toy->add_option("--valid-size", toy_valid)->capture_default_str();
  toy->add_option("--test-size", toy_test)->capture_default_str();
  toy->callback([&] {
    run = [&] {
      PrintPaths(topaug::RunMakeToy(config, toy_train, toy_valid, toy_test));
      return topaug::kExitOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? topaug::kExitOk : topaug::kExitUsage;
  }

  try {
    if (cap > 0) config.subsample_cap = cap;
    config.Validate();
    return run();
  } catch (const topaug::StageError &e) {
    std::cerr << e.ToJson().dump() << "\n";
    return e.exit_code();
  } catch (const std::exception &e) {
    std::cerr << nlohmann::json{{"error", "InternalError"},
                                {"stage", "unknown"},
                                {"message", e.what()},
                                {"exit_code", topaug::kExitData}}
                     .dump()
              << "\n";
    return topaug::kExitData;
  }
}
