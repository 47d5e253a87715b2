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

// File-mediated pipeline stages behind the topaug command line.
//
// Every stage reads its inputs from files named in a PipelineConfig and
// writes its artifacts under the output directory. Each artifact is written
// to "<name>.partial" and renamed into place once complete, next to a
// "<name>.manifest.json" holding the config, seed, and SHA-256 digests of
// the inputs and of the artifact itself. Manifests carry no timestamps, so
// rerunning a stage on unchanged inputs reproduces every byte. When a stage
// fails after producing partial results, those go to "quarantine/" under
// the output directory instead.

#ifndef TOPAUG_PIPELINE_H_
#define TOPAUG_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "topaug/aux_parser.h"
#include "topaug/corpus.h"
#include "topaug/eval.h"
#include "topaug/infill.h"

namespace topaug {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitAdapter = 3;

// Error surfaced by a stage, with the exit code the command line reports.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, std::string kind, int exit_code,
             const std::string &message,
             std::vector<std::string> quarantined = {});

  const std::string &stage() const { return stage_; }
  const std::string &kind() const { return kind_; }
  int exit_code() const { return exit_code_; }
  const std::vector<std::string> &quarantined() const { return quarantined_; }

  // Machine-readable error record.
  nlohmann::json ToJson() const;

 private:
  std::string stage_;
  std::string kind_;
  int exit_code_;
  std::vector<std::string> quarantined_;
};

struct PipelineConfig {
  std::string train_path;
  std::string valid_path;
  std::string test_path;
  std::string out_dir = ".";
  std::string columns = "raw,tokens,tree";
  Split split = Split::kTrain;  // corpus read by single-corpus commands

  bool keep_unsupported = true;
  bool dedup = true;
  bool strict = false;

  int k = 5;
  double p = 0.9;
  std::vector<uint64_t> seeds = {0};
  bool with_replacement = false;
  SmoothingConfig smoothing;

  std::string generator = "builtin";  // or an external command line
  std::string parser = "builtin";     // auxiliary parser, same convention
  int adapter_timeout_ms = 30000;

  bool subsample = false;
  std::optional<size_t> subsample_cap;

  // Artifacts consumed by the file-mediated stages.
  std::string grammar_path;
  std::string samples_path;
  std::string report_name = "model";

  int jobs = 1;

  // Throws StageError("config", ..., kExitUsage) on invalid values.
  void Validate() const;
  nlohmann::json ToJson() const;
  uint64_t seed() const { return seeds.front(); }
  bool external_generator() const { return generator != "builtin"; }
  bool external_parser() const { return parser != "builtin"; }
};

std::string Sha256Hex(const std::string &bytes);
std::string ReadFile(const std::filesystem::path &path);

// Digest entry for one input file.
nlohmann::json InputDigest(const std::string &role,
                           const std::filesystem::path &path);

// Writes one artifact atomically plus its manifest. Returns the final path.
std::filesystem::path CommitArtifact(const std::filesystem::path &path,
                                     const std::string &content,
                                     nlohmann::json manifest);

// Writes partial output under <out_dir>/quarantine/. Returns its path.
std::filesystem::path QuarantineArtifact(const std::filesystem::path &out_dir,
                                         const std::string &name,
                                         const std::string &content,
                                         nlohmann::json manifest);

// Loads the corpus of a split per the config's column layout, strictness
// and UNSUPPORTED flag. Throws StageError with kExitData.
Corpus LoadSplit(const PipelineConfig &config, Split split);
const std::string &SplitPath(const PipelineConfig &config, Split split);

// "count<TAB>template" lines by descending frequency.
std::string TemplatesTsv(const FrequencyTable &table);

// "source<TAB>target" generator pairs, one per item.
std::string GeneratorPairsTsv(const Corpus &corpus);

// Training trees: a corpus plus the Kept samples of a filtered set.
std::vector<ParseTree> UnionTrees(const Corpus &real,
                                  const std::vector<SyntheticSample> &samples);

// Stages. Each writes its artifacts and returns the paths written.
std::vector<std::filesystem::path> RunStats(const PipelineConfig &config);
std::vector<std::filesystem::path> RunTemplates(const PipelineConfig &config);
std::vector<std::filesystem::path> RunMakePairs(const PipelineConfig &config);
std::vector<std::filesystem::path> RunGenerate(const PipelineConfig &config);
std::vector<std::filesystem::path> RunFilter(const PipelineConfig &config);
std::vector<std::filesystem::path> RunTrainParser(const PipelineConfig &config);
std::vector<std::filesystem::path> RunEval(const PipelineConfig &config);
std::vector<std::filesystem::path> RunSubsample(const PipelineConfig &config);

struct SeedOutcome {
  uint64_t seed = 0;
  EvalReport baseline;
  EvalReport augmented;
  DeltaTable delta;
  FilterReport filter;
  GenerateStats generation;
};

struct AugmentOutcome {
  std::vector<SeedOutcome> runs;
  std::optional<SeedSummary> baseline_summary;   // two or more seeds
  std::optional<SeedSummary> augmented_summary;
  std::vector<std::filesystem::path> artifacts;
};

// induce -> generate -> filter -> retrain on real + kept -> evaluate, once
// per seed. In low-resource mode the training split is first subsampled with
// the run's seed and every component trains on the subsample.
AugmentOutcome RunAugment(const PipelineConfig &config);

// Writes toy_train.tsv, toy_valid.tsv and toy_test.tsv from the fixed toy
// treebank.
std::vector<std::filesystem::path> RunMakeToy(const PipelineConfig &config,
                                              size_t train_size,
                                              size_t valid_size,
                                              size_t test_size);

}  // namespace topaug

#endif  // TOPAUG_PIPELINE_H_
