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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "test_util.h"
#include "topaug/toy_treebank.h"

namespace topaug {
namespace {

namespace fs = std::filesystem;

const char kTrain[] =
    "how far is boston\thow far is boston\t"
    "[IN:GET_DISTANCE how far is [SL:DESTINATION boston ] ]\n"
    "how far is work\thow far is work\t"
    "[IN:GET_DISTANCE how far is [SL:DESTINATION work ] ]\n"
    "how long to drive to work\thow long to drive to work\t"
    "[IN:GET_ESTIMATED_DURATION how long to [SL:METHOD_TRAVEL drive ] to "
    "[SL:DESTINATION work ] ]\n"
    "traffic now\ttraffic now\t[IN:GET_INFO_TRAFFIC traffic "
    "[SL:DATE_TIME now ] ]\n"
    "sing me a song\tsing me a song\t[IN:UNSUPPORTED_NAVIGATION sing me a "
    "song ]\n";

void WriteText(const fs::path &path, const std::string &text) {
  std::ofstream(path, std::ios::binary) << text;
}

size_t CountLines(const std::string &text) {
  return static_cast<size_t>(std::count(text.begin(), text.end(), '\n'));
}

PipelineConfig BaseConfig(const fs::path &dir) {
  PipelineConfig c;
  c.train_path = (dir / "train.tsv").string();
  WriteText(c.train_path, kTrain);
  c.out_dir = (dir / "out").string();
  return c;
}

TEST(ConfigTest, RejectsInvalidValues) {
  PipelineConfig c;
  c.k = 0;
  try {
    c.Validate();
    FAIL() << "k=0 accepted";
  } catch (const StageError &e) {
    EXPECT_EQ(e.exit_code(), kExitUsage);
    EXPECT_EQ(e.kind(), "InvalidConfig");
    EXPECT_EQ(e.ToJson()["stage"], "config");
  }
  c.k = 1;
  c.p = 1.5;
  EXPECT_THROW(c.Validate(), StageError);
  c.p = 0.5;
  c.seeds.clear();
  EXPECT_THROW(c.Validate(), StageError);
  c.seeds = {1};
  EXPECT_NO_THROW(c.Validate());
}

TEST(ArtifactTest, Sha256MatchesKnownDigest) {
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(Sha256Hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(ArtifactTest, CommitWritesManifestAndNoPartial) {
  fs::path dir = testing::ScratchDir("commit");
  fs::path p = CommitArtifact(dir / "a.txt", "hello\n", {{"stage", "t"}});
  EXPECT_EQ(ReadFile(p), "hello\n");
  EXPECT_FALSE(fs::exists(dir / "a.txt.partial"));
  auto m = nlohmann::json::parse(ReadFile(dir / "a.txt.manifest.json"));
  EXPECT_EQ(m["sha256"], Sha256Hex("hello\n"));
  EXPECT_EQ(m["artifact"], "a.txt");
  EXPECT_EQ(m["stage"], "t");
}

TEST(StageTest, MakePairsOnOneTree) {
  fs::path dir = testing::ScratchDir("pairs");
  PipelineConfig c = BaseConfig(dir);
  WriteText(c.train_path,
            "[IN:GET_DISTANCE how far is [SL:DESTINATION boston ] ]\n");
  c.columns = "tree";
  RunMakePairs(c);
  EXPECT_EQ(ReadFile(fs::path(c.out_dir) / "pairs.tsv"),
            "[in:get_distance [mask] [sl:destination [mask] sl:destination] "
            "in:get_distance]\t[in:get_distance how far is [sl:destination "
            "boston sl:destination] in:get_distance]\n");
}

TEST(StageTest, StatsAndTemplatesRespectUnsupportedFlag) {
  fs::path dir = testing::ScratchDir("stats");
  PipelineConfig c = BaseConfig(dir);
  RunStats(c);
  RunTemplates(c);
  auto stats = nlohmann::json::parse(ReadFile(fs::path(c.out_dir) / "stats.json"));
  EXPECT_EQ(stats["items"], 5);
  EXPECT_EQ(stats["distinct_templates"], 4);
  EXPECT_EQ(stats["provenance"]["inputs"][0]["sha256"],
            Sha256Hex(ReadFile(c.train_path)));
  const std::string templates = ReadFile(fs::path(c.out_dir) / "templates.tsv");
  EXPECT_EQ(templates.substr(0, 2), "2\t");
  EXPECT_EQ(CountLines(templates), 4u);
  c.keep_unsupported = false;
  RunStats(c);
  stats = nlohmann::json::parse(ReadFile(fs::path(c.out_dir) / "stats.json"));
  EXPECT_EQ(stats["items"], 4);
}

TEST(StageTest, GenerateFilterIsReproducible) {
  fs::path dir = testing::ScratchDir("repro");
  PipelineConfig c = BaseConfig(dir);
  c.seeds = {7};
  auto run = [&] {
    RunGenerate(c);
    PipelineConfig t = c;
    RunTrainParser(t);
    PipelineConfig f = c;
    f.grammar_path = (fs::path(c.out_dir) / "grammar.json").string();
    f.samples_path = (fs::path(c.out_dir) / "candidates.jsonl").string();
    RunFilter(f);
    std::string all;
    for (const char *name :
         {"candidates.jsonl", "candidates.jsonl.manifest.json", "grammar.json",
          "filtered.jsonl", "filter_report.json",
          "filtered.jsonl.manifest.json"}) {
      all += ReadFile(fs::path(c.out_dir) / name);
    }
    return all;
  };
  const std::string first = run();
  const std::string second = run();
  EXPECT_EQ(first, second);
  EXPECT_EQ(first.find("timestamp"), std::string::npos);

  auto m = nlohmann::json::parse(
      ReadFile(fs::path(c.out_dir) / "candidates.jsonl.manifest.json"));
  EXPECT_EQ(m["seed"], 7);
  EXPECT_EQ(m["generator_id"], kBuiltinGeneratorId);
  EXPECT_EQ(m["sha256"],
            Sha256Hex(ReadFile(fs::path(c.out_dir) / "candidates.jsonl")));
  EXPECT_EQ(m["config"]["k"], 5);
}

TEST(StageTest, FilterRequiresItsInputs) {
  fs::path dir = testing::ScratchDir("filter_inputs");
  PipelineConfig c = BaseConfig(dir);
  try {
    RunFilter(c);
    FAIL();
  } catch (const StageError &e) {
    EXPECT_EQ(e.exit_code(), kExitUsage);
    EXPECT_EQ(e.kind(), "MissingInput");
  }
}

TEST(StageTest, MalformedCorpusIsADataError) {
  fs::path dir = testing::ScratchDir("malformed");
  PipelineConfig c = BaseConfig(dir);
  WriteText(c.train_path, "a\ta\t[IN:A a\n");
  try {
    RunStats(c);
    FAIL();
  } catch (const StageError &e) {
    EXPECT_EQ(e.exit_code(), kExitData);
  }
}

TEST(StageTest, AdapterFailureQuarantinesPartialOutput) {
  fs::path dir = testing::ScratchDir("quarantine");
  PipelineConfig c = BaseConfig(dir);
  c.generator = std::string(ECHO_ADAPTER_PATH) + " generate crash";
  c.adapter_timeout_ms = 5000;
  try {
    RunGenerate(c);
    FAIL();
  } catch (const StageError &e) {
    EXPECT_EQ(e.exit_code(), kExitAdapter);
    EXPECT_EQ(e.kind(), "AdapterCrashed");
    ASSERT_EQ(e.quarantined().size(), 1u);
    EXPECT_TRUE(fs::exists(e.quarantined()[0]));
  }
  EXPECT_FALSE(fs::exists(fs::path(c.out_dir) / "candidates.jsonl"));
  auto m = nlohmann::json::parse(ReadFile(
      fs::path(c.out_dir) / "quarantine" / "candidates.jsonl.manifest.json"));
  EXPECT_EQ(m["quarantined"], true);
}

TEST(StageTest, ExternalGeneratorAndParser) {
  fs::path dir = testing::ScratchDir("external");
  PipelineConfig c = BaseConfig(dir);
  c.generator = std::string(ECHO_ADAPTER_PATH) + " generate ok";
  RunGenerate(c);
  PipelineConfig f = c;
  f.parser = std::string(ECHO_ADAPTER_PATH) + " parse ok";
  f.samples_path = (fs::path(c.out_dir) / "candidates.jsonl").string();
  RunFilter(f);
  auto report = nlohmann::json::parse(
      ReadFile(fs::path(c.out_dir) / "filter_report.json"));
  // The echo parser answers IN:ECHO, so nothing re-parses to its own tree.
  EXPECT_GT(report["overall"]["total"].get<int>(), 0);
  EXPECT_EQ(report["overall"]["kept"], 0);
}

TEST(StageTest, SubsampleWritesOneFilePerSeed) {
  fs::path dir = testing::ScratchDir("subsample");
  PipelineConfig c = BaseConfig(dir);
  c.seeds = {1, 2, 3};
  auto paths = RunSubsample(c);
  ASSERT_EQ(paths.size(), 3u);
  for (const fs::path &p : paths) {
    EXPECT_EQ(CountLines(ReadFile(p)), 4u) << p;
  }
}

TEST(AugmentTest, AugmentedSizeIsRealPlusKept) {
  fs::path dir = testing::ScratchDir("augment");
  PipelineConfig c;
  c.train_path = (dir / "train.tsv").string();
  c.test_path = (dir / "test.tsv").string();
  WriteText(c.train_path, ToTsv(SampleToyCorpus(300, 11, Split::kTrain)));
  WriteText(c.test_path, ToTsv(SampleToyCorpus(100, 12, Split::kTest)));
  c.out_dir = (dir / "out").string();
  c.seeds = {1, 2};
  AugmentOutcome outcome = RunAugment(c);
  ASSERT_EQ(outcome.runs.size(), 2u);
  ASSERT_TRUE(outcome.augmented_summary.has_value());
  for (const SeedOutcome &run : outcome.runs) {
    const fs::path seed_dir =
        fs::path(c.out_dir) / ("seed_" + std::to_string(run.seed));
    size_t kept = 0;
    for (const SyntheticSample &s :
         SamplesFromJsonl(ReadFile(seed_dir / "filtered.jsonl"))) {
      kept += s.verdict == FilterVerdict::kKept;
    }
    EXPECT_EQ(run.augmented.samples.real, 300u);
    EXPECT_EQ(run.augmented.samples.synthetic_kept, kept);
    EXPECT_EQ(CountLines(ReadFile(seed_dir / "augmented_train.tsv")),
              300u + kept);
    EXPECT_EQ(run.baseline.overall.total, 100u);
  }
  EXPECT_TRUE(fs::exists(fs::path(c.out_dir) / "augment_summary.json"));
}

int RunCli(const std::string &args, std::string *stderr_text = nullptr) {
  fs::path err = testing::ScratchDir("cli_err") / "stderr.txt";
  const std::string command =
      std::string(TOPAUG_CLI_PATH) + " " + args + " >/dev/null 2>" + err.string();
  const int status = std::system(command.c_str());
  if (stderr_text) *stderr_text = ReadFile(err);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, ExitCodes) {
  fs::path dir = testing::ScratchDir("cli");
  PipelineConfig c = BaseConfig(dir);
  const std::string common = " --train " + c.train_path + " --out " + c.out_dir;
  EXPECT_EQ(RunCli(""), kExitUsage);
  EXPECT_EQ(RunCli("frobnicate"), kExitUsage);
  EXPECT_EQ(RunCli("stats" + common), kExitOk);
  EXPECT_EQ(RunCli("generate -k 0" + common), kExitUsage);
  EXPECT_EQ(RunCli("stats --train /nonexistent.tsv"), kExitData);
  std::string err;
  EXPECT_EQ(RunCli("generate" + common + " --generator '" +
                       std::string(ECHO_ADAPTER_PATH) + " generate garbage'",
                   &err),
            kExitAdapter);
  auto record = nlohmann::json::parse(err);
  EXPECT_EQ(record["error"], "ProtocolViolation");
  EXPECT_EQ(record["stage"], "generate");
  EXPECT_EQ(record["exit_code"], kExitAdapter);
}

}  // namespace
}  // namespace topaug
