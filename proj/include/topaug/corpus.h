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

// Annotated corpora, template frequency statistics and subsampling.

#ifndef TOPAUG_CORPUS_H_
#define TOPAUG_CORPUS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "topaug/top_tree.h"

namespace topaug {

enum class Split { kTrain, kValid, kTest };

const char *SplitName(Split split);

struct AnnotatedUtterance {
  std::string raw;
  Tokens tokens;
  ParseTree tree;
  std::string template_key;

  // Derives tokens and template key from the tree. `raw` defaults to the
  // joined tokens.
  static AnnotatedUtterance FromTree(ParseTree tree, std::string raw = "");
};

struct Corpus {
  Split split = Split::kTrain;
  std::vector<AnnotatedUtterance> items;

  size_t size() const { return items.size(); }
  LabelSet Labels() const;
};

// Column indices of a TSV line; -1 marks an absent column. The default is
// the public TOP release layout: raw, tokenized, tree.
struct ColumnLayout {
  int raw = 0;
  int tokens = 1;
  int tree = 2;

  static ColumnLayout TreeOnly() { return {-1, -1, 0}; }
  // Parses "raw,tokens,tree" style specs: a comma separated list naming the
  // role of each column, e.g. "tree" or "raw,tokens,tree".
  static ColumnLayout FromSpec(const std::string &spec);
};

struct LineError {
  size_t line = 0;  // 1-based
  std::string message;
};

struct LoadReport {
  std::vector<LineError> errors;
  // Lines whose tokenized column disagrees with the tree's terminals. The
  // tree wins; these are counted, not rejected.
  size_t token_mismatches = 0;
};

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadOptions {
  ColumnLayout layout;
  Split split = Split::kTrain;
  bool strict = false;  // abort on the first bad line
};

// Loads a TSV file. Throws CorpusError when the file cannot be read, when a
// line is bad in strict mode, or when no line survives.
Corpus LoadTsv(const std::string &path, const LoadOptions &options,
               LoadReport *report = nullptr);
Corpus LoadTsvFromString(const std::string &content,
                         const LoadOptions &options,
                         LoadReport *report = nullptr);

// Writes raw, tokens, tree columns.
std::string ToTsv(const Corpus &corpus);

struct FrequencyTable {
  std::map<std::string, uint64_t> counts;
  uint64_t total = 0;

  uint64_t count(const std::string &key) const {
    auto it = counts.find(key);
    return it == counts.end() ? 0 : it->second;
  }
  size_t distinct() const { return counts.size(); }

  // (key, count) ordered by count descending, ties by key.
  std::vector<std::pair<std::string, uint64_t>> RankFrequency() const;
  // Share of items whose template is among the k most frequent.
  double TopKMass(size_t k) const;
  // Share of items whose template occurs exactly once.
  double SingletonFraction() const;
};

FrequencyTable TemplateStats(const Corpus &corpus);

// JSON report: split, size, distinct templates, top-k masses, singleton
// fraction and the rank-frequency series.
nlohmann::json StatsToJson(const FrequencyTable &table, Split split);
// "rank,count,key" lines with a header, for power-law plots.
std::string RankFrequencyCsv(const FrequencyTable &table);

bool IsUnsupported(const AnnotatedUtterance &item);

// Drops items whose root intent name starts with "UNSUPPORTED".
Corpus FilterUnsupported(const Corpus &corpus);

// One item per distinct template, chosen uniformly with a seeded Rng. With a
// cap below the template count, `cap` templates are first chosen uniformly.
// Output keeps the input order.
Corpus SubsampleOnePerTemplate(const Corpus &corpus, uint64_t seed,
                               std::optional<size_t> cap = std::nullopt);

enum class Bucket { kFrequent = 0, kRare = 1, kUnseen = 2 };
inline constexpr int kNumBuckets = 3;

// f>=5, 1<=f<5, f=0.
const char *BucketName(Bucket bucket);
Bucket FrequencyBucket(const FrequencyTable &train_stats,
                       const std::string &key);

// Distinct templates in first-appearance order.
std::vector<Template> DistinctTemplates(const Corpus &corpus);

}  // namespace topaug

#endif  // TOPAUG_CORPUS_H_
