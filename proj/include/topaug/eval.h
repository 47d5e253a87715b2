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

// Exact-match evaluation with template-frequency buckets.

#ifndef TOPAUG_EVAL_H_
#define TOPAUG_EVAL_H_

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "topaug/aux_parser.h"
#include "topaug/corpus.h"

namespace topaug {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tally {
  size_t matched = 0;
  size_t total = 0;

  double accuracy() const {
    return total == 0 ? 0.0
                      : static_cast<double>(matched) / static_cast<double>(total);
  }
  bool operator==(const Tally &) const = default;
};

struct SampleCounts {
  size_t real = 0;
  size_t synthetic_generated = 0;
  size_t synthetic_kept = 0;

  size_t training_total() const { return real + synthetic_kept; }
};

struct EvalReport {
  std::string name;
  Tally overall;
  std::array<Tally, kNumBuckets> buckets;
  SampleCounts samples;

  nlohmann::json ToJson() const;
  static EvalReport FromJson(const nlohmann::json &json);
};

// Exact match of the parser on every test item, bucketed by the template's
// training frequency. NoParse counts as a miss.
EvalReport Evaluate(const ParserFn &parser, const Corpus &test,
                    const FrequencyTable &train_stats, int jobs = 1);

// Signed differences in percentage points.
struct DeltaTable {
  double overall = 0.0;
  std::array<double, kNumBuckets> buckets{};

  nlohmann::json ToJson() const;
};

// Throws EvalError (MismatchedTotals) unless both reports cover the same
// test set and bucketing.
DeltaTable Compare(const EvalReport &baseline, const EvalReport &augmented);

struct SeedSummary {
  size_t runs = 0;
  double mean = 0.0;
  double sd = 0.0;        // sample standard deviation (n - 1)
  double variance = 0.0;  // sample variance
  double se = 0.0;        // standard error of the mean

  // "72.24 ± 0.05" in percent, with the sample standard deviation.
  std::string Render() const;
  nlohmann::json ToJson() const;
};

// Mean and spread of overall accuracy. Throws EvalError (TooFewRuns) for
// fewer than two reports.
SeedSummary MultiSeedSummary(const std::vector<EvalReport> &reports);
SeedSummary MultiSeedSummary(const std::vector<double> &accuracies);

// Plain-text tables in the layout of the usual results tables: one row per
// report with sample count and accuracy, deltas against the first row in
// parentheses, then the frequency-bucket breakdown with a delta row.
std::string RenderResultsTable(const std::vector<EvalReport> &reports);

}  // namespace topaug

#endif  // TOPAUG_EVAL_H_
