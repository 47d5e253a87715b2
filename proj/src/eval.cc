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

#include "topaug/eval.h"

#include <cmath>
#include <cstdio>

#include "topaug/parallel.h"

namespace topaug {
namespace {

nlohmann::json TallyJson(const Tally &t) {
  return {{"matched", t.matched}, {"total", t.total}, {"accuracy", t.accuracy()}};
}

Tally TallyFromJson(const nlohmann::json &j) {
  return {j.at("matched").get<size_t>(), j.at("total").get<size_t>()};
}

std::string Fixed(double value, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

std::string Signed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%+.2f", value);
  return buf;
}

std::string Grouped(size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

std::string Pad(const std::string &s, size_t width) {
  // Pads to a width in bytes.
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

nlohmann::json EvalReport::ToJson() const {
  nlohmann::json j;
  j["name"] = name;
  j["overall"] = TallyJson(overall);
  for (int b = 0; b < kNumBuckets; ++b) {
    j["buckets"][BucketName(static_cast<Bucket>(b))] = TallyJson(buckets[b]);
  }
  j["samples"] = {{"real", samples.real},
                  {"synthetic_generated", samples.synthetic_generated},
                  {"synthetic_kept", samples.synthetic_kept},
                  {"training_total", samples.training_total()}};
  return j;
}

EvalReport EvalReport::FromJson(const nlohmann::json &j) {
  EvalReport r;
  r.name = j.value("name", "");
  r.overall = TallyFromJson(j.at("overall"));
  for (int b = 0; b < kNumBuckets; ++b) {
    r.buckets[b] =
        TallyFromJson(j.at("buckets").at(BucketName(static_cast<Bucket>(b))));
  }
  if (j.contains("samples")) {
    r.samples.real = j["samples"].value("real", size_t{0});
    r.samples.synthetic_generated =
        j["samples"].value("synthetic_generated", size_t{0});
    r.samples.synthetic_kept = j["samples"].value("synthetic_kept", size_t{0});
  }
  return r;
}

EvalReport Evaluate(const ParserFn &parser, const Corpus &test,
                    const FrequencyTable &train_stats, int jobs) {
  std::vector<char> matched(test.items.size(), 0);
  ParallelFor(test.items.size(), jobs, [&](size_t i) {
    const AnnotatedUtterance &item = test.items[i];
    matched[i] = ExactMatch(parser(item.tokens), item.tree);
  });
  EvalReport report;
  for (size_t i = 0; i < test.items.size(); ++i) {
    Tally &bucket = report.buckets[static_cast<int>(
        FrequencyBucket(train_stats, test.items[i].template_key))];
    ++bucket.total;
    ++report.overall.total;
    if (matched[i]) {
      ++bucket.matched;
      ++report.overall.matched;
    }
  }
  return report;
}

nlohmann::json DeltaTable::ToJson() const {
  nlohmann::json j;
  j["overall_pp"] = overall;
  for (int b = 0; b < kNumBuckets; ++b) {
    j["buckets_pp"][BucketName(static_cast<Bucket>(b))] = buckets[b];
  }
  return j;
}

DeltaTable Compare(const EvalReport &baseline, const EvalReport &augmented) {
  if (baseline.overall.total != augmented.overall.total) {
    throw EvalError("MismatchedTotals: " +
                    std::to_string(baseline.overall.total) + " vs " +
                    std::to_string(augmented.overall.total) + " test items");
  }
  DeltaTable delta;
  delta.overall =
      100.0 * (augmented.overall.accuracy() - baseline.overall.accuracy());
  for (int b = 0; b < kNumBuckets; ++b) {
    if (baseline.buckets[b].total != augmented.buckets[b].total) {
      throw EvalError(std::string("MismatchedTotals in bucket ") +
                      BucketName(static_cast<Bucket>(b)));
    }
    delta.buckets[b] =
        100.0 * (augmented.buckets[b].accuracy() - baseline.buckets[b].accuracy());
  }
  return delta;
}

std::string SeedSummary::Render() const {
  return Fixed(100.0 * mean) + " ± " + Fixed(100.0 * sd);
}

nlohmann::json SeedSummary::ToJson() const {
  return {{"runs", runs},
          {"mean", mean},
          {"sd", sd},
          {"variance", variance},
          {"se", se},
          {"spread_statistic", "sample standard deviation (n-1)"},
          {"rendered", Render()}};
}

SeedSummary MultiSeedSummary(const std::vector<double> &accuracies) {
  if (accuracies.size() < 2) {
    throw EvalError("TooFewRuns: need at least two runs, got " +
                    std::to_string(accuracies.size()));
  }
  SeedSummary s;
  s.runs = accuracies.size();
  double sum = 0.0;
  for (double a : accuracies) sum += a;
  s.mean = sum / static_cast<double>(s.runs);
  double squares = 0.0;
  for (double a : accuracies) squares += (a - s.mean) * (a - s.mean);
  s.variance = squares / static_cast<double>(s.runs - 1);
  s.sd = std::sqrt(s.variance);
  s.se = s.sd / std::sqrt(static_cast<double>(s.runs));
  return s;
}

SeedSummary MultiSeedSummary(const std::vector<EvalReport> &reports) {
  std::vector<double> accuracies;
  for (const EvalReport &r : reports) accuracies.push_back(r.overall.accuracy());
  return MultiSeedSummary(accuracies);
}

std::string RenderResultsTable(const std::vector<EvalReport> &reports) {
  std::string out;
  out += Pad("Training data", 16) + Pad("#Samples", 10) + "Acc (%)\n";
  for (size_t i = 0; i < reports.size(); ++i) {
    const EvalReport &r = reports[i];
    std::string acc = Fixed(100.0 * r.overall.accuracy());
    if (i > 0) {
      acc += " (" +
             Signed(100.0 * (r.overall.accuracy() -
                             reports[0].overall.accuracy())) +
             ")";
    }
    out += Pad(r.name, 16) + Pad(Grouped(r.samples.training_total()), 10) +
           acc + "\n";
  }
  out += "\n";
  out += Pad("Training data", 16);
  for (int b = 0; b < kNumBuckets; ++b) {
    out += Pad(BucketName(static_cast<Bucket>(b)), 9);
  }
  out += "\n";
  for (const EvalReport &r : reports) {
    out += Pad(r.name, 16);
    for (int b = 0; b < kNumBuckets; ++b) {
      out += Pad(Fixed(100.0 * r.buckets[b].accuracy()), 9);
    }
    out += "\n";
  }
  if (reports.size() >= 2) {
    out += Pad("Δ", 17);
    for (int b = 0; b < kNumBuckets; ++b) {
      out += Pad(Fixed(100.0 * (reports.back().buckets[b].accuracy() -
                                reports.front().buckets[b].accuracy())),
                 9);
    }
    out += "\n";
  }
  return out;
}

}  // namespace topaug
