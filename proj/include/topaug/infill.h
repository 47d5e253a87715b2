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

// Template-conditioned generation of synthetic annotations.
//
// The built-in generator is a span infiller: each [mask] of a template is
// filled independently with a span drawn from the empirical distribution of
// spans observed at the same position in training annotations. Positions are
// keyed by their MaskContext and backed off through progressively coarser
// keys, ending at a global span table:
//
//   full context -> (parent label, slot index) -> parent label -> global
//
// Draws are restricted to the top-p nucleus of the selected distribution.
// External generators plug in through the line protocol in adapter.h.

#ifndef TOPAUG_INFILL_H_
#define TOPAUG_INFILL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "topaug/adapter.h"
#include "topaug/corpus.h"
#include "topaug/top_tree.h"

namespace topaug {

class InfillError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Position of a mask: labels from the root to the mask's parent, and the
// ordinal of the mask among the parent's masks.
struct MaskContext {
  std::vector<Label> path;
  int slot_index = 0;

  const Label &parent() const { return path.back(); }
  std::string Key() const;
  std::string ParentSlotKey() const;
  std::string ParentKey() const;
};

// Contexts of all masks of a template in pre-order.
std::vector<MaskContext> MaskContexts(const Template &tmpl);

struct WeightedSpan {
  Tokens span;
  double prob = 0.0;
};
using Distribution = std::vector<WeightedSpan>;

struct SpanCounts {
  std::map<Tokens, uint64_t> counts;
  uint64_t total = 0;

  void Add(const Tokens &span, uint64_t n = 1) {
    counts[span] += n;
    total += n;
  }
  // Relative frequencies in lexicographic span order.
  Distribution Normalize() const;
};

enum class BackoffLevel { kFull = 0, kParentSlot = 1, kParent = 2, kGlobal = 3 };

struct InfillerModel {
  std::map<std::string, SpanCounts> full;
  std::map<std::string, SpanCounts> parent_slot;
  std::map<std::string, SpanCounts> parent;
  SpanCounts global;
  std::set<std::string> vocabulary;  // labels and tokens

  // Most specific table with data for the context. Never null once fitted.
  const SpanCounts *Lookup(const MaskContext &context,
                           BackoffLevel *level) const;
};

// Tallies every mask's filler span under all backoff keys. Throws
// InfillError on an empty corpus.
InfillerModel FitInfiller(const Corpus &corpus);

// Smallest prefix of the distribution, sorted by probability descending and
// then by span, whose cumulative mass reaches p, renormalized. Throws
// InfillError on empty support or p outside (0, 1].
Distribution TopPTruncate(const Distribution &dist, double p);

// Cumulative mass comparisons allow this much rounding slack.
inline constexpr double kNucleusSlack = 1e-12;

enum class FilterVerdict { kPending, kKept, kDropped };
const char *FilterVerdictName(FilterVerdict verdict);

struct SyntheticSample {
  std::string template_key;
  std::string source;     // template in generator-source form
  std::string candidate;  // generator output as produced
  std::optional<ParseTree> tree;
  Tokens utterance;
  std::string generator_id;
  uint64_t seed = 0;  // stream seed of the template
  RejectReason rejection = RejectReason::kNone;
  std::string rejection_detail;
  FilterVerdict verdict = FilterVerdict::kPending;
  std::vector<int> backoff;  // per mask, built-in generator only

  bool valid() const { return rejection == RejectReason::kNone; }
  // Key used for deduplication: template key and utterance.
  std::string DedupKey() const;
};

std::string DedupKey(const std::string &template_key, const Tokens &utterance);

nlohmann::json SampleToJson(const SyntheticSample &sample);
SyntheticSample SampleFromJson(const nlohmann::json &json);
std::string SamplesToJsonl(const std::vector<SyntheticSample> &samples);
std::vector<SyntheticSample> SamplesFromJsonl(const std::string &text);

struct GenerateOptions {
  int k = 5;
  double p = 0.9;
  uint64_t seed = 0;
  bool dedup = true;
  // Draw templates uniformly with replacement (k * |templates| draws)
  // instead of k fillings for every template.
  bool with_replacement = false;
  // DedupKey()s of real data that synthetic samples must not repeat.
  std::set<std::string> exclusion;
  int jobs = 1;
};

struct GenerateStats {
  size_t drawn = 0;
  size_t duplicates = 0;
  size_t excluded = 0;
  size_t rejected = 0;
  std::map<int, size_t> backoff_histogram;  // level -> masks filled
};

inline constexpr char kBuiltinGeneratorId[] = "builtin-infiller";

std::vector<SyntheticSample> Generate(const InfillerModel &model,
                                      const std::vector<Template> &templates,
                                      const GenerateOptions &options,
                                      GenerateStats *stats = nullptr);

// Exclusion set holding every item of a corpus.
std::set<std::string> ExclusionSet(const Corpus &corpus);

struct ExternalGenerateResult {
  std::vector<SyntheticSample> samples;
  std::optional<AdapterError> error;
  GenerateStats stats;
};

// Sends each template (generator-source form) to the adapter and converts
// its k candidates with FromGeneratorOutput against `labels`. Candidates
// whose skeleton differs from the template are rejected as Structural.
ExternalGenerateResult ExternalGenerate(const AdapterOptions &adapter,
                                        const std::vector<Template> &templates,
                                        const GenerateOptions &options,
                                        const LabelSet &labels);

// Replaces the masks of a template with the given spans, in pre-order.
ParseTree FillTemplate(const Template &tmpl, const std::vector<Tokens> &spans);

}  // namespace topaug

#endif  // TOPAUG_INFILL_H_
