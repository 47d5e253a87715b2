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

// Treebank PCFG and exact CKY decoder, used as the auxiliary parser that
// filters synthetic samples and as the target parser in experiments.
//
// Grammar symbols:
//
//   TOP            start symbol; TOP -> IN:X
//   IN:X, SL:Y     one per label
//   IN:X/B, IN:X/I token preterminals under IN:X; B marks the first token
//                  of a maximal run, I a continuation
//   @IN:X>c        left-factored prefix of IN:X's children ending in c
//
// A node X with children c1 .. cn (n >= 2) is binarized as
//
//   X -> @X>c(n-1) cn,   @X>ci -> @X>c(i-1) ci,   @X>c1 -> c1
//
// i.e. left-factored with horizontal markovization of order 1. Each rule's
// probability is its relative frequency with additive smoothing over the
// set of rules that keep debinarized trees valid: any child observed under
// X may follow any other, except that I only follows a token and B never
// does. Tokens are emitted by preterminals; a reserved mass spreads over
// every word a preterminal did not emit in training, plus one OOV class.

#ifndef TOPAUG_AUX_PARSER_H_
#define TOPAUG_AUX_PARSER_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "topaug/adapter.h"
#include "topaug/corpus.h"
#include "topaug/infill.h"
#include "topaug/top_tree.h"

namespace topaug {

class GrammarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct SmoothingConfig {
  double rule_smoothing = 0.01;
  double unknown_mass = 1e-4;
};

enum class SymbolKind { kRoot, kLabel, kPreterminal, kIntermediate };

struct Symbol {
  SymbolKind kind = SymbolKind::kLabel;
  Label label;           // the label, or the parent label of pre/mid
  char position = 0;     // 'B' or 'I' for preterminals
  int last_child = -1;   // intermediates: symbol id of the last child
  std::string name;
};

struct Rule {
  int lhs = -1;
  int left = -1;
  int right = -1;  // -1 for unary rules
  double log_prob = kNegInf;

  bool unary() const { return right < 0; }
};

struct Lexicon {
  std::map<std::string, double> log_probs;
  double unknown_log_prob = kNegInf;

  double LogProb(const std::string &word) const {
    auto it = log_probs.find(word);
    return it == log_probs.end() ? unknown_log_prob : it->second;
  }
};

class Grammar {
 public:
  const std::vector<Symbol> &symbols() const { return symbols_; }
  const std::vector<Rule> &rules() const { return rules_; }
  const SmoothingConfig &config() const { return config_; }
  int root() const { return 0; }

  std::optional<int> SymbolId(const std::string &name) const;
  std::optional<int> FindRule(int lhs, int left, int right) const;
  // Lexicon of a preterminal symbol; empty lexicon for other symbols.
  const Lexicon &LexiconOf(int symbol) const;

  // Log-probability of the unique derivation of `tree`, or kNegInf.
  double ScoreTree(const ParseTree &tree) const;

  // Binarized derivation of a tree as rule indices plus (preterminal, word)
  // emissions; nullopt when a rule is missing from the grammar.
  struct Derivation {
    std::vector<int> rules;
    std::vector<std::pair<int, std::string>> emissions;
  };
  std::optional<Derivation> Derive(const ParseTree &tree) const;

  nlohmann::json ToJson() const;
  static Grammar FromJson(const nlohmann::json &json);

  // Decoder indexes.
  const std::vector<std::vector<int>> &binary_by_left() const {
    return binary_by_left_;
  }
  const std::vector<int> &unary_rules() const { return unary_rules_; }
  const std::vector<int> &preterminals() const { return preterminals_; }

 private:
  friend class GrammarBuilder;
  void Index();

  SmoothingConfig config_;
  std::vector<Symbol> symbols_;
  std::vector<Rule> rules_;
  std::vector<Lexicon> lexicon_;  // per symbol
  std::map<std::string, int> symbol_ids_;
  std::map<std::tuple<int, int, int>, int> rule_ids_;
  size_t vocabulary_size_ = 0;
  std::vector<std::vector<int>> binary_by_left_;
  std::vector<int> unary_rules_;
  std::vector<int> preterminals_;
};

// Reads off and estimates the grammar. Throws GrammarError on an empty
// corpus or bad config.
Grammar InduceGrammar(const Corpus &corpus, const SmoothingConfig &config = {});
Grammar InduceGrammar(const std::vector<ParseTree> &trees,
                      const SmoothingConfig &config = {});

struct ChartStats {
  size_t cells_filled = 0;
  size_t entries = 0;
  size_t pruned = 0;  // candidates that lost to an existing entry
};

struct ParseResult {
  std::optional<ParseTree> tree;
  double log_prob = kNegInf;
  ChartStats chart;
};

// Viterbi CKY. Equal scores go to the lower rule index, then the smaller
// split point. Returns no tree when the sentence has no derivation.
ParseResult CkyParse(const Grammar &grammar, const Tokens &tokens);

// Maps a token sequence to a tree, or nullopt for no parse.
using ParserFn = std::function<std::optional<ParseTree>(const Tokens &)>;

ParserFn MakeCkyParser(const Grammar &grammar);

bool ExactMatch(const std::optional<ParseTree> &predicted,
                const ParseTree &gold);

struct KeepRate {
  size_t kept = 0;
  size_t total = 0;

  // nullopt for 0-of-0.
  std::optional<double> rate() const {
    if (total == 0) return std::nullopt;
    return static_cast<double>(kept) / static_cast<double>(total);
  }
};

struct FilterReport {
  KeepRate overall;
  KeepRate buckets[kNumBuckets];
  size_t skipped_invalid = 0;

  nlohmann::json ToJson() const;
};

// Sets each valid sample's verdict to Kept iff the parser reproduces its
// tree from its utterance. Rejected samples stay Pending and are skipped.
// With train stats, keep rates are also broken down by frequency bucket.
std::vector<SyntheticSample> FilterSynthetic(
    const ParserFn &parser, std::vector<SyntheticSample> samples,
    FilterReport *report = nullptr,
    const FrequencyTable *train_stats = nullptr, int jobs = 1);

// Parses every utterance through an external parser adapter. Requests are
// {"id", "utterance"}, responses {"id", "tree"} with a canonical tree or
// null. Unparseable trees count as no parse.
struct ExternalParseResult {
  std::vector<std::optional<ParseTree>> trees;  // aligned with input
  std::optional<AdapterError> error;
};
ExternalParseResult ExternalParse(const AdapterOptions &adapter,
                                  const std::vector<Tokens> &utterances);

// Parser that answers from a table of precomputed results.
ParserFn MakeLookupParser(
    std::map<Tokens, std::optional<ParseTree>> table);

}  // namespace topaug

#endif  // TOPAUG_AUX_PARSER_H_
