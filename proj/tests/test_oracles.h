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

// Reference implementations used to check the library against first
// principles: grammar scoring, derivation search and nucleus truncation.

#ifndef TOPAUG_TESTS_TEST_ORACLES_H_
#define TOPAUG_TESTS_TEST_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "topaug/aux_parser.h"
#include "topaug/infill.h"

namespace topaug::testing {

// Log-probability of a tree, from rule and lexicon lookups alone.
class TreeScorer {
 public:
  explicit TreeScorer(const Grammar &g) : g_(g) {}

  double Score(const ParseTree &tree) const {
    auto top = g_.SymbolId("TOP");
    auto root = g_.SymbolId(tree.root.label.ToString());
    if (!top || !root) return kNegInf;
    return Rule(*top, *root, -1) + Node(tree.root);
  }

 private:
  double Rule(int lhs, int left, int right) const {
    auto r = g_.FindRule(lhs, left, right);
    return r ? g_.rules()[*r].log_prob : kNegInf;
  }

  std::optional<int> Id(const std::string &name) const {
    return g_.SymbolId(name);
  }

  double Node(const topaug::Node &node) const {
    const std::string x = node.label.ToString();
    std::vector<std::string> names;
    double score = 0.0;
    bool after_token = false;
    for (const topaug::Node &child : node.children) {
      if (child.kind == NodeKind::kToken) {
        names.push_back(x + (after_token ? "/I" : "/B"));
        after_token = true;
        auto id = Id(names.back());
        if (!id) return kNegInf;
        score += g_.LexiconOf(*id).LogProb(child.text);
      } else {
        names.push_back(child.label.ToString());
        after_token = false;
        score += Node(child);
      }
    }
    auto sym = [&](const std::string &name) { return Id(name).value_or(-2); };
    auto mid = [&](size_t i) { return sym("@" + x + ">" + names[i]); };
    const size_t n = names.size();
    for (const std::string &name : names) {
      if (!Id(name)) return kNegInf;
    }
    if (n == 1) return score + Rule(sym(x), sym(names[0]), -1);
    if (mid(n - 2) < 0) return kNegInf;
    score += Rule(sym(x), mid(n - 2), sym(names[n - 1]));
    for (size_t i = n - 2; i >= 1; --i) {
      if (mid(i) < 0 || mid(i - 1) < 0) return kNegInf;
      score += Rule(mid(i), mid(i - 1), sym(names[i]));
    }
    return score + Rule(mid(0), sym(names[0]), -1);
  }

  const Grammar &g_;
};

// Best derivation score from TOP over `tokens`, computed top-down over
// every rule, split point and bounded unary chain.
class DerivationSearch {
 public:
  DerivationSearch(const Grammar &g, const Tokens &tokens)
      : g_(g), tokens_(tokens), by_lhs_(g.symbols().size()) {
    for (size_t r = 0; r < g.rules().size(); ++r) {
      by_lhs_[g.rules()[r].lhs].push_back(static_cast<int>(r));
    }
    budget_ = static_cast<int>(g.symbols().size());
  }

  double Best() {
    return Inside(g_.root(), 0, static_cast<int>(tokens_.size()), budget_);
  }

  // Every derivation score, or nullopt past `limit` derivations.
  std::optional<std::vector<double>> All(size_t limit) {
    limit_ = limit;
    overflow_ = false;
    std::vector<double> out =
        Enumerate(g_.root(), 0, static_cast<int>(tokens_.size()), budget_);
    if (overflow_) return std::nullopt;
    return out;
  }

 private:
  double Inside(int sym, int i, int j, int budget) {
    auto key = std::make_tuple(sym, i, j, budget);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    double best = kNegInf;
    if (g_.symbols()[sym].kind == SymbolKind::kPreterminal) {
      if (j == i + 1) best = g_.LexiconOf(sym).LogProb(tokens_[i]);
    } else {
      for (int r : by_lhs_[sym]) {
        const topaug::Rule &rule = g_.rules()[r];
        if (rule.unary()) {
          if (budget > 0) {
            best = std::max(best, rule.log_prob +
                                      Inside(rule.left, i, j, budget - 1));
          }
          continue;
        }
        for (int k = i + 1; k < j; ++k) {
          best = std::max(best, rule.log_prob +
                                    Inside(rule.left, i, k, budget_) +
                                    Inside(rule.right, k, j, budget_));
        }
      }
    }
    memo_[key] = best;
    return best;
  }

  std::vector<double> Enumerate(int sym, int i, int j, int budget) {
    std::vector<double> out;
    if (overflow_) return out;
    if (g_.symbols()[sym].kind == SymbolKind::kPreterminal) {
      if (j == i + 1) {
        const double lp = g_.LexiconOf(sym).LogProb(tokens_[i]);
        if (lp > kNegInf) out.push_back(lp);
      }
      return out;
    }
    for (int r : by_lhs_[sym]) {
      const topaug::Rule &rule = g_.rules()[r];
      if (rule.log_prob == kNegInf) continue;
      if (rule.unary()) {
        if (budget == 0) continue;
        for (double s : Enumerate(rule.left, i, j, budget - 1)) {
          out.push_back(rule.log_prob + s);
        }
      } else {
        for (int k = i + 1; k < j; ++k) {
          std::vector<double> left = Enumerate(rule.left, i, k, budget_);
          if (left.empty()) continue;
          std::vector<double> right = Enumerate(rule.right, k, j, budget_);
          for (double a : left) {
            for (double b : right) out.push_back(rule.log_prob + a + b);
          }
        }
      }
      if (out.size() > limit_) {
        overflow_ = true;
        return {};
      }
    }
    return out;
  }

  const Grammar &g_;
  const Tokens &tokens_;
  std::vector<std::vector<int>> by_lhs_;
  int budget_ = 0;
  size_t limit_ = 0;
  bool overflow_ = false;
  std::map<std::tuple<int, int, int, int>, double> memo_;
};

// Eight labels, sentences of at most six tokens.
inline std::vector<std::string> CkyFixture() {
  return {
      "[IN:GET_DISTANCE how far is [SL:DESTINATION boston ] ]",
      "[IN:GET_DISTANCE how far to [SL:DESTINATION the airport ] ]",
      "[IN:GET_DISTANCE distance from [SL:SOURCE home ] to "
      "[SL:DESTINATION work ] ]",
      "[IN:GET_EVENT concerts [SL:DATE_TIME tonight ] ]",
      "[IN:GET_EVENT events in [SL:LOCATION boston ] ]",
      "[IN:GET_DISTANCE how far is [SL:DESTINATION [IN:GET_LOCATION the "
      "nearest [SL:CATEGORY_LOCATION bank ] ] ] ]",
      "[IN:GET_LOCATION where is [SL:CATEGORY_LOCATION the bank ] ]",
      "[IN:GET_EVENT concerts ]",
  };
}

// Smallest probability-sorted prefix reaching mass p, by brute force over
// prefix lengths.
inline size_t BruteForceNucleusSize(std::vector<double> probs, double p) {
  std::sort(probs.rbegin(), probs.rend());
  for (size_t len = 1; len <= probs.size(); ++len) {
    double mass = 0.0;
    for (size_t i = 0; i < len; ++i) mass += probs[i];
    if (mass >= p - kNucleusSlack) return len;
  }
  return probs.size();
}

}  // namespace topaug::testing

#endif  // TOPAUG_TESTS_TEST_ORACLES_H_
