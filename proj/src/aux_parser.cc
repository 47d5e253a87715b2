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

#include "topaug/aux_parser.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "topaug/parallel.h"

namespace topaug {
namespace {

constexpr char kRootName[] = "TOP";

std::string PreterminalName(const Label &parent, char position) {
  return parent.ToString() + "/" + position;
}

std::string IntermediateName(const Label &parent, const std::string &last) {
  return "@" + parent.ToString() + ">" + last;
}

// Symbol names of a node's children: labels for non-terminals, B/I
// preterminals for tokens.
std::vector<std::string> ChildNames(const Node &node) {
  std::vector<std::string> names;
  bool after_token = false;
  for (const Node &child : node.children) {
    if (child.kind == NodeKind::kToken) {
      names.push_back(PreterminalName(node.label, after_token ? 'I' : 'B'));
      after_token = true;
    } else {
      names.push_back(child.label.ToString());
      after_token = false;
    }
  }
  return names;
}

// Rule (lhs, left, right) by symbol name; right is "" for unary rules.
using RuleKey = std::tuple<std::string, std::string, std::string>;

// Rules of the binarized local tree X -> children.
std::vector<RuleKey> BinarizeLocal(const Label &parent,
                                   const std::vector<std::string> &children) {
  std::vector<RuleKey> rules;
  const std::string lhs = parent.ToString();
  const size_t n = children.size();
  if (n == 1) {
    rules.emplace_back(lhs, children[0], "");
    return rules;
  }
  rules.emplace_back(lhs, IntermediateName(parent, children[n - 2]),
                     children[n - 1]);
  for (size_t i = n - 2; i >= 1; --i) {
    rules.emplace_back(IntermediateName(parent, children[i]),
                       IntermediateName(parent, children[i - 1]), children[i]);
  }
  rules.emplace_back(IntermediateName(parent, children[0]), children[0], "");
  return rules;
}

}  // namespace

class GrammarBuilder {
 public:
  explicit GrammarBuilder(const SmoothingConfig &config) : config_(config) {
    if (!(config.rule_smoothing >= 0.0) || !std::isfinite(config.rule_smoothing)) {
      throw GrammarError("rule smoothing must be a finite non-negative number");
    }
    if (!(config.unknown_mass >= 0.0 && config.unknown_mass < 1.0)) {
      throw GrammarError("unknown-token mass must lie in [0, 1)");
    }
  }

  void AddTree(const ParseTree &tree) {
    ++rule_counts_[{kRootName, tree.root.label.ToString(), ""}];
    AddNode(tree.root);
  }

  Grammar Build() {
    if (rule_counts_.empty()) throw GrammarError("EmptyCorpus: no trees");
    const bool smoothed = config_.rule_smoothing > 0.0;

    // Candidate children per label. Smoothing lets token runs of any length
    // appear wherever tokens were seen.
    if (smoothed) {
      for (auto &[name, kids] : children_) {
        const Label &label = labels_.at(name);
        if (kids.contains(PreterminalName(label, 'B'))) {
          const std::string inside = PreterminalName(label, 'I');
          kids.insert(inside);
          preterminals_[inside] = {label, 'I'};
          last_child_names_[IntermediateName(label, inside)] = inside;
        }
      }
    }

    std::map<std::string, std::set<RuleKey>> support;
    for (const auto &[key, count] : rule_counts_) {
      support[std::get<0>(key)].insert(key);
    }
    if (smoothed) {
      for (const auto &[name, label] : labels_) {
        if (label.kind == LabelKind::kIntent) {
          support[kRootName].insert({kRootName, name, ""});
        }
      }
      for (const auto &[name, kids] : children_) {
        const Label &label = labels_.at(name);
        const std::string inside = PreterminalName(label, 'I');
        const std::string begin = PreterminalName(label, 'B');
        auto consistent = [&](const std::string &prev, const std::string &c) {
          const bool prev_token = prev == begin || prev == inside;
          if (c == inside) return prev_token;
          if (c == begin) return !prev_token;
          return true;
        };
        for (const std::string &c : kids) {
          const std::string mid = IntermediateName(label, c);
          if (c != inside) {
            support[name].insert({name, c, ""});
            support[mid].insert({mid, c, ""});
          }
          for (const std::string &prev : kids) {
            if (!consistent(prev, c)) continue;
            support[name].insert({name, IntermediateName(label, prev), c});
            support[mid].insert({mid, IntermediateName(label, prev), c});
          }
        }
      }
    }

    // Symbols: root first, then by name.
    std::set<std::string> names;
    for (const auto &[lhs, rules] : support) {
      for (const RuleKey &key : rules) {
        names.insert(std::get<0>(key));
        names.insert(std::get<1>(key));
        if (!std::get<2>(key).empty()) names.insert(std::get<2>(key));
      }
    }
    names.erase(kRootName);
    Grammar g;
    g.config_ = config_;
    g.symbols_.push_back({SymbolKind::kRoot, Label{}, 0, -1, kRootName});
    for (const std::string &name : names) g.symbols_.push_back(Describe(name));
    for (size_t i = 0; i < g.symbols_.size(); ++i) {
      g.symbol_ids_[g.symbols_[i].name] = static_cast<int>(i);
    }
    for (Symbol &symbol : g.symbols_) {
      if (symbol.kind == SymbolKind::kIntermediate) {
        symbol.last_child = g.symbol_ids_.at(last_child_names_.at(symbol.name));
      }
    }

    // Rules sorted by (lhs, left, right) id.
    for (const auto &[lhs, rules] : support) {
      uint64_t lhs_total = 0;
      for (const RuleKey &key : rules) {
        auto it = rule_counts_.find(key);
        if (it != rule_counts_.end()) lhs_total += it->second;
      }
      const double denom = static_cast<double>(lhs_total) +
                           config_.rule_smoothing * static_cast<double>(rules.size());
      for (const RuleKey &key : rules) {
        auto it = rule_counts_.find(key);
        const double count =
            it == rule_counts_.end() ? 0.0 : static_cast<double>(it->second);
        Rule rule;
        rule.lhs = g.symbol_ids_.at(std::get<0>(key));
        rule.left = g.symbol_ids_.at(std::get<1>(key));
        rule.right = std::get<2>(key).empty() ? -1
                                              : g.symbol_ids_.at(std::get<2>(key));
        rule.log_prob = std::log((count + config_.rule_smoothing) / denom);
        g.rules_.push_back(rule);
      }
    }
    std::sort(g.rules_.begin(), g.rules_.end(), [](const Rule &a, const Rule &b) {
      return std::tie(a.lhs, a.left, a.right) < std::tie(b.lhs, b.left, b.right);
    });

    // Lexicon.
    g.vocabulary_size_ = vocabulary_.size();
    g.lexicon_.resize(g.symbols_.size());
    const double classes = static_cast<double>(vocabulary_.size() + 1);
    for (size_t id = 0; id < g.symbols_.size(); ++id) {
      if (g.symbols_[id].kind != SymbolKind::kPreterminal) continue;
      Lexicon &lex = g.lexicon_[id];
      auto it = emissions_.find(g.symbols_[id].name);
      if (it == emissions_.end()) {
        lex.unknown_log_prob = -std::log(classes);
        continue;
      }
      uint64_t total = 0;
      for (const auto &[word, n] : it->second) total += n;
      for (const auto &[word, n] : it->second) {
        lex.log_probs[word] =
            std::log((1.0 - config_.unknown_mass) * static_cast<double>(n) /
                     static_cast<double>(total));
      }
      const double unseen = classes - static_cast<double>(it->second.size());
      lex.unknown_log_prob = config_.unknown_mass > 0.0
                                 ? std::log(config_.unknown_mass / unseen)
                                 : kNegInf;
    }
    g.Index();
    return g;
  }

 private:
  void AddNode(const Node &node) {
    const std::string name = node.label.ToString();
    labels_.emplace(name, node.label);
    std::vector<std::string> kids = ChildNames(node);
    children_[name].insert(kids.begin(), kids.end());
    for (const RuleKey &key : BinarizeLocal(node.label, kids)) {
      ++rule_counts_[key];
    }
    for (size_t i = 0; i < node.children.size(); ++i) {
      const Node &child = node.children[i];
      last_child_names_[IntermediateName(node.label, kids[i])] = kids[i];
      if (child.kind == NodeKind::kToken) {
        ++emissions_[kids[i]][child.text];
        preterminals_[kids[i]] = {node.label, kids[i].back()};
        vocabulary_.insert(child.text);
      } else {
        AddNode(child);
      }
    }
  }

  Symbol Describe(const std::string &name) const {
    if (auto it = labels_.find(name); it != labels_.end()) {
      return {SymbolKind::kLabel, it->second, 0, -1, name};
    }
    if (auto it = preterminals_.find(name); it != preterminals_.end()) {
      return {SymbolKind::kPreterminal, it->second.first, it->second.second,
              -1, name};
    }
    // "@" + parent + ">" + last child.
    const std::string &last = last_child_names_.at(name);
    const std::string parent = name.substr(1, name.size() - 2 - last.size());
    return {SymbolKind::kIntermediate, labels_.at(parent), 0, -1, name};
  }

  SmoothingConfig config_;
  std::map<RuleKey, uint64_t> rule_counts_;
  std::map<std::string, Label> labels_;
  std::map<std::string, std::set<std::string>> children_;
  std::map<std::string, std::map<std::string, uint64_t>> emissions_;
  std::map<std::string, std::string> last_child_names_;
  std::map<std::string, std::pair<Label, char>> preterminals_;
  std::set<std::string> vocabulary_;
};

void Grammar::Index() {
  rule_ids_.clear();
  binary_by_left_.assign(symbols_.size(), {});
  unary_rules_.clear();
  preterminals_.clear();
  for (size_t r = 0; r < rules_.size(); ++r) {
    const Rule &rule = rules_[r];
    rule_ids_[{rule.lhs, rule.left, rule.right}] = static_cast<int>(r);
    if (rule.unary()) {
      unary_rules_.push_back(static_cast<int>(r));
    } else {
      binary_by_left_[rule.left].push_back(static_cast<int>(r));
    }
  }
  for (size_t s = 0; s < symbols_.size(); ++s) {
    if (symbols_[s].kind == SymbolKind::kPreterminal) {
      preterminals_.push_back(static_cast<int>(s));
    }
  }
  if (lexicon_.size() != symbols_.size()) lexicon_.resize(symbols_.size());
}

std::optional<int> Grammar::SymbolId(const std::string &name) const {
  auto it = symbol_ids_.find(name);
  if (it == symbol_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Grammar::FindRule(int lhs, int left, int right) const {
  auto it = rule_ids_.find({lhs, left, right});
  if (it == rule_ids_.end()) return std::nullopt;
  return it->second;
}

const Lexicon &Grammar::LexiconOf(int symbol) const {
  return lexicon_.at(static_cast<size_t>(symbol));
}

std::optional<Grammar::Derivation> Grammar::Derive(const ParseTree &tree) const {
  Derivation d;
  auto rule_of = [this](const std::string &lhs, const std::string &left,
                        const std::string &right) -> std::optional<int> {
    auto l = SymbolId(lhs), a = SymbolId(left);
    if (!l || !a) return std::nullopt;
    int b = -1;
    if (!right.empty()) {
      auto rb = SymbolId(right);
      if (!rb) return std::nullopt;
      b = *rb;
    }
    return FindRule(*l, *a, b);
  };
  auto top = rule_of(kRootName, tree.root.label.ToString(), "");
  if (!top) return std::nullopt;
  d.rules.push_back(*top);

  std::vector<const Node *> stack = {&tree.root};
  while (!stack.empty()) {
    const Node *node = stack.back();
    stack.pop_back();
    std::vector<std::string> kids = ChildNames(*node);
    for (const auto &[lhs, left, right] : BinarizeLocal(node->label, kids)) {
      auto r = rule_of(lhs, left, right);
      if (!r) return std::nullopt;
      d.rules.push_back(*r);
    }
    for (size_t i = 0; i < node->children.size(); ++i) {
      const Node &child = node->children[i];
      if (child.kind == NodeKind::kToken) {
        auto pre = SymbolId(kids[i]);
        if (!pre) return std::nullopt;
        d.emissions.emplace_back(*pre, child.text);
      } else {
        stack.push_back(&child);
      }
    }
  }
  return d;
}

double Grammar::ScoreTree(const ParseTree &tree) const {
  std::optional<Derivation> d = Derive(tree);
  if (!d) return kNegInf;
  double score = 0.0;
  for (int r : d->rules) score += rules_[r].log_prob;
  for (const auto &[pre, word] : d->emissions) {
    score += LexiconOf(pre).LogProb(word);
  }
  return score;
}

namespace {

nlohmann::json LogProbJson(double lp) {
  return std::isfinite(lp) ? nlohmann::json(lp) : nlohmann::json(nullptr);
}

double LogProbFromJson(const nlohmann::json &j) {
  return j.is_null() ? kNegInf : j.get<double>();
}

const char *SymbolKindName(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::kRoot:
      return "root";
    case SymbolKind::kLabel:
      return "label";
    case SymbolKind::kPreterminal:
      return "preterminal";
    case SymbolKind::kIntermediate:
      return "intermediate";
  }
  return "unknown";
}

}  // namespace

nlohmann::json Grammar::ToJson() const {
  nlohmann::json j;
  j["format"] = "topaug-pcfg-1";
  j["config"] = {{"rule_smoothing", config_.rule_smoothing},
                 {"unknown_mass", config_.unknown_mass}};
  j["vocabulary_size"] = vocabulary_size_;
  nlohmann::json symbols = nlohmann::json::array();
  for (const Symbol &s : symbols_) {
    nlohmann::json js = {{"name", s.name}, {"kind", SymbolKindName(s.kind)}};
    if (s.kind != SymbolKind::kRoot) js["label"] = s.label.ToString();
    if (s.kind == SymbolKind::kPreterminal) js["position"] = std::string(1, s.position);
    if (s.kind == SymbolKind::kIntermediate) js["last_child"] = s.last_child;
    symbols.push_back(std::move(js));
  }
  j["symbols"] = std::move(symbols);
  nlohmann::json rules = nlohmann::json::array();
  for (const Rule &r : rules_) {
    rules.push_back({r.lhs, r.left, r.right, LogProbJson(r.log_prob)});
  }
  j["rules"] = std::move(rules);
  nlohmann::json lexicon = nlohmann::json::object();
  for (int pre : preterminals_) {
    const Lexicon &lex = lexicon_[pre];
    nlohmann::json words = nlohmann::json::object();
    for (const auto &[word, lp] : lex.log_probs) words[word] = LogProbJson(lp);
    lexicon[symbols_[pre].name] = {{"unknown", LogProbJson(lex.unknown_log_prob)},
                                   {"words", std::move(words)}};
  }
  j["lexicon"] = std::move(lexicon);
  return j;
}

Grammar Grammar::FromJson(const nlohmann::json &j) {
  try {
    if (j.at("format") != "topaug-pcfg-1") {
      throw GrammarError("unsupported grammar format");
    }
    Grammar g;
    g.config_.rule_smoothing = j.at("config").at("rule_smoothing").get<double>();
    g.config_.unknown_mass = j.at("config").at("unknown_mass").get<double>();
    g.vocabulary_size_ = j.at("vocabulary_size").get<size_t>();
    for (const nlohmann::json &js : j.at("symbols")) {
      Symbol s;
      s.name = js.at("name").get<std::string>();
      const std::string kind = js.at("kind").get<std::string>();
      if (kind == "root") {
        s.kind = SymbolKind::kRoot;
      } else {
        std::optional<Label> label =
            Label::Parse(js.at("label").get<std::string>());
        if (!label) throw GrammarError("bad label in symbol " + s.name);
        s.label = std::move(*label);
        if (kind == "label") {
          s.kind = SymbolKind::kLabel;
        } else if (kind == "preterminal") {
          s.kind = SymbolKind::kPreterminal;
          s.position = js.at("position").get<std::string>().at(0);
        } else if (kind == "intermediate") {
          s.kind = SymbolKind::kIntermediate;
          s.last_child = js.at("last_child").get<int>();
        } else {
          throw GrammarError("unknown symbol kind " + kind);
        }
      }
      g.symbols_.push_back(std::move(s));
    }
    if (g.symbols_.empty() || g.symbols_[0].kind != SymbolKind::kRoot) {
      throw GrammarError("first symbol must be the root");
    }
    for (size_t i = 0; i < g.symbols_.size(); ++i) {
      g.symbol_ids_[g.symbols_[i].name] = static_cast<int>(i);
    }
    const int n = static_cast<int>(g.symbols_.size());
    for (const nlohmann::json &jr : j.at("rules")) {
      Rule r{jr.at(0).get<int>(), jr.at(1).get<int>(), jr.at(2).get<int>(),
             LogProbFromJson(jr.at(3))};
      if (r.lhs < 0 || r.lhs >= n || r.left < 0 || r.left >= n ||
          r.right >= n) {
        throw GrammarError("rule refers to an unknown symbol");
      }
      g.rules_.push_back(r);
    }
    g.lexicon_.resize(g.symbols_.size());
    for (const auto &[name, jl] : j.at("lexicon").items()) {
      auto id = g.SymbolId(name);
      if (!id) throw GrammarError("lexicon for unknown symbol " + name);
      Lexicon &lex = g.lexicon_[*id];
      lex.unknown_log_prob = LogProbFromJson(jl.at("unknown"));
      for (const auto &[word, lp] : jl.at("words").items()) {
        lex.log_probs[word] = LogProbFromJson(lp);
      }
    }
    g.Index();
    return g;
  } catch (const nlohmann::json::exception &e) {
    throw GrammarError(std::string("malformed grammar: ") + e.what());
  }
}

Grammar InduceGrammar(const std::vector<ParseTree> &trees,
                      const SmoothingConfig &config) {
  GrammarBuilder builder(config);
  for (const ParseTree &tree : trees) builder.AddTree(tree);
  return builder.Build();
}

Grammar InduceGrammar(const Corpus &corpus, const SmoothingConfig &config) {
  GrammarBuilder builder(config);
  for (const AnnotatedUtterance &item : corpus.items) builder.AddTree(item.tree);
  return builder.Build();
}

namespace {

struct Entry {
  double score = kNegInf;
  int rule = -1;   // -1: lexical emission
  int split = -1;  // -1: unary or lexical
};

// Strict total order on candidates: score, then lower rule, then smaller
// split.
bool Beats(double score, int rule, int split, const Entry &e) {
  if (score != e.score) return score > e.score;
  if (rule != e.rule) return rule < e.rule;
  return split < e.split;
}

class Chart {
 public:
  Chart(const Grammar &grammar, const Tokens &tokens)
      : g_(grammar),
        tokens_(tokens),
        n_(tokens.size()),
        s_(grammar.symbols().size()),
        entries_((n_ + 1) * (n_ + 1) * s_),
        active_((n_ + 1) * (n_ + 1)) {}

  ParseResult Run() {
    for (size_t i = 0; i < n_; ++i) {
      for (int pre : g_.preterminals()) {
        double lp = g_.LexiconOf(pre).LogProb(tokens_[i]);
        if (std::isfinite(lp)) Offer(i, i + 1, pre, lp, -1, -1);
      }
      UnaryClosure(i, i + 1);
    }
    for (size_t width = 2; width <= n_; ++width) {
      for (size_t i = 0; i + width <= n_; ++i) {
        const size_t j = i + width;
        for (size_t k = i + 1; k < j; ++k) {
          for (int b : active_[Cell(i, k)]) {
            const double sb = At(i, k, b).score;
            for (int r : g_.binary_by_left()[b]) {
              const Rule &rule = g_.rules()[r];
              const double sc = At(k, j, rule.right).score;
              if (sc == kNegInf) continue;
              Offer(i, j, rule.lhs, rule.log_prob + sb + sc, r,
                    static_cast<int>(k));
            }
          }
        }
        UnaryClosure(i, j);
      }
    }

    ParseResult result;
    for (const std::vector<int> &cell : active_) {
      if (!cell.empty()) ++result.chart.cells_filled;
      result.chart.entries += cell.size();
    }
    result.chart.pruned = pruned_;
    const Entry &top = At(0, n_, g_.root());
    if (top.score == kNegInf) return result;
    result.log_prob = top.score;
    std::vector<Node> nodes = Expand(0, n_, g_.root());
    result.tree = ParseTree{std::move(nodes.at(0))};
    return result;
  }

 private:
  size_t Cell(size_t i, size_t j) const { return i * (n_ + 1) + j; }
  Entry &At(size_t i, size_t j, int s) { return entries_[Cell(i, j) * s_ + s]; }

  bool Offer(size_t i, size_t j, int s, double score, int rule, int split) {
    Entry &e = At(i, j, s);
    if (!Beats(score, rule, split, e)) {
      ++pruned_;
      return false;
    }
    if (e.score == kNegInf) active_[Cell(i, j)].push_back(s);
    e = {score, rule, split};
    return true;
  }

  void UnaryClosure(size_t i, size_t j) {
    // Unary cycles strictly lose probability, so this settles after at most
    // one pass per symbol.
    for (size_t pass = 0; pass <= s_; ++pass) {
      bool changed = false;
      for (int r : g_.unary_rules()) {
        const Rule &rule = g_.rules()[r];
        const double child = At(i, j, rule.left).score;
        if (child == kNegInf) continue;
        changed |= Offer(i, j, rule.lhs, rule.log_prob + child, r, -1);
      }
      if (!changed) break;
    }
  }

  // Debinarized nodes spanned by symbol s over [i, j).
  std::vector<Node> Expand(size_t i, size_t j, int s) {
    const Entry &e = At(i, j, s);
    const Symbol &symbol = g_.symbols()[s];
    if (e.rule < 0) return {Node::Token(tokens_[i])};
    const Rule &rule = g_.rules()[e.rule];
    std::vector<Node> kids;
    if (rule.unary()) {
      kids = Expand(i, j, rule.left);
    } else {
      kids = Expand(i, static_cast<size_t>(e.split), rule.left);
      std::vector<Node> right = Expand(static_cast<size_t>(e.split), j, rule.right);
      for (Node &node : right) kids.push_back(std::move(node));
    }
    switch (symbol.kind) {
      case SymbolKind::kLabel: {
        std::vector<Node> out;
        out.push_back(Node::NonTerminal(symbol.label, std::move(kids)));
        return out;
      }
      case SymbolKind::kRoot:
      case SymbolKind::kIntermediate:
      case SymbolKind::kPreterminal:
        return kids;
    }
    return kids;
  }

  const Grammar &g_;
  const Tokens &tokens_;
  size_t n_;
  size_t s_;
  std::vector<Entry> entries_;
  std::vector<std::vector<int>> active_;
  size_t pruned_ = 0;
};

}  // namespace

ParseResult CkyParse(const Grammar &grammar, const Tokens &tokens) {
  if (tokens.empty()) return {};
  return Chart(grammar, tokens).Run();
}

ParserFn MakeCkyParser(const Grammar &grammar) {
  // The grammar must outlive the returned function.
  return [&grammar](const Tokens &tokens) {
    return CkyParse(grammar, tokens).tree;
  };
}

bool ExactMatch(const std::optional<ParseTree> &predicted,
                const ParseTree &gold) {
  return predicted.has_value() && Serialize(*predicted) == Serialize(gold);
}

nlohmann::json FilterReport::ToJson() const {
  auto rate_json = [](const KeepRate &r) {
    nlohmann::json j = {{"kept", r.kept}, {"total", r.total}};
    auto rate = r.rate();
    j["rate"] = rate ? nlohmann::json(*rate) : nlohmann::json(nullptr);
    return j;
  };
  nlohmann::json j;
  j["overall"] = rate_json(overall);
  for (int b = 0; b < kNumBuckets; ++b) {
    j["buckets"][BucketName(static_cast<Bucket>(b))] = rate_json(buckets[b]);
  }
  j["skipped_invalid"] = skipped_invalid;
  return j;
}

std::vector<SyntheticSample> FilterSynthetic(
    const ParserFn &parser, std::vector<SyntheticSample> samples,
    FilterReport *report, const FrequencyTable *train_stats, int jobs) {
  ParallelFor(samples.size(), jobs, [&](size_t i) {
    SyntheticSample &sample = samples[i];
    if (!sample.valid() || !sample.tree) return;
    sample.verdict = ExactMatch(parser(sample.utterance), *sample.tree)
                         ? FilterVerdict::kKept
                         : FilterVerdict::kDropped;
  });
  if (report) {
    *report = FilterReport{};
    for (const SyntheticSample &sample : samples) {
      if (sample.verdict == FilterVerdict::kPending) {
        ++report->skipped_invalid;
        continue;
      }
      const bool kept = sample.verdict == FilterVerdict::kKept;
      ++report->overall.total;
      report->overall.kept += kept;
      if (train_stats) {
        KeepRate &bucket = report->buckets[static_cast<int>(
            FrequencyBucket(*train_stats, sample.template_key))];
        ++bucket.total;
        bucket.kept += kept;
      }
    }
  }
  return samples;
}

ExternalParseResult ExternalParse(const AdapterOptions &adapter,
                                  const std::vector<Tokens> &utterances) {
  std::vector<nlohmann::json> requests;
  for (size_t i = 0; i < utterances.size(); ++i) {
    requests.push_back(
        {{"id", static_cast<int64_t>(i)}, {"utterance", JoinTokens(utterances[i])}});
  }
  AdapterRun run = RunLineProtocol(
      adapter, requests, 1, [](const nlohmann::json &response) -> std::string {
        if (!response.contains("tree") ||
            !(response["tree"].is_string() || response["tree"].is_null())) {
          return "response without tree";
        }
        return "";
      });
  ExternalParseResult result;
  result.error = run.error;
  result.trees.resize(utterances.size());
  for (const auto &[id, responses] : run.complete) {
    const nlohmann::json &tree = responses.at(0)["tree"];
    if (tree.is_null()) continue;
    try {
      result.trees[static_cast<size_t>(id)] =
          ParseAnnotation(tree.get<std::string>());
    } catch (const TreeError &) {
      // counted as no parse
    }
  }
  return result;
}

ParserFn MakeLookupParser(std::map<Tokens, std::optional<ParseTree>> table) {
  return [table = std::move(table)](const Tokens &tokens) {
    auto it = table.find(tokens);
    return it == table.end() ? std::nullopt : it->second;
  };
}

}  // namespace topaug
