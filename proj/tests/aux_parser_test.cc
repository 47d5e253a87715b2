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

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "test_oracles.h"
#include "test_util.h"
#include "topaug/rng.h"

namespace topaug {
namespace {

std::vector<ParseTree> Trees(const std::vector<std::string> &lines) {
  std::vector<ParseTree> out;
  for (const std::string &line : lines) out.push_back(ParseAnnotation(line));
  return out;
}

std::vector<ParseTree> NavigationFixture() {
  return Trees(testing::CkyFixture());
}

SyntheticSample SampleOf(const std::string &tree) {
  SyntheticSample s;
  s.tree = ParseAnnotation(tree);
  s.utterance = UtteranceOf(*s.tree);
  s.template_key = TemplateKey(ExtractTemplate(*s.tree));
  return s;
}

TEST(InduceTest, SingleTreeIsMemorizedWithCertainty) {
  SmoothingConfig none{0.0, 0.0};
  ParseTree t = ParseAnnotation("[IN:A x y [SL:B z ] ]");
  Grammar g = InduceGrammar(std::vector<ParseTree>{t}, none);
  ParseResult r = CkyParse(g, UtteranceOf(t));
  ASSERT_TRUE(r.tree.has_value());
  EXPECT_EQ(*r.tree, t);
  EXPECT_NEAR(r.log_prob, 0.0, 1e-12);
  EXPECT_NEAR(g.ScoreTree(t), 0.0, 1e-12);
}

TEST(InduceTest, HandCountedProbabilities) {
  Grammar g = InduceGrammar(Trees({"[IN:A x ]", "[IN:A x y ]", "[IN:B z ]"}));
  auto id = [&](const std::string &name) { return g.SymbolId(name).value(); };
  auto prob = [&](const std::string &lhs, const std::string &left,
                  const std::string &right) {
    auto r = g.FindRule(id(lhs), id(left), right.empty() ? -1 : id(right));
    return r ? std::exp(g.rules()[*r].log_prob) : 0.0;
  };
  // TOP: IN:A twice, IN:B once, two supported rules.
  EXPECT_NEAR(prob("TOP", "IN:A", ""), 2.01 / 3.02, 1e-12);
  EXPECT_NEAR(prob("TOP", "IN:B", ""), 1.01 / 3.02, 1e-12);
  // IN:A: one single-token child, one two-token child, and the unseen
  // three-or-more token continuation.
  EXPECT_NEAR(prob("IN:A", "IN:A/B", ""), 1.01 / 2.03, 1e-12);
  EXPECT_NEAR(prob("IN:A", "@IN:A>IN:A/B", "IN:A/I"), 1.01 / 2.03, 1e-12);
  EXPECT_NEAR(prob("IN:A", "@IN:A>IN:A/I", "IN:A/I"), 0.01 / 2.03, 1e-12);
  // Lexicon: vocabulary {x, y, z}, so four classes including unknown.
  const Lexicon &begin = g.LexiconOf(id("IN:A/B"));
  EXPECT_NEAR(std::exp(begin.LogProb("x")), 1.0 - 1e-4, 1e-12);
  EXPECT_NEAR(std::exp(begin.LogProb("y")), 1e-4 / 3, 1e-15);
  EXPECT_NEAR(std::exp(begin.LogProb("never")), 1e-4 / 3, 1e-15);
}

TEST(InduceTest, RulesAndLexiconsAreNormalized) {
  Rng rng(21);
  std::vector<ParseTree> trees;
  for (int i = 0; i < 200; ++i) trees.push_back(testing::RandomTree(&rng));
  for (double alpha : {0.0, 0.01, 1.0}) {
    Grammar g = InduceGrammar(trees, SmoothingConfig{alpha, 1e-4});
    std::map<int, double> mass;
    for (const Rule &r : g.rules()) mass[r.lhs] += std::exp(r.log_prob);
    for (const auto &[lhs, m] : mass) {
      EXPECT_NEAR(m, 1.0, 1e-9) << g.symbols()[lhs].name;
    }
    std::set<std::string> vocabulary;
    for (const ParseTree &t : trees) {
      for (const std::string &w : UtteranceOf(t)) vocabulary.insert(w);
    }
    for (size_t s = 0; s < g.symbols().size(); ++s) {
      if (g.symbols()[s].kind != SymbolKind::kPreterminal) continue;
      const Lexicon &lex = g.LexiconOf(static_cast<int>(s));
      double total = 0.0;
      for (const auto &[word, lp] : lex.log_probs) total += std::exp(lp);
      const double unseen =
          static_cast<double>(vocabulary.size() + 1 - lex.log_probs.size());
      total += unseen * std::exp(lex.unknown_log_prob);
      EXPECT_NEAR(total, 1.0, 1e-9) << g.symbols()[s].name;
    }
  }
}

TEST(InduceTest, TrainingTreesAreCovered) {
  std::vector<ParseTree> trees = NavigationFixture();
  Grammar g = InduceGrammar(trees);
  testing::TreeScorer scorer(g);
  for (const ParseTree &t : trees) {
    EXPECT_GT(g.ScoreTree(t), kNegInf);
    EXPECT_NEAR(g.ScoreTree(t), scorer.Score(t), 1e-9) << Serialize(t);
    EXPECT_TRUE(CkyParse(g, UtteranceOf(t)).tree.has_value());
  }
}

TEST(InduceTest, BadConfigurationAndEmptyInputThrow) {
  std::vector<ParseTree> trees = Trees({"[IN:A x ]"});
  EXPECT_THROW(InduceGrammar(trees, SmoothingConfig{-1.0, 1e-4}), GrammarError);
  EXPECT_THROW(InduceGrammar(trees, SmoothingConfig{0.01, 1.0}), GrammarError);
  EXPECT_THROW(InduceGrammar(std::vector<ParseTree>{}), GrammarError);
}

TEST(CkyTest, UnknownWordWithoutSmoothingHasNoParse) {
  Grammar g = InduceGrammar(Trees({"[IN:A x ]"}), SmoothingConfig{0.0, 0.0});
  ParseResult r = CkyParse(g, {"unseen"});
  EXPECT_FALSE(r.tree.has_value());
  EXPECT_EQ(r.log_prob, kNegInf);
  EXPECT_FALSE(CkyParse(g, {}).tree.has_value());
  Grammar smoothed = InduceGrammar(Trees({"[IN:A x ]"}));
  EXPECT_TRUE(CkyParse(smoothed, {"unseen"}).tree.has_value());
}

TEST(CkyTest, ReturnedTreeScoresItsLogProb) {
  Grammar g = InduceGrammar(NavigationFixture());
  testing::TreeScorer scorer(g);
  for (const Tokens &tokens :
       std::vector<Tokens>{{"how", "far", "is", "work"},
                           {"concerts", "in", "boston", "tonight"},
                           {"where", "is", "the", "nearest", "bank"}}) {
    ParseResult r = CkyParse(g, tokens);
    ASSERT_TRUE(r.tree.has_value());
    EXPECT_EQ(UtteranceOf(*r.tree), tokens);
    EXPECT_NEAR(scorer.Score(*r.tree), r.log_prob, 1e-9);
  }
}

TEST(CkyTest, MatchesExhaustiveEnumerationWithoutSmoothing) {
  Grammar g = InduceGrammar(NavigationFixture(), SmoothingConfig{0.0, 0.0});
  for (const ParseTree &t : NavigationFixture()) {
    const Tokens tokens = UtteranceOf(t);
    testing::DerivationSearch search(g, tokens);
    auto all = search.All(1000000);
    ASSERT_TRUE(all.has_value());
    ASSERT_FALSE(all->empty());
    const double best = *std::max_element(all->begin(), all->end());
    EXPECT_NEAR(CkyParse(g, tokens).log_prob, best, 1e-9) << Serialize(t);
  }
}

TEST(CkyTest, MatchesTopDownSearchWithSmoothing) {
  std::vector<ParseTree> fixture = NavigationFixture();
  Grammar g = InduceGrammar(fixture);
  std::vector<std::string> vocabulary;
  for (const ParseTree &t : fixture) {
    for (const std::string &w : UtteranceOf(t)) vocabulary.push_back(w);
  }
  vocabulary.push_back("zebra");
  Rng rng(8);
  std::vector<Tokens> sentences;
  for (const ParseTree &t : fixture) sentences.push_back(UtteranceOf(t));
  for (int i = 0; i < 20; ++i) {
    Tokens s(1 + rng.Uniform(6));
    for (std::string &w : s) w = vocabulary[rng.Uniform(vocabulary.size())];
    sentences.push_back(s);
  }
  for (const Tokens &tokens : sentences) {
    testing::DerivationSearch search(g, tokens);
    EXPECT_NEAR(CkyParse(g, tokens).log_prob, search.Best(), 1e-9)
        << JoinTokens(tokens);
  }
}

TEST(CkyTest, IsDeterministic) {
  Grammar g = InduceGrammar(NavigationFixture());
  Tokens tokens{"how", "far", "is", "the", "nearest", "bank"};
  EXPECT_EQ(Serialize(*CkyParse(g, tokens).tree),
            Serialize(*CkyParse(g, tokens).tree));
}

TEST(GrammarJsonTest, RoundTripPreservesParses) {
  Grammar g = InduceGrammar(NavigationFixture());
  Grammar back = Grammar::FromJson(nlohmann::json::parse(g.ToJson().dump()));
  EXPECT_EQ(back.ToJson(), g.ToJson());
  for (const ParseTree &t : NavigationFixture()) {
    ParseResult a = CkyParse(g, UtteranceOf(t));
    ParseResult b = CkyParse(back, UtteranceOf(t));
    EXPECT_EQ(a.tree, b.tree);
    EXPECT_DOUBLE_EQ(a.log_prob, b.log_prob);
  }
  EXPECT_ANY_THROW(Grammar::FromJson(nlohmann::json{{"symbols", 3}}));
}

TEST(FilterTest, KeepsOnlyExactReparses) {
  Grammar g = InduceGrammar(Trees({"[IN:A x [SL:B y ] ]", "[IN:A x [SL:B y ] ]",
                                   "[IN:A x [SL:B y ] ]", "[IN:A x [SL:C y ] ]"}));
  std::vector<SyntheticSample> samples{SampleOf("[IN:A x [SL:B y ] ]"),
                                       SampleOf("[IN:A x [SL:C y ] ]")};
  SyntheticSample invalid;
  invalid.rejection = RejectReason::kStructural;
  samples.push_back(invalid);
  FrequencyTable stats;
  stats.counts["[IN:A [mask] [SL:B [mask] ] ]"] = 3;
  stats.counts["[IN:A [mask] [SL:C [mask] ] ]"] = 1;
  stats.total = 4;
  FilterReport report;
  auto out = FilterSynthetic(MakeCkyParser(g), samples, &report, &stats, 2);
  EXPECT_EQ(out[0].verdict, FilterVerdict::kKept);
  EXPECT_EQ(out[1].verdict, FilterVerdict::kDropped);
  EXPECT_EQ(out[2].verdict, FilterVerdict::kPending);
  EXPECT_EQ(report.overall.kept, 1u);
  EXPECT_EQ(report.overall.total, 2u);
  EXPECT_EQ(report.skipped_invalid, 1u);
  EXPECT_EQ(report.buckets[static_cast<int>(Bucket::kRare)].total, 2u);
  EXPECT_EQ(report.buckets[static_cast<int>(Bucket::kRare)].kept, 1u);
  EXPECT_FALSE(report.buckets[static_cast<int>(Bucket::kUnseen)].rate());
}

TEST(FilterTest, EmptyInputIsZeroOfZero) {
  FilterReport report;
  EXPECT_TRUE(FilterSynthetic(MakeLookupParser({}), {}, &report).empty());
  EXPECT_EQ(report.overall.total, 0u);
  EXPECT_FALSE(report.overall.rate().has_value());
  EXPECT_TRUE(report.ToJson()["overall"]["rate"].is_null());
}

TEST(ExternalParseTest, EchoAdapterAnswersEveryUtterance) {
  AdapterOptions a;
  a.command = std::string(ECHO_ADAPTER_PATH) + " parse ok";
  ExternalParseResult r = ExternalParse(a, {{"x", "y"}, {"z"}});
  ASSERT_FALSE(r.error.has_value());
  ASSERT_EQ(r.trees.size(), 2u);
  EXPECT_EQ(Serialize(*r.trees[1]), "[IN:ECHO z ]");
  a.command = std::string(ECHO_ADAPTER_PATH) + " parse bad-field";
  EXPECT_EQ(ExternalParse(a, {{"x"}}).error->kind,
            AdapterErrorKind::kProtocolViolation);
}

}  // namespace
}  // namespace topaug
