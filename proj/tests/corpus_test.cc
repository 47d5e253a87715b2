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

#include "topaug/corpus.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "test_util.h"
#include "topaug/rng.h"

namespace topaug {
namespace {

Corpus FromTrees(const std::vector<std::string> &trees) {
  Corpus c;
  for (const std::string &t : trees) {
    c.items.push_back(AnnotatedUtterance::FromTree(ParseAnnotation(t)));
  }
  return c;
}

TEST(LoadTest, LenientSkipsAndReportsBadLines) {
  const std::string tsv =
      "how far is boston\thow far is boston\t"
      "[IN:GET_DISTANCE how far is [SL:DESTINATION boston ] ]\n"
      "broken\tbroken\t[IN:GET_DISTANCE broken\n"
      "hi\thi\t[IN:FOO hi ]\n";
  LoadReport report;
  Corpus c = LoadTsvFromString(tsv, LoadOptions{}, &report);
  ASSERT_EQ(c.size(), 2u);
  ASSERT_EQ(report.errors.size(), 1u);
  EXPECT_EQ(report.errors[0].line, 2u);
  EXPECT_EQ(c.items[0].tokens, (Tokens{"how", "far", "is", "boston"}));
  EXPECT_EQ(c.items[0].template_key,
            "[IN:GET_DISTANCE [mask] [SL:DESTINATION [mask] ] ]");
  EXPECT_EQ(c.items[1].raw, "hi");

  LoadOptions strict;
  strict.strict = true;
  EXPECT_THROW(LoadTsvFromString(tsv, strict), CorpusError);
}

TEST(LoadTest, TreeOnlyLayoutAndMissingColumns) {
  LoadOptions options;
  options.layout = ColumnLayout::FromSpec("tree");
  Corpus c = LoadTsvFromString("[IN:FOO hi there ]\n[IN:BAR x ]\n", options);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.items[0].tokens, (Tokens{"hi", "there"}));

  LoadReport report;
  Corpus d = LoadTsvFromString("only-one-column\n[IN:A b ]\tx\tx\n"
                               "a\ta\t[IN:A a ]\n",
                               LoadOptions{}, &report);
  EXPECT_EQ(d.size(), 1u);
  EXPECT_EQ(report.errors.size(), 2u);
}

TEST(LoadTest, TokenMismatchIsCountedNotRejected) {
  LoadReport report;
  Corpus c = LoadTsvFromString("Hi!\thi !\t[IN:FOO hi ]\n", LoadOptions{},
                               &report);
  EXPECT_EQ(c.size(), 1u);
  EXPECT_EQ(report.token_mismatches, 1u);
  EXPECT_EQ(c.items[0].tokens, Tokens{"hi"});
}

TEST(LoadTest, EmptyOrUnreadableInputThrows) {
  EXPECT_THROW(LoadTsvFromString("", LoadOptions{}), CorpusError);
  EXPECT_THROW(LoadTsv("/nonexistent/file.tsv", LoadOptions{}), CorpusError);
  EXPECT_THROW(ColumnLayout::FromSpec("raw,tokens"), CorpusError);
  EXPECT_THROW(ColumnLayout::FromSpec("raw,bogus,tree"), CorpusError);
}

TEST(LoadTest, ToTsvRoundTrips) {
  Corpus c = FromTrees({"[IN:A x y [SL:B z ] ]", "[IN:C q ]"});
  Corpus back = LoadTsvFromString(ToTsv(c), LoadOptions{});
  ASSERT_EQ(back.size(), c.size());
  for (size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(back.items[i].tree, c.items[i].tree);
    EXPECT_EQ(back.items[i].tokens, c.items[i].tokens);
  }
}

TEST(StatsTest, IdenticalAnnotations) {
  FrequencyTable t = TemplateStats(
      FromTrees({"[IN:FOO a ]", "[IN:FOO b c ]", "[IN:FOO d ]"}));
  EXPECT_EQ(t.distinct(), 1u);
  EXPECT_EQ(t.count("[IN:FOO [mask] ]"), 3u);
  EXPECT_EQ(t.total, 3u);
  EXPECT_DOUBLE_EQ(t.SingletonFraction(), 0.0);
  EXPECT_DOUBLE_EQ(t.TopKMass(1), 1.0);
}

TEST(StatsTest, MatchesBruteForceOnRandomCorpora) {
  Rng rng(5);
  testing::RandomTreeOptions o;
  o.intents = 3;
  o.slots = 2;
  o.max_children = 3;
  o.max_depth = 2;
  Corpus c;
  for (int i = 0; i < 400; ++i) {
    c.items.push_back(AnnotatedUtterance::FromTree(testing::RandomTree(&rng, o)));
  }
  FrequencyTable t = TemplateStats(c);
  std::map<std::string, uint64_t> counts;
  for (const auto &item : c.items) ++counts[item.template_key];
  EXPECT_EQ(t.counts, counts);
  EXPECT_EQ(t.total, c.size());

  uint64_t singletons = 0;
  for (const auto &[key, n] : counts) singletons += n == 1;
  EXPECT_DOUBLE_EQ(t.SingletonFraction(),
                   static_cast<double>(singletons) / c.size());

  std::vector<uint64_t> sorted;
  for (const auto &[key, n] : counts) sorted.push_back(n);
  std::sort(sorted.rbegin(), sorted.rend());
  uint64_t top = 0;
  for (size_t i = 0; i < std::min<size_t>(10, sorted.size()); ++i) {
    top += sorted[i];
  }
  EXPECT_DOUBLE_EQ(t.TopKMass(10), static_cast<double>(top) / c.size());

  auto ranked = t.RankFrequency();
  for (size_t i = 1; i < ranked.size(); ++i) {
    EXPECT_TRUE(ranked[i - 1].second > ranked[i].second ||
                (ranked[i - 1].second == ranked[i].second &&
                 ranked[i - 1].first < ranked[i].first));
  }
}

TEST(StatsTest, JsonAndCsv) {
  FrequencyTable t =
      TemplateStats(FromTrees({"[IN:A x ]", "[IN:A y ]", "[IN:B z ]"}));
  nlohmann::json j = StatsToJson(t, Split::kTrain);
  EXPECT_EQ(j["split"], "train");
  EXPECT_EQ(j["items"], 3);
  EXPECT_EQ(j["distinct_templates"], 2);
  EXPECT_NEAR(j["singleton_fraction"].get<double>(), 1.0 / 3, 1e-12);
  EXPECT_EQ(j["rank_frequency"][0]["template"], "[IN:A [mask] ]");
  EXPECT_EQ(RankFrequencyCsv(t),
            "rank,count,template\n1,2,\"[IN:A [mask] ]\"\n"
            "2,1,\"[IN:B [mask] ]\"\n");
}

TEST(UnsupportedTest, FilterConserves) {
  Corpus c = FromTrees({"[IN:UNSUPPORTED_NAVIGATION x ]", "[IN:GET_A y ]",
                        "[IN:UNSUPPORTED z ]",
                        "[IN:GET_B [SL:S [IN:UNSUPPORTED w ] ] ]"});
  Corpus kept = FilterUnsupported(c);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept.items[0].tree, c.items[1].tree);
  EXPECT_EQ(kept.items[1].tree, c.items[3].tree);
  size_t removed = 0;
  for (const auto &item : c.items) removed += IsUnsupported(item);
  EXPECT_EQ(kept.size() + removed, c.size());

  Corpus none = FromTrees({"[IN:A x ]", "[IN:B y ]"});
  EXPECT_EQ(FilterUnsupported(none).size(), 2u);
}

Corpus TenOverThree() {
  return FromTrees({"[IN:A a ]", "[IN:B b ]", "[IN:A c ]", "[IN:C d ]",
                    "[IN:A e ]", "[IN:B f ]", "[IN:C g ]", "[IN:A h ]",
                    "[IN:B i ]", "[IN:A j ]"});
}

TEST(SubsampleTest, OnePerTemplateDeterministic) {
  Corpus c = TenOverThree();
  Corpus a = SubsampleOnePerTemplate(c, 42);
  Corpus b = SubsampleOnePerTemplate(c, 42);
  ASSERT_EQ(a.size(), 3u);
  ASSERT_EQ(b.size(), 3u);
  std::set<std::string> keys;
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.items[i].tree, b.items[i].tree);
    keys.insert(a.items[i].template_key);
  }
  EXPECT_EQ(keys.size(), 3u);
}

// Independent re-implementation of the documented draw: groups in key
// order, one rejection-sampled index per group from an mt19937_64 stream.
TEST(SubsampleTest, MatchesDocumentedAlgorithm) {
  Corpus c = TenOverThree();
  for (uint64_t seed : {0, 1, 42, 1234567}) {
    std::map<std::string, std::vector<size_t>> groups;
    for (size_t i = 0; i < c.size(); ++i) {
      groups[c.items[i].template_key].push_back(i);
    }
    std::mt19937_64 engine(seed);
    std::vector<size_t> picked;
    for (const auto &[key, members] : groups) {
      const uint64_t n = members.size();
      const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
      uint64_t x;
      do {
        x = engine();
      } while (x >= limit);
      picked.push_back(members[x % n]);
    }
    std::sort(picked.begin(), picked.end());
    Corpus sub = SubsampleOnePerTemplate(c, seed);
    ASSERT_EQ(sub.size(), picked.size());
    for (size_t i = 0; i < picked.size(); ++i) {
      EXPECT_EQ(sub.items[i].tree, c.items[picked[i]].tree) << seed;
    }
  }
}

TEST(SubsampleTest, AllDistinctIsIdentity) {
  Corpus c = FromTrees({"[IN:A a ]", "[IN:B b ]", "[IN:C [SL:D d ] ]"});
  for (uint64_t seed : {0, 7, 99}) {
    Corpus s = SubsampleOnePerTemplate(c, seed);
    ASSERT_EQ(s.size(), 3u);
    for (size_t i = 0; i < 3; ++i) EXPECT_EQ(s.items[i].tree, c.items[i].tree);
  }
}

TEST(SubsampleTest, CapLimitsTemplates) {
  Corpus c = TenOverThree();
  Corpus s = SubsampleOnePerTemplate(c, 3, 2);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_NE(s.items[0].template_key, s.items[1].template_key);
  EXPECT_EQ(SubsampleOnePerTemplate(c, 3, 10).size(), 3u);
}

TEST(BucketTest, Boundaries) {
  FrequencyTable t;
  t.counts = {{"one", 1}, {"four", 4}, {"five", 5}, {"big", 1511}};
  EXPECT_EQ(FrequencyBucket(t, "absent"), Bucket::kUnseen);
  EXPECT_EQ(FrequencyBucket(t, "one"), Bucket::kRare);
  EXPECT_EQ(FrequencyBucket(t, "four"), Bucket::kRare);
  EXPECT_EQ(FrequencyBucket(t, "five"), Bucket::kFrequent);
  EXPECT_EQ(FrequencyBucket(t, "big"), Bucket::kFrequent);
  EXPECT_STREQ(BucketName(Bucket::kFrequent), "f>=5");
  EXPECT_STREQ(BucketName(Bucket::kRare), "f<5");
  EXPECT_STREQ(BucketName(Bucket::kUnseen), "f=0");
}

TEST(DistinctTemplatesTest, FirstAppearanceOrder) {
  std::vector<Template> ts = DistinctTemplates(
      FromTrees({"[IN:B x ]", "[IN:A y ]", "[IN:B z ]"}));
  ASSERT_EQ(ts.size(), 2u);
  EXPECT_EQ(TemplateKey(ts[0]), "[IN:B [mask] ]");
  EXPECT_EQ(TemplateKey(ts[1]), "[IN:A [mask] ]");
}

}  // namespace
}  // namespace topaug
