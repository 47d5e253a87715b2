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

#include "topaug/toy_treebank.h"

#include <gtest/gtest.h>

#include <set>

namespace topaug {
namespace {

TEST(ToyTreebankTest, InventoryShape) {
  const ToyTreebank &toy = GetToyTreebank();
  ASSERT_EQ(toy.templates.size(), kToyTemplates);
  ASSERT_EQ(toy.weights.size(), kToyTemplates);
  std::set<std::string> keys;
  LabelSet labels;
  for (const Template &t : toy.templates) {
    keys.insert(TemplateKey(t));
    CollectLabels(t.root, &labels);
    EXPECT_NO_THROW(ValidateTemplate(t));
  }
  EXPECT_EQ(keys.size(), kToyTemplates);
  size_t intents = 0, slots = 0;
  for (const Label &l : labels) {
    (l.kind == LabelKind::kIntent ? intents : slots)++;
  }
  EXPECT_EQ(intents, static_cast<size_t>(kToyIntents));
  EXPECT_EQ(slots, static_cast<size_t>(kToySlots));
  for (size_t r = 0; r < kToyTemplates; ++r) {
    EXPECT_DOUBLE_EQ(toy.weights[r], 1.0 / static_cast<double>(r + 1));
  }
}

TEST(ToyTreebankTest, SamplingIsDeterministicAndSkewed) {
  Corpus a = SampleToyCorpus(2000, kToyTrainSeed, Split::kTrain);
  Corpus b = SampleToyCorpus(2000, kToyTrainSeed, Split::kTrain);
  ASSERT_EQ(a.size(), 2000u);
  EXPECT_EQ(ToTsv(a), ToTsv(b));
  EXPECT_NE(ToTsv(a), ToTsv(SampleToyCorpus(2000, kToyTestSeed, Split::kTest)));
  for (const auto &item : a.items) {
    EXPECT_EQ(ParseAnnotation(Serialize(item.tree)), item.tree);
  }
  FrequencyTable t = TemplateStats(a);
  EXPECT_LT(t.distinct(), 2000u);
  EXPECT_GT(t.TopKMass(10), 0.2);
  EXPECT_GT(t.SingletonFraction(), 0.05);
}

}  // namespace
}  // namespace topaug
