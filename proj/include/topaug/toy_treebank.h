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

// A fixed synthetic navigation treebank for end-to-end experiments.
//
// Twelve intents and fifteen slots combine into a fixed inventory of
// templates whose frequencies follow a Zipf law, so that a sample of a few
// thousand utterances has a head of frequent templates and a long tail of
// rare and unseen ones. Masks are filled from per-intent carrier phrases and
// per-slot lexicons that share entity words across slots.

#ifndef TOPAUG_TOY_TREEBANK_H_
#define TOPAUG_TOY_TREEBANK_H_

#include <cstdint>
#include <vector>

#include "topaug/corpus.h"
#include "topaug/top_tree.h"

namespace topaug {

struct ToyTreebank {
  std::vector<Template> templates;  // by rank, most frequent first
  std::vector<double> weights;      // unnormalized Zipf weights
};

inline constexpr int kToyIntents = 12;
inline constexpr int kToySlots = 15;
inline constexpr size_t kToyTemplates = 1500;
inline constexpr double kToyZipfExponent = 1.0;

// Seeds of the fixed experiment draw.
inline constexpr uint64_t kToyTrainSeed = 1;
inline constexpr uint64_t kToyValidSeed = 3;
inline constexpr uint64_t kToyTestSeed = 2;

// The fixed inventory. Identical on every call.
const ToyTreebank &GetToyTreebank();

// Draws n annotations: templates by Zipf weight, masks from the lexicons.
Corpus SampleToyCorpus(size_t n, uint64_t seed, Split split);

}  // namespace topaug

#endif  // TOPAUG_TOY_TREEBANK_H_
