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

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "topaug/infill.h"
#include "topaug/rng.h"

namespace topaug {
namespace {

constexpr uint64_t kInventorySeed = 20210;

using Phrases = std::vector<std::string>;

struct IntentSpec {
  std::string name;
  std::vector<std::string> slots;
  Phrases lead;
};

const std::vector<IntentSpec> &Intents() {
  static const std::vector<IntentSpec> intents = {
      {"GET_DIRECTIONS",
       {"DESTINATION", "SOURCE", "METHOD_TRAVEL", "WAYPOINT", "DATE_TIME"},
       {"directions", "take me", "navigate", "how do i get",
        "show me the way", "get me directions"}},
      {"GET_DISTANCE",
       {"DESTINATION", "SOURCE", "WAYPOINT"},
       {"how far is it", "how far", "distance", "how many miles",
        "what is the distance"}},
      {"GET_ESTIMATED_DURATION",
       {"DESTINATION", "SOURCE", "METHOD_TRAVEL", "DATE_TIME"},
       {"how long will it take", "how long to drive", "travel time",
        "how many minutes"}},
      {"GET_ESTIMATED_ARRIVAL",
       {"DESTINATION", "SOURCE", "METHOD_TRAVEL", "DATE_TIME"},
       {"when will i arrive", "what time will i get", "eta",
        "when do i reach"}},
      {"GET_INFO_TRAFFIC",
       {"LOCATION", "DATE_TIME", "DESTINATION", "PATH"},
       {"how is traffic", "traffic", "is there traffic", "any traffic",
        "how bad is traffic"}},
      {"GET_INFO_ROAD_CONDITION",
       {"LOCATION", "ROAD_CONDITION", "DATE_TIME", "PATH"},
       {"are the roads", "how are the roads", "road conditions", "is it"}},
      {"GET_LOCATION",
       {"CATEGORY_LOCATION", "LOCATION_MODIFIER", "POINT_ON_MAP", "LOCATION"},
       {"where is", "find", "show me", "locate", "where can i find"}},
      {"GET_EVENT",
       {"CATEGORY_EVENT", "NAME_EVENT", "LOCATION", "DATE_TIME"},
       {"what is happening", "any", "find me", "are there", "show"}},
      {"UPDATE_DIRECTIONS",
       {"DESTINATION", "WAYPOINT", "OBSTRUCTION", "METHOD_TRAVEL"},
       {"change route", "update my route", "reroute", "switch", "avoid"}},
      {"GET_INFO_ROUTE",
       {"DESTINATION", "OBSTRUCTION", "PATH", "SOURCE"},
       {"is the route", "how is my route", "what is the best route",
        "which way"}},
      {"GET_LOCATION_HOME",
       {"CONTACT"},
       {"home", "house", "place", "apartment"}},
      {"UNSUPPORTED_NAVIGATION",
       {},
       {"are there any good diners nearby", "what is the speed limit",
        "can i park here", "is the bridge open", "how much is gas"}},
  };
  return intents;
}

const std::map<std::string, Phrases> &SlotLexicons() {
  static const std::map<std::string, Phrases> lexicons = [] {
    // Place slots draw mostly from their own lexicon and share a small core,
    // so some fillers are ambiguous between slots.
    const Phrases shared = {"downtown", "work", "the airport"};
    auto with_shared = [&shared](Phrases own) {
      own.insert(own.end(), shared.begin(), shared.end());
      return own;
    };
    return std::map<std::string, Phrases>{
        {"DESTINATION",
         with_shared({"boston", "chicago", "seattle", "the beach",
                      "central park", "times square", "the mall"})},
        {"SOURCE",
         with_shared({"my place", "the hotel", "here", "my office",
                      "the parking lot", "campus"})},
        {"WAYPOINT",
         with_shared({"a gas station", "starbucks", "the bank",
                      "the pharmacy", "a rest stop"})},
        {"LOCATION",
         with_shared({"main street", "union square", "the station",
                      "midtown", "the north side", "the city"})},
        {"METHOD_TRAVEL",
         {"car", "driving", "walking", "bike", "bus", "train", "foot",
          "transit"}},
        {"DATE_TIME",
         {"tonight", "at 5 pm", "tomorrow morning", "now", "this weekend",
          "at noon", "in an hour", "monday"}},
        {"ROAD_CONDITION",
         {"icy", "flooded", "snowy", "wet", "closed", "slippery"}},
        {"CATEGORY_LOCATION",
         {"coffee shops", "gas stations", "restaurants", "parking",
          "hospitals", "pharmacies"}},
        {"LOCATION_MODIFIER",
         {"nearby", "near me", "closest", "around here", "in town"}},
        {"POINT_ON_MAP",
         {"the golden gate bridge", "city hall", "the museum", "pier 39",
          "the stadium"}},
        {"CATEGORY_EVENT",
         {"concerts", "festivals", "games", "shows", "parades"}},
        {"NAME_EVENT",
         {"the marathon", "comic con", "the parade", "the fair", "the game"}},
        {"OBSTRUCTION",
         {"tolls", "highways", "traffic", "construction", "accidents"}},
        {"CONTACT", {"mom", "my sister", "john", "dad", "my boss", "sarah"}},
        {"PATH",
         {"i-95", "the highway", "route 1", "the bridge", "the tunnel",
          "5th avenue"}},
    };
  }();
  return lexicons;
}

const Phrases &MiddlePhrases() {
  static const Phrases phrases = {"to",   "from", "via",  "by",
                                  "at",   "in",   "for",  "on",
                                  "through", "near", "with", "and then"};
  return phrases;
}

const Phrases &TrailingPhrases() {
  static const Phrases phrases = {"please", "now",    "today",
                                  "right now", "thanks", "asap"};
  return phrases;
}

const std::set<std::string> &NestableSlots() {
  static const std::set<std::string> slots = {"DESTINATION", "SOURCE",
                                              "LOCATION", "WAYPOINT"};
  return slots;
}

bool Chance(Rng *rng, double p) { return rng->UniformReal() < p; }

const IntentSpec &IntentByName(const std::string &name) {
  for (const IntentSpec &spec : Intents()) {
    if (spec.name == name) return spec;
  }
  return Intents().front();
}

// One intent constituent with up to max_slots slots.
Node BuildIntent(const IntentSpec &spec, int max_slots, int depth, Rng *rng) {
  std::vector<std::string> pool = spec.slots;
  int slots = 0;
  if (!pool.empty() && max_slots > 0) {
    slots = static_cast<int>(rng->Uniform(static_cast<uint64_t>(
        std::min<int>(max_slots, static_cast<int>(pool.size())) + 1)));
  }
  std::vector<Node> children;
  children.push_back(Node::Mask());
  for (int s = 0; s < slots; ++s) {
    size_t pick = rng->Uniform(pool.size());
    std::string slot = pool[pick];
    pool.erase(pool.begin() + static_cast<long>(pick));
    if (s > 0 && Chance(rng, 0.9)) children.push_back(Node::Mask());
    Node filler = Node::Mask();
    if (depth == 0 && NestableSlots().contains(slot) && Chance(rng, 0.15)) {
      static const char *nested[] = {"GET_LOCATION_HOME", "GET_LOCATION",
                                     "GET_EVENT"};
      filler = BuildIntent(IntentByName(nested[rng->Uniform(3)]), 2,
                           depth + 1, rng);
    }
    children.push_back(Node::NonTerminal(Label::Slot(slot), {filler}));
  }
  if (depth == 0 && slots > 0 && children.back().kind != NodeKind::kMask &&
      Chance(rng, 0.3)) {
    children.push_back(Node::Mask());
  }
  return Node::NonTerminal(Label::Intent(spec.name), std::move(children));
}

size_t CountNodes(const Node &node) {
  size_t n = 1;
  for (const Node &child : node.children) n += CountNodes(child);
  return n;
}

ToyTreebank BuildInventory() {
  Rng rng(kInventorySeed);
  std::set<std::string> seen;
  std::vector<std::pair<size_t, Template>> found;  // (tiebreak, template)
  for (int attempt = 0; found.size() < kToyTemplates && attempt < 10000000;
       ++attempt) {
    const IntentSpec &spec = Intents()[rng.Uniform(kToyIntents)];
    Template tmpl{BuildIntent(spec, 3, 0, &rng)};
    if (seen.insert(TemplateKey(tmpl)).second) {
      found.emplace_back(rng.Next(), std::move(tmpl));
    }
  }
  // Simpler templates take the head of the distribution.
  std::stable_sort(found.begin(), found.end(), [](const auto &a, const auto &b) {
    size_t na = CountNodes(a.second.root), nb = CountNodes(b.second.root);
    if (na != nb) return na < nb;
    return a.first < b.first;
  });
  ToyTreebank bank;
  for (size_t r = 0; r < found.size(); ++r) {
    bank.templates.push_back(std::move(found[r].second));
    bank.weights.push_back(
        1.0 / std::pow(static_cast<double>(r + 1), kToyZipfExponent));
  }
  return bank;
}

const std::string &PickPhrase(const Phrases &phrases, Rng *rng) {
  return phrases[rng->Uniform(phrases.size())];
}

// Spans for every mask in pre-order.
void FillSpans(const Node &node, Rng *rng, std::vector<Tokens> *spans) {
  const size_t n = node.children.size();
  for (size_t i = 0; i < n; ++i) {
    const Node &child = node.children[i];
    if (child.kind == NodeKind::kNonTerminal) {
      FillSpans(child, rng, spans);
      continue;
    }
    const Phrases *phrases;
    if (node.label.kind == LabelKind::kSlot) {
      phrases = &SlotLexicons().at(node.label.name);
    } else if (i == 0) {
      phrases = &IntentByName(node.label.name).lead;
    } else if (i + 1 == n) {
      phrases = &TrailingPhrases();
    } else {
      phrases = &MiddlePhrases();
    }
    spans->push_back(SplitWhitespace(PickPhrase(*phrases, rng)));
  }
}

}  // namespace

const ToyTreebank &GetToyTreebank() {
  static const ToyTreebank bank = BuildInventory();
  return bank;
}

Corpus SampleToyCorpus(size_t n, uint64_t seed, Split split) {
  const ToyTreebank &bank = GetToyTreebank();
  std::vector<double> cumulative;
  double total = 0.0;
  for (double w : bank.weights) cumulative.push_back(total += w);

  Rng rng(seed);
  Corpus corpus;
  corpus.split = split;
  for (size_t i = 0; i < n; ++i) {
    const double u = rng.UniformReal() * total;
    size_t t = static_cast<size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) -
        cumulative.begin());
    t = std::min(t, bank.templates.size() - 1);
    std::vector<Tokens> spans;
    FillSpans(bank.templates[t].root, &rng, &spans);
    corpus.items.push_back(
        AnnotatedUtterance::FromTree(FillTemplate(bank.templates[t], spans)));
  }
  return corpus;
}

}  // namespace topaug
