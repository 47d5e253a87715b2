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

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "topaug/rng.h"

namespace topaug {
namespace {

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

int RequiredColumns(const ColumnLayout &layout) {
  return std::max({layout.raw, layout.tokens, layout.tree}) + 1;
}

}  // namespace

const char *SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kValid:
      return "valid";
    case Split::kTest:
      return "test";
  }
  return "unknown";
}

AnnotatedUtterance AnnotatedUtterance::FromTree(ParseTree tree,
                                                std::string raw) {
  AnnotatedUtterance item;
  item.tokens = UtteranceOf(tree);
  item.raw = raw.empty() ? JoinTokens(item.tokens) : std::move(raw);
  item.template_key = TemplateKey(ExtractTemplate(tree));
  item.tree = std::move(tree);
  return item;
}

LabelSet Corpus::Labels() const {
  LabelSet labels;
  for (const AnnotatedUtterance &item : items) {
    CollectLabels(item.tree.root, &labels);
  }
  return labels;
}

ColumnLayout ColumnLayout::FromSpec(const std::string &spec) {
  ColumnLayout layout{-1, -1, -1};
  std::stringstream in(spec);
  std::string role;
  int column = 0;
  while (std::getline(in, role, ',')) {
    if (role == "raw") {
      layout.raw = column;
    } else if (role == "tokens") {
      layout.tokens = column;
    } else if (role == "tree") {
      layout.tree = column;
    } else if (role != "_" && !role.empty()) {
      throw CorpusError("unknown column role '" + role + "'");
    }
    ++column;
  }
  if (layout.tree < 0) throw CorpusError("column layout has no tree column");
  return layout;
}

Corpus LoadTsvFromString(const std::string &content,
                         const LoadOptions &options, LoadReport *report) {
  LoadReport local;
  LoadReport &out = report ? *report : local;
  Corpus corpus;
  corpus.split = options.split;
  const int required = RequiredColumns(options.layout);

  std::istringstream in(content);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> fields = SplitTabs(line);
    std::string error;
    if (static_cast<int>(fields.size()) < required) {
      error = "expected " + std::to_string(required) + " columns, got " +
              std::to_string(fields.size());
    } else {
      try {
        ParseTree tree = ParseAnnotation(fields[options.layout.tree]);
        std::string raw =
            options.layout.raw >= 0 ? fields[options.layout.raw] : "";
        AnnotatedUtterance item =
            AnnotatedUtterance::FromTree(std::move(tree), std::move(raw));
        if (options.layout.tokens >= 0 &&
            SplitWhitespace(fields[options.layout.tokens]) != item.tokens) {
          ++out.token_mismatches;
        }
        corpus.items.push_back(std::move(item));
      } catch (const TreeError &e) {
        error = e.what();
      }
    }
    if (!error.empty()) {
      if (options.strict) {
        throw CorpusError("line " + std::to_string(line_no) + ": " + error);
      }
      out.errors.push_back({line_no, error});
    }
  }
  if (corpus.items.empty()) throw CorpusError("no valid lines");
  return corpus;
}

Corpus LoadTsv(const std::string &path, const LoadOptions &options,
               LoadReport *report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open " + path);
  std::ostringstream content;
  content << in.rdbuf();
  try {
    return LoadTsvFromString(content.str(), options, report);
  } catch (const CorpusError &e) {
    throw CorpusError(path + ": " + e.what());
  }
}

std::string ToTsv(const Corpus &corpus) {
  std::string out;
  for (const AnnotatedUtterance &item : corpus.items) {
    out += item.raw;
    out += '\t';
    out += JoinTokens(item.tokens);
    out += '\t';
    out += Serialize(item.tree);
    out += '\n';
  }
  return out;
}

std::vector<std::pair<std::string, uint64_t>> FrequencyTable::RankFrequency()
    const {
  std::vector<std::pair<std::string, uint64_t>> ranked(counts.begin(),
                                                       counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto &a, const auto &b) {
                     return a.second > b.second;
                   });
  return ranked;
}

double FrequencyTable::TopKMass(size_t k) const {
  if (total == 0) return 0.0;
  uint64_t mass = 0;
  auto ranked = RankFrequency();
  for (size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    mass += ranked[i].second;
  }
  return static_cast<double>(mass) / static_cast<double>(total);
}

double FrequencyTable::SingletonFraction() const {
  if (total == 0) return 0.0;
  uint64_t singletons = 0;
  for (const auto &[key, count] : counts) {
    if (count == 1) ++singletons;
  }
  return static_cast<double>(singletons) / static_cast<double>(total);
}

FrequencyTable TemplateStats(const Corpus &corpus) {
  FrequencyTable table;
  for (const AnnotatedUtterance &item : corpus.items) {
    ++table.counts[item.template_key];
    ++table.total;
  }
  return table;
}

nlohmann::json StatsToJson(const FrequencyTable &table, Split split) {
  nlohmann::json report;
  report["split"] = SplitName(split);
  report["items"] = table.total;
  report["distinct_templates"] = table.distinct();
  report["top_k_mass"] = {{"1", table.TopKMass(1)},
                          {"10", table.TopKMass(10)},
                          {"50", table.TopKMass(50)}};
  report["singleton_fraction"] = table.SingletonFraction();
  nlohmann::json series = nlohmann::json::array();
  size_t rank = 0;
  for (const auto &[key, count] : table.RankFrequency()) {
    series.push_back({{"rank", ++rank}, {"count", count}, {"template", key}});
  }
  report["rank_frequency"] = std::move(series);
  return report;
}

std::string RankFrequencyCsv(const FrequencyTable &table) {
  std::string out = "rank,count,template\n";
  size_t rank = 0;
  for (const auto &[key, count] : table.RankFrequency()) {
    // Keys never contain quotes, so quoting suffices for commas.
    out += std::to_string(++rank) + "," + std::to_string(count) + ",\"" +
           key + "\"\n";
  }
  return out;
}

bool IsUnsupported(const AnnotatedUtterance &item) {
  return item.tree.root.label.name.starts_with("UNSUPPORTED");
}

Corpus FilterUnsupported(const Corpus &corpus) {
  Corpus out;
  out.split = corpus.split;
  for (const AnnotatedUtterance &item : corpus.items) {
    if (!IsUnsupported(item)) out.items.push_back(item);
  }
  return out;
}

Corpus SubsampleOnePerTemplate(const Corpus &corpus, uint64_t seed,
                               std::optional<size_t> cap) {
  // Groups are visited in key order so the draw sequence does not depend on
  // the input order of templates.
  std::map<std::string, std::vector<size_t>> groups;
  for (size_t i = 0; i < corpus.items.size(); ++i) {
    groups[corpus.items[i].template_key].push_back(i);
  }
  std::vector<const std::vector<size_t> *> chosen_groups;
  for (const auto &[key, members] : groups) chosen_groups.push_back(&members);

  Rng rng(seed);
  if (cap && *cap < chosen_groups.size()) {
    // Partial Fisher-Yates, then restore key order.
    std::vector<size_t> order(chosen_groups.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (size_t i = 0; i < *cap; ++i) {
      size_t j = i + rng.Uniform(order.size() - i);
      std::swap(order[i], order[j]);
    }
    order.resize(*cap);
    std::sort(order.begin(), order.end());
    std::vector<const std::vector<size_t> *> kept;
    for (size_t i : order) kept.push_back(chosen_groups[i]);
    chosen_groups = std::move(kept);
  }

  std::vector<size_t> picked;
  picked.reserve(chosen_groups.size());
  for (const std::vector<size_t> *members : chosen_groups) {
    picked.push_back((*members)[rng.Uniform(members->size())]);
  }
  std::sort(picked.begin(), picked.end());

  Corpus out;
  out.split = corpus.split;
  for (size_t i : picked) out.items.push_back(corpus.items[i]);
  return out;
}

const char *BucketName(Bucket bucket) {
  switch (bucket) {
    case Bucket::kFrequent:
      return "f>=5";
    case Bucket::kRare:
      return "f<5";
    case Bucket::kUnseen:
      return "f=0";
  }
  return "unknown";
}

Bucket FrequencyBucket(const FrequencyTable &train_stats,
                       const std::string &key) {
  uint64_t f = train_stats.count(key);
  if (f == 0) return Bucket::kUnseen;
  if (f < 5) return Bucket::kRare;
  return Bucket::kFrequent;
}

std::vector<Template> DistinctTemplates(const Corpus &corpus) {
  std::vector<Template> out;
  std::set<std::string> seen;
  for (const AnnotatedUtterance &item : corpus.items) {
    if (seen.insert(item.template_key).second) {
      out.push_back(ExtractTemplate(item.tree));
    }
  }
  return out;
}

}  // namespace topaug
