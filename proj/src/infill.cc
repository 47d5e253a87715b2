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

#include "topaug/infill.h"

#include <algorithm>
#include <sstream>

#include "topaug/parallel.h"
#include "topaug/rng.h"

namespace topaug {
namespace {

// Visits every maximal token run of the tree with its context.
template <typename Fn>
void ForEachRun(const Node &node, std::vector<Label> *path, Fn &&fn) {
  path->push_back(node.label);
  int slot_index = 0;
  Tokens run;
  auto flush = [&] {
    if (run.empty()) return;
    fn(MaskContext{*path, slot_index++}, run);
    run.clear();
  };
  for (const Node &child : node.children) {
    if (child.kind == NodeKind::kToken) {
      run.push_back(child.text);
    } else {
      flush();
      ForEachRun(child, path, fn);
    }
  }
  flush();
  path->pop_back();
}

void CollectContexts(const Node &node, std::vector<Label> *path,
                     std::vector<MaskContext> *out) {
  path->push_back(node.label);
  int slot_index = 0;
  for (const Node &child : node.children) {
    if (child.kind == NodeKind::kMask) {
      out->push_back(MaskContext{*path, slot_index++});
    } else if (child.kind == NodeKind::kNonTerminal) {
      CollectContexts(child, path, out);
    }
  }
  path->pop_back();
}

Node FillNode(const Node &node, const std::vector<Tokens> &spans,
              size_t *next) {
  std::vector<Node> children;
  for (const Node &child : node.children) {
    if (child.kind == NodeKind::kMask) {
      if (*next >= spans.size()) {
        throw InfillError("fewer spans than masks");
      }
      for (const std::string &token : spans[(*next)++]) {
        children.push_back(Node::Token(token));
      }
    } else if (child.kind == NodeKind::kNonTerminal) {
      children.push_back(FillNode(child, spans, next));
    } else {
      children.push_back(child);
    }
  }
  return Node::NonTerminal(node.label, std::move(children));
}

size_t SampleIndex(const Distribution &dist, Rng *rng) {
  const double u = rng->UniformReal();
  double cumulative = 0.0;
  for (size_t i = 0; i < dist.size(); ++i) {
    cumulative += dist[i].prob;
    if (u < cumulative) return i;
  }
  return dist.size() - 1;
}

// Counts a drawn sample and appends it unless dedup or exclusion drops it.
void Admit(SyntheticSample sample, const GenerateOptions &options,
           std::set<std::string> *seen, GenerateStats *stats,
           std::vector<SyntheticSample> *out) {
  ++stats->drawn;
  if (sample.valid()) {
    if (options.dedup) {
      const std::string key = sample.DedupKey();
      if (options.exclusion.contains(key)) {
        ++stats->excluded;
        return;
      }
      if (!seen->insert(key).second) {
        ++stats->duplicates;
        return;
      }
    }
    for (int level : sample.backoff) ++stats->backoff_histogram[level];
  } else {
    ++stats->rejected;
  }
  out->push_back(std::move(sample));
}

// Per-template draw counts.
std::vector<int> DrawCounts(size_t templates, const GenerateOptions &options) {
  std::vector<int> counts(templates, options.with_replacement ? 0 : options.k);
  if (options.with_replacement && templates > 0) {
    Rng rng(options.seed);
    const size_t draws = templates * static_cast<size_t>(options.k);
    for (size_t i = 0; i < draws; ++i) ++counts[rng.Uniform(templates)];
  }
  return counts;
}

void CheckOptions(const GenerateOptions &options) {
  if (options.k < 1) throw InfillError("k must be at least 1");
  if (!(options.p > 0.0 && options.p <= 1.0)) {
    throw InfillError("p must lie in (0, 1]");
  }
}

void MergeStats(const GenerateStats &from, GenerateStats *into) {
  into->drawn += from.drawn;
  into->duplicates += from.duplicates;
  into->excluded += from.excluded;
  into->rejected += from.rejected;
  for (const auto &[level, n] : from.backoff_histogram) {
    into->backoff_histogram[level] += n;
  }
}

}  // namespace

std::string MaskContext::Key() const {
  std::string key;
  for (const Label &label : path) {
    if (!key.empty()) key += '/';
    key += label.ToString();
  }
  return key + "#" + std::to_string(slot_index);
}

std::string MaskContext::ParentSlotKey() const {
  return parent().ToString() + "#" + std::to_string(slot_index);
}

std::string MaskContext::ParentKey() const { return parent().ToString(); }

std::vector<MaskContext> MaskContexts(const Template &tmpl) {
  std::vector<MaskContext> out;
  std::vector<Label> path;
  CollectContexts(tmpl.root, &path, &out);
  return out;
}

Distribution SpanCounts::Normalize() const {
  Distribution dist;
  dist.reserve(counts.size());
  for (const auto &[span, n] : counts) {
    dist.push_back({span, static_cast<double>(n) / static_cast<double>(total)});
  }
  return dist;
}

const SpanCounts *InfillerModel::Lookup(const MaskContext &context,
                                        BackoffLevel *level) const {
  if (auto it = full.find(context.Key()); it != full.end()) {
    *level = BackoffLevel::kFull;
    return &it->second;
  }
  if (auto it = parent_slot.find(context.ParentSlotKey());
      it != parent_slot.end()) {
    *level = BackoffLevel::kParentSlot;
    return &it->second;
  }
  if (auto it = parent.find(context.ParentKey()); it != parent.end()) {
    *level = BackoffLevel::kParent;
    return &it->second;
  }
  *level = BackoffLevel::kGlobal;
  return global.total > 0 ? &global : nullptr;
}

InfillerModel FitInfiller(const Corpus &corpus) {
  if (corpus.items.empty()) throw InfillError("EmptyCorpus: no training items");
  InfillerModel model;
  for (const AnnotatedUtterance &item : corpus.items) {
    std::vector<Label> path;
    ForEachRun(item.tree.root, &path,
               [&model](const MaskContext &context, const Tokens &span) {
                 model.full[context.Key()].Add(span);
                 model.parent_slot[context.ParentSlotKey()].Add(span);
                 model.parent[context.ParentKey()].Add(span);
                 model.global.Add(span);
               });
    LabelSet labels;
    CollectLabels(item.tree.root, &labels);
    for (const Label &label : labels) model.vocabulary.insert(label.ToString());
    for (const std::string &token : item.tokens) {
      model.vocabulary.insert(token);
    }
  }
  return model;
}

Distribution TopPTruncate(const Distribution &dist, double p) {
  if (dist.empty()) {
    throw InfillError("DegenerateDistribution: empty support");
  }
  if (!(p > 0.0 && p <= 1.0)) throw InfillError("p must lie in (0, 1]");
  Distribution sorted = dist;
  std::sort(sorted.begin(), sorted.end(),
            [](const WeightedSpan &a, const WeightedSpan &b) {
              if (a.prob != b.prob) return a.prob > b.prob;
              return a.span < b.span;
            });
  size_t keep = sorted.size();
  if (p < 1.0) {
    double cumulative = 0.0;
    for (size_t i = 0; i < sorted.size(); ++i) {
      cumulative += sorted[i].prob;
      if (cumulative >= p - kNucleusSlack) {
        keep = i + 1;
        break;
      }
    }
  }
  sorted.resize(keep);
  double mass = 0.0;
  for (const WeightedSpan &w : sorted) mass += w.prob;
  for (WeightedSpan &w : sorted) w.prob /= mass;
  return sorted;
}

const char *FilterVerdictName(FilterVerdict verdict) {
  switch (verdict) {
    case FilterVerdict::kPending:
      return "Pending";
    case FilterVerdict::kKept:
      return "Kept";
    case FilterVerdict::kDropped:
      return "Dropped";
  }
  return "Unknown";
}

std::string DedupKey(const std::string &template_key,
                     const Tokens &utterance) {
  return template_key + "\t" + JoinTokens(utterance);
}

std::string SyntheticSample::DedupKey() const {
  return topaug::DedupKey(template_key, utterance);
}

nlohmann::json SampleToJson(const SyntheticSample &sample) {
  nlohmann::json j;
  j["template_key"] = sample.template_key;
  j["source"] = sample.source;
  j["candidate"] = sample.candidate;
  j["tree"] = sample.tree ? nlohmann::json(Serialize(*sample.tree))
                          : nlohmann::json(nullptr);
  j["utterance"] = JoinTokens(sample.utterance);
  j["generator"] = sample.generator_id;
  j["seed"] = sample.seed;
  j["validity"] = sample.valid() ? "Valid" : RejectReasonName(sample.rejection);
  if (!sample.rejection_detail.empty()) j["detail"] = sample.rejection_detail;
  j["verdict"] = FilterVerdictName(sample.verdict);
  if (!sample.backoff.empty()) j["backoff"] = sample.backoff;
  return j;
}

SyntheticSample SampleFromJson(const nlohmann::json &j) {
  SyntheticSample sample;
  sample.template_key = j.at("template_key").get<std::string>();
  sample.source = j.value("source", "");
  sample.candidate = j.value("candidate", "");
  if (j.contains("tree") && j["tree"].is_string()) {
    sample.tree = ParseAnnotation(j["tree"].get<std::string>());
    sample.utterance = UtteranceOf(*sample.tree);
  } else {
    sample.utterance = SplitWhitespace(j.value("utterance", ""));
  }
  sample.generator_id = j.value("generator", "");
  sample.seed = j.value("seed", uint64_t{0});
  const std::string validity = j.value("validity", "Valid");
  if (validity != "Valid") {
    std::optional<RejectReason> reason = RejectReasonFromName(validity);
    if (!reason) throw InfillError("unknown validity '" + validity + "'");
    sample.rejection = *reason;
    sample.rejection_detail = j.value("detail", "");
  }
  const std::string verdict = j.value("verdict", "Pending");
  if (verdict == "Kept") {
    sample.verdict = FilterVerdict::kKept;
  } else if (verdict == "Dropped") {
    sample.verdict = FilterVerdict::kDropped;
  } else if (verdict != "Pending") {
    throw InfillError("unknown verdict '" + verdict + "'");
  }
  if (j.contains("backoff")) {
    sample.backoff = j["backoff"].get<std::vector<int>>();
  }
  if (sample.valid() && !sample.tree) {
    throw InfillError("valid sample without a tree");
  }
  return sample;
}

std::string SamplesToJsonl(const std::vector<SyntheticSample> &samples) {
  std::string out;
  for (const SyntheticSample &sample : samples) {
    out += SampleToJson(sample).dump();
    out += '\n';
  }
  return out;
}

std::vector<SyntheticSample> SamplesFromJsonl(const std::string &text) {
  std::vector<SyntheticSample> samples;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      samples.push_back(SampleFromJson(nlohmann::json::parse(line)));
    } catch (const std::exception &e) {
      throw InfillError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return samples;
}

ParseTree FillTemplate(const Template &tmpl, const std::vector<Tokens> &spans) {
  size_t next = 0;
  ParseTree tree{FillNode(tmpl.root, spans, &next)};
  if (next != spans.size()) throw InfillError("more spans than masks");
  return tree;
}

std::set<std::string> ExclusionSet(const Corpus &corpus) {
  std::set<std::string> out;
  for (const AnnotatedUtterance &item : corpus.items) {
    out.insert(DedupKey(item.template_key, item.tokens));
  }
  return out;
}

std::vector<SyntheticSample> Generate(const InfillerModel &model,
                                      const std::vector<Template> &templates,
                                      const GenerateOptions &options,
                                      GenerateStats *stats) {
  CheckOptions(options);
  if (model.global.total == 0) throw InfillError("infiller is not fitted");
  const std::vector<int> counts = DrawCounts(templates.size(), options);

  std::vector<std::vector<SyntheticSample>> per_template(templates.size());
  std::vector<GenerateStats> per_stats(templates.size());
  ParallelFor(templates.size(), options.jobs, [&](size_t t) {
    const Template &tmpl = templates[t];
    const std::string key = TemplateKey(tmpl);
    const std::string source = Serialize(tmpl, TreeForm::kGeneratorSource);
    const uint64_t stream_seed = DeriveSeed(options.seed, key);
    Rng rng(stream_seed);

    std::vector<Distribution> nuclei;
    std::vector<int> levels;
    for (const MaskContext &context : MaskContexts(tmpl)) {
      BackoffLevel level;
      const SpanCounts *table = model.Lookup(context, &level);
      nuclei.push_back(TopPTruncate(table->Normalize(), options.p));
      levels.push_back(static_cast<int>(level));
    }

    std::set<std::string> seen;
    for (int draw = 0; draw < counts[t]; ++draw) {
      std::vector<Tokens> spans;
      spans.reserve(nuclei.size());
      for (const Distribution &nucleus : nuclei) {
        spans.push_back(nucleus[SampleIndex(nucleus, &rng)].span);
      }
      SyntheticSample sample;
      sample.template_key = key;
      sample.source = source;
      sample.tree = FillTemplate(tmpl, spans);
      sample.candidate = Serialize(*sample.tree, TreeForm::kGeneratorTarget);
      sample.utterance = UtteranceOf(*sample.tree);
      sample.generator_id = kBuiltinGeneratorId;
      sample.seed = stream_seed;
      sample.backoff = levels;
      Admit(std::move(sample), options, &seen, &per_stats[t],
            &per_template[t]);
    }
  });

  std::vector<SyntheticSample> out;
  GenerateStats total;
  for (size_t t = 0; t < templates.size(); ++t) {
    for (SyntheticSample &s : per_template[t]) out.push_back(std::move(s));
    MergeStats(per_stats[t], &total);
  }
  if (stats) *stats = std::move(total);
  return out;
}

ExternalGenerateResult ExternalGenerate(const AdapterOptions &adapter,
                                        const std::vector<Template> &templates,
                                        const GenerateOptions &options,
                                        const LabelSet &labels) {
  CheckOptions(options);
  const std::vector<int> counts = DrawCounts(templates.size(), options);
  std::vector<nlohmann::json> requests;
  std::vector<std::string> keys, sources;
  std::vector<uint64_t> seeds;
  for (size_t t = 0; t < templates.size(); ++t) {
    keys.push_back(TemplateKey(templates[t]));
    sources.push_back(Serialize(templates[t], TreeForm::kGeneratorSource));
    seeds.push_back(DeriveSeed(options.seed, keys.back()));
  }

  ExternalGenerateResult result;
  if (templates.empty()) return result;
  // The protocol fixes one k for every request, so replacement mode asks
  // for the largest per-template count and keeps the first counts[t].
  const int k = *std::max_element(counts.begin(), counts.end());
  for (size_t t = 0; t < templates.size(); ++t) {
    if (counts[t] == 0) continue;
    requests.push_back({{"id", static_cast<int64_t>(t)},
                        {"source", sources[t]},
                        {"k", k},
                        {"p", options.p},
                        {"seed", seeds[t]}});
  }
  AdapterRun run = RunLineProtocol(
      adapter, requests, static_cast<size_t>(k),
      [](const nlohmann::json &response) -> std::string {
        if (!response.contains("candidate") ||
            !response["candidate"].is_string()) {
          return "response without string candidate";
        }
        return "";
      });
  result.error = run.error;

  const std::string generator_id = "external:" + adapter.command;
  for (size_t t = 0; t < templates.size(); ++t) {
    auto it = run.complete.find(static_cast<int64_t>(t));
    if (it == run.complete.end()) continue;
    std::set<std::string> seen;
    for (int i = 0; i < counts[t]; ++i) {
      SyntheticSample sample;
      sample.template_key = keys[t];
      sample.source = sources[t];
      sample.candidate = it->second[i]["candidate"].get<std::string>();
      sample.generator_id = generator_id;
      sample.seed = seeds[t];
      GeneratorParse parsed = FromGeneratorOutput(sample.candidate, labels);
      if (parsed.ok() &&
          TemplateKey(ExtractTemplate(*parsed.tree)) != keys[t]) {
        parsed.reason = RejectReason::kStructural;
        parsed.detail = "skeleton differs from the template";
        parsed.tree.reset();
      }
      if (parsed.ok()) {
        sample.utterance = UtteranceOf(*parsed.tree);
        sample.tree = std::move(parsed.tree);
      } else {
        sample.rejection = parsed.reason;
        sample.rejection_detail = parsed.detail;
      }
      Admit(std::move(sample), options, &seen, &result.stats,
            &result.samples);
    }
  }
  return result;
}

}  // namespace topaug
