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

// Data model for TOP-style hierarchical annotations.
//
// An annotation is a bracketed tree whose non-terminals are intents ("IN:")
// and slots ("SL:") and whose terminals are whitespace-delimited tokens:
//
//   [IN:GET_DISTANCE how far is [SL:DESTINATION boston ] ]
//
// A template is the same skeleton with every maximal run of sibling tokens
// collapsed into a single [mask] terminal:
//
//   [IN:GET_DISTANCE [mask] [SL:DESTINATION [mask] ] ]
//
// Besides the canonical form, trees have a "generator" form used for
// seq2seq infilling data: labels are lowercased and each closing bracket
// names the constituent it closes ("sl:destination]").

#ifndef TOPAUG_TOP_TREE_H_
#define TOPAUG_TOP_TREE_H_

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace topaug {

enum class LabelKind { kIntent, kSlot };

struct Label {
  LabelKind kind = LabelKind::kIntent;
  std::string name;

  static Label Intent(std::string name) {
    return {LabelKind::kIntent, std::move(name)};
  }
  static Label Slot(std::string name) {
    return {LabelKind::kSlot, std::move(name)};
  }

  // "IN:NAME" or "SL:NAME".
  std::string ToString() const;

  // Parses "IN:NAME" / "SL:NAME". Returns nullopt on bad syntax. Names must
  // be non-empty and free of whitespace, brackets and lowercase letters.
  static std::optional<Label> Parse(std::string_view text);

  auto operator<=>(const Label &) const = default;
  bool operator==(const Label &) const = default;
};

using LabelSet = std::set<Label>;
using Tokens = std::vector<std::string>;

enum class NodeKind { kNonTerminal, kToken, kMask };

struct Node {
  NodeKind kind = NodeKind::kToken;
  Label label;                 // kNonTerminal only
  std::string text;            // kToken only
  std::vector<Node> children;  // kNonTerminal only

  static Node Token(std::string text);
  static Node Mask();
  static Node NonTerminal(Label label, std::vector<Node> children);

  bool is_terminal() const { return kind != NodeKind::kNonTerminal; }

  bool operator==(const Node &) const = default;
};

// A fully lexicalized annotation (y). The root is an intent.
struct ParseTree {
  Node root;
  bool operator==(const ParseTree &) const = default;
};

// An annotation skeleton (z) whose terminals are all masks.
struct Template {
  Node root;
  bool operator==(const Template &) const = default;
};

enum class TreeErrorCode {
  kUnbalancedBrackets,
  kEmptyNonTerminal,
  kRootNotIntent,
  kIllegalChildKind,
  kBadLabelSyntax,
  kIllegalTerminal,  // token in a template, mask in an annotation,
                     // adjacent masks
};

const char *TreeErrorCodeName(TreeErrorCode code);

class TreeError : public std::runtime_error {
 public:
  TreeError(TreeErrorCode code, size_t offset, const std::string &message);

  TreeErrorCode code() const { return code_; }
  // Byte offset into the parsed text.
  size_t offset() const { return offset_; }

 private:
  TreeErrorCode code_;
  size_t offset_;
};

enum class TreeForm { kCanonical, kGeneratorSource, kGeneratorTarget };

// Parses a linearized tree. Throws TreeError.
ParseTree ParseAnnotation(std::string_view text);
Template ParseTemplate(std::string_view text);

// Checks the structural invariants. Throws TreeError (offset 0).
void ValidateAnnotation(const ParseTree &tree);
void ValidateTemplate(const Template &tmpl);

// Canonical: "[IN:A tok [SL:B tok ] ]". Generator forms: lowercased labels
// and labeled closers. kGeneratorSource on a ParseTree serializes its
// template; on a Template both generator forms coincide.
std::string Serialize(const ParseTree &tree,
                      TreeForm form = TreeForm::kCanonical);
std::string Serialize(const Template &tmpl,
                      TreeForm form = TreeForm::kCanonical);

// In-order terminal tokens.
Tokens UtteranceOf(const ParseTree &tree);

Template ExtractTemplate(const ParseTree &tree);

// Canonical serialization; equal templates have equal keys.
std::string TemplateKey(const Template &tmpl);

// Every intent and slot label occurring in the tree.
LabelSet LabelsOf(const ParseTree &tree);
void CollectLabels(const Node &node, LabelSet *labels);

enum class RejectReason { kNone, kUnknownLabel, kMismatchedClosing, kStructural };

const char *RejectReasonName(RejectReason reason);
std::optional<RejectReason> RejectReasonFromName(std::string_view name);

struct GeneratorParse {
  std::optional<ParseTree> tree;
  RejectReason reason = RejectReason::kNone;
  std::string detail;

  bool ok() const { return tree.has_value(); }
};

// Converts a generator-target string back to an annotation. Rejections are
// returned, not thrown.
GeneratorParse FromGeneratorOutput(std::string_view text,
                                   const LabelSet &known_labels);

// Splits on ASCII whitespace.
Tokens SplitWhitespace(std::string_view text);
std::string JoinTokens(const Tokens &tokens);

}  // namespace topaug

#endif  // TOPAUG_TOP_TREE_H_
