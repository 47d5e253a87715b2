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

#include "topaug/top_tree.h"

#include <cctype>
#include <utility>

namespace topaug {
namespace {

constexpr std::string_view kMaskText = "[mask]";

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool IsDelimiter(char c) { return IsSpace(c) || c == '[' || c == ']'; }

bool ValidName(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (IsDelimiter(c) || (c >= 'a' && c <= 'z')) return false;
  }
  return true;
}

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string Upper(std::string_view s) {
  std::string out(s);
  for (char &c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// Whether `child` may appear directly under a non-terminal of kind `parent`.
bool ChildAllowed(LabelKind parent, const Node &child) {
  if (child.kind != NodeKind::kNonTerminal) return true;
  return child.label.kind != parent;
}

class LinearizedParser {
 public:
  LinearizedParser(std::string_view text, bool template_mode)
      : text_(text), template_mode_(template_mode) {}

  Node Parse() {
    std::optional<Node> root;
    while (true) {
      SkipSpace();
      if (pos_ >= text_.size()) break;
      const size_t start = pos_;
      if (AtMask()) {
        if (!template_mode_) {
          Fail(TreeErrorCode::kIllegalTerminal, start,
               "[mask] in an annotation");
        }
        pos_ += kMaskText.size();
        Attach(Node::Mask(), start, &root);
      } else if (text_[pos_] == '[') {
        ++pos_;
        const size_t label_start = pos_;
        while (pos_ < text_.size() && !IsDelimiter(text_[pos_])) ++pos_;
        std::string_view raw = text_.substr(label_start, pos_ - label_start);
        std::optional<Label> label = Label::Parse(raw);
        if (!label) {
          Fail(TreeErrorCode::kBadLabelSyntax, start,
               "bad label '" + std::string(raw) + "'");
        }
        if (stack_.empty()) {
          if (root) {
            Fail(TreeErrorCode::kUnbalancedBrackets, start,
                 "text after the root constituent");
          }
          if (label->kind != LabelKind::kIntent) {
            Fail(TreeErrorCode::kRootNotIntent, start,
                 "root must be an intent, got " + label->ToString());
          }
        }
        stack_.push_back({Node::NonTerminal(std::move(*label), {}), start});
      } else if (text_[pos_] == ']') {
        ++pos_;
        if (stack_.empty()) {
          Fail(TreeErrorCode::kUnbalancedBrackets, start, "unmatched ']'");
        }
        Open open = std::move(stack_.back());
        stack_.pop_back();
        if (open.node.children.empty()) {
          Fail(TreeErrorCode::kEmptyNonTerminal, open.offset,
               open.node.label.ToString() + " has no children");
        }
        Attach(std::move(open.node), open.offset, &root);
      } else {
        while (pos_ < text_.size() && !IsDelimiter(text_[pos_])) ++pos_;
        std::string word(text_.substr(start, pos_ - start));
        if (template_mode_) {
          Fail(TreeErrorCode::kIllegalTerminal, start,
               "token '" + word + "' in a template");
        }
        Attach(Node::Token(std::move(word)), start, &root);
      }
    }
    if (!stack_.empty()) {
      Fail(TreeErrorCode::kUnbalancedBrackets, text_.size(),
           "unclosed " + stack_.back().node.label.ToString());
    }
    if (!root) {
      Fail(TreeErrorCode::kUnbalancedBrackets, text_.size(),
           "no constituent found");
    }
    return std::move(*root);
  }

 private:
  struct Open {
    Node node;
    size_t offset;
  };

  void SkipSpace() {
    while (pos_ < text_.size() && IsSpace(text_[pos_])) ++pos_;
  }

  bool AtMask() const {
    if (text_.substr(pos_, kMaskText.size()) != kMaskText) return false;
    size_t end = pos_ + kMaskText.size();
    return end == text_.size() || IsDelimiter(text_[end]);
  }

  void Attach(Node node, size_t offset, std::optional<Node> *root) {
    if (stack_.empty()) {
      if (node.kind != NodeKind::kNonTerminal) {
        Fail(TreeErrorCode::kUnbalancedBrackets, offset,
             "terminal outside of any constituent");
      }
      *root = std::move(node);
      return;
    }
    Node &parent = stack_.back().node;
    if (!ChildAllowed(parent.label.kind, node)) {
      Fail(TreeErrorCode::kIllegalChildKind, offset,
           node.label.ToString() + " directly under " +
               parent.label.ToString());
    }
    if (node.kind == NodeKind::kMask && !parent.children.empty() &&
        parent.children.back().kind == NodeKind::kMask) {
      Fail(TreeErrorCode::kIllegalTerminal, offset, "adjacent [mask] nodes");
    }
    parent.children.push_back(std::move(node));
  }

  [[noreturn]] void Fail(TreeErrorCode code, size_t offset,
                         const std::string &what) const {
    throw TreeError(code, offset, what);
  }

  std::string_view text_;
  bool template_mode_;
  size_t pos_ = 0;
  std::vector<Open> stack_;
};

void ValidateNode(const Node &node, bool template_mode) {
  if (node.kind != NodeKind::kNonTerminal) return;
  if (node.children.empty()) {
    throw TreeError(TreeErrorCode::kEmptyNonTerminal, 0,
                    node.label.ToString() + " has no children");
  }
  if (!ValidName(node.label.name)) {
    throw TreeError(TreeErrorCode::kBadLabelSyntax, 0,
                    "bad label name '" + node.label.name + "'");
  }
  const Node *prev = nullptr;
  for (const Node &child : node.children) {
    if (!ChildAllowed(node.label.kind, child)) {
      throw TreeError(TreeErrorCode::kIllegalChildKind, 0,
                      child.label.ToString() + " directly under " +
                          node.label.ToString());
    }
    if (child.kind == NodeKind::kToken) {
      if (template_mode) {
        throw TreeError(TreeErrorCode::kIllegalTerminal, 0,
                        "token in a template");
      }
      if (child.text.empty()) {
        throw TreeError(TreeErrorCode::kIllegalTerminal, 0, "empty token");
      }
      for (char c : child.text) {
        if (IsDelimiter(c)) {
          throw TreeError(TreeErrorCode::kIllegalTerminal, 0,
                          "token '" + child.text + "' has a delimiter");
        }
      }
    }
    if (child.kind == NodeKind::kMask) {
      if (!template_mode) {
        throw TreeError(TreeErrorCode::kIllegalTerminal, 0,
                        "[mask] in an annotation");
      }
      if (prev != nullptr && prev->kind == NodeKind::kMask) {
        throw TreeError(TreeErrorCode::kIllegalTerminal, 0,
                        "adjacent [mask] nodes");
      }
    }
    ValidateNode(child, template_mode);
    prev = &child;
  }
}

void ValidateRoot(const Node &root, bool template_mode) {
  if (root.kind != NodeKind::kNonTerminal ||
      root.label.kind != LabelKind::kIntent) {
    throw TreeError(TreeErrorCode::kRootNotIntent, 0,
                    "root must be an intent");
  }
  ValidateNode(root, template_mode);
}

void SerializeNode(const Node &node, bool generator, std::string *out) {
  switch (node.kind) {
    case NodeKind::kToken:
      out->append(node.text);
      return;
    case NodeKind::kMask:
      out->append(kMaskText);
      return;
    case NodeKind::kNonTerminal:
      break;
  }
  const std::string label =
      generator ? Lower(node.label.ToString()) : node.label.ToString();
  out->push_back('[');
  out->append(label);
  for (const Node &child : node.children) {
    out->push_back(' ');
    SerializeNode(child, generator, out);
  }
  out->push_back(' ');
  if (generator) out->append(label);
  out->push_back(']');
}

void CollectTokens(const Node &node, Tokens *tokens) {
  if (node.kind == NodeKind::kToken) {
    tokens->push_back(node.text);
    return;
  }
  for (const Node &child : node.children) CollectTokens(child, tokens);
}

Node CollapseTerminals(const Node &node) {
  if (node.kind != NodeKind::kNonTerminal) return Node::Mask();
  std::vector<Node> children;
  for (const Node &child : node.children) {
    if (child.is_terminal()) {
      if (children.empty() || children.back().kind != NodeKind::kMask) {
        children.push_back(Node::Mask());
      }
    } else {
      children.push_back(CollapseTerminals(child));
    }
  }
  return Node::NonTerminal(node.label, std::move(children));
}

}  // namespace

std::string Label::ToString() const {
  return (kind == LabelKind::kIntent ? "IN:" : "SL:") + name;
}

std::optional<Label> Label::Parse(std::string_view text) {
  if (text.size() < 4 || text[2] != ':') return std::nullopt;
  std::string_view prefix = text.substr(0, 2);
  std::string_view name = text.substr(3);
  if (!ValidName(name)) return std::nullopt;
  if (prefix == "IN") return Label::Intent(std::string(name));
  if (prefix == "SL") return Label::Slot(std::string(name));
  return std::nullopt;
}

Node Node::Token(std::string text) {
  Node node;
  node.kind = NodeKind::kToken;
  node.text = std::move(text);
  return node;
}

Node Node::Mask() {
  Node node;
  node.kind = NodeKind::kMask;
  return node;
}

Node Node::NonTerminal(Label label, std::vector<Node> children) {
  Node node;
  node.kind = NodeKind::kNonTerminal;
  node.label = std::move(label);
  node.children = std::move(children);
  return node;
}

const char *TreeErrorCodeName(TreeErrorCode code) {
  switch (code) {
    case TreeErrorCode::kUnbalancedBrackets:
      return "UnbalancedBrackets";
    case TreeErrorCode::kEmptyNonTerminal:
      return "EmptyNonTerminal";
    case TreeErrorCode::kRootNotIntent:
      return "RootNotIntent";
    case TreeErrorCode::kIllegalChildKind:
      return "IllegalChildKind";
    case TreeErrorCode::kBadLabelSyntax:
      return "BadLabelSyntax";
    case TreeErrorCode::kIllegalTerminal:
      return "IllegalTerminal";
  }
  return "Unknown";
}

TreeError::TreeError(TreeErrorCode code, size_t offset,
                     const std::string &message)
    : std::runtime_error(std::string(TreeErrorCodeName(code)) + " at byte " +
                         std::to_string(offset) + ": " + message),
      code_(code),
      offset_(offset) {}

ParseTree ParseAnnotation(std::string_view text) {
  return ParseTree{LinearizedParser(text, false).Parse()};
}

Template ParseTemplate(std::string_view text) {
  return Template{LinearizedParser(text, true).Parse()};
}

void ValidateAnnotation(const ParseTree &tree) { ValidateRoot(tree.root, false); }

void ValidateTemplate(const Template &tmpl) { ValidateRoot(tmpl.root, true); }

std::string Serialize(const ParseTree &tree, TreeForm form) {
  if (form == TreeForm::kGeneratorSource) {
    return Serialize(ExtractTemplate(tree), form);
  }
  std::string out;
  SerializeNode(tree.root, form != TreeForm::kCanonical, &out);
  return out;
}

std::string Serialize(const Template &tmpl, TreeForm form) {
  std::string out;
  SerializeNode(tmpl.root, form != TreeForm::kCanonical, &out);
  return out;
}

Tokens UtteranceOf(const ParseTree &tree) {
  Tokens tokens;
  CollectTokens(tree.root, &tokens);
  return tokens;
}

Template ExtractTemplate(const ParseTree &tree) {
  return Template{CollapseTerminals(tree.root)};
}

std::string TemplateKey(const Template &tmpl) { return Serialize(tmpl); }

void CollectLabels(const Node &node, LabelSet *labels) {
  if (node.kind != NodeKind::kNonTerminal) return;
  labels->insert(node.label);
  for (const Node &child : node.children) CollectLabels(child, labels);
}

LabelSet LabelsOf(const ParseTree &tree) {
  LabelSet labels;
  CollectLabels(tree.root, &labels);
  return labels;
}

const char *RejectReasonName(RejectReason reason) {
  switch (reason) {
    case RejectReason::kNone:
      return "None";
    case RejectReason::kUnknownLabel:
      return "UnknownLabel";
    case RejectReason::kMismatchedClosing:
      return "MismatchedClosing";
    case RejectReason::kStructural:
      return "Structural";
  }
  return "Unknown";
}

std::optional<RejectReason> RejectReasonFromName(std::string_view name) {
  for (RejectReason r :
       {RejectReason::kNone, RejectReason::kUnknownLabel,
        RejectReason::kMismatchedClosing, RejectReason::kStructural}) {
    if (name == RejectReasonName(r)) return r;
  }
  return std::nullopt;
}

GeneratorParse FromGeneratorOutput(std::string_view text,
                                   const LabelSet &known_labels) {
  GeneratorParse result;
  auto reject = [&result](RejectReason reason, std::string detail) {
    result.reason = reason;
    result.detail = std::move(detail);
    return result;
  };

  // Rewrites the generator form into canonical text word by word, checking
  // labels and closers on the way.
  std::vector<Label> open;
  std::string canonical;
  for (const std::string &word : SplitWhitespace(text)) {
    if (!canonical.empty()) canonical.push_back(' ');
    if (word.size() > 1 && word.front() == '[' && word != kMaskText) {
      std::optional<Label> label = Label::Parse(Upper(word.substr(1)));
      if (!label) {
        return reject(RejectReason::kStructural, "bad opener '" + word + "'");
      }
      if (!known_labels.contains(*label)) {
        return reject(RejectReason::kUnknownLabel, label->ToString());
      }
      canonical += "[" + label->ToString();
      open.push_back(std::move(*label));
    } else if (word.back() == ']' && word != kMaskText) {
      if (open.empty()) {
        return reject(RejectReason::kStructural, "unmatched '" + word + "'");
      }
      if (word.size() > 1) {
        std::optional<Label> label =
            Label::Parse(Upper(word.substr(0, word.size() - 1)));
        if (!label) {
          return reject(RejectReason::kStructural,
                        "bad closer '" + word + "'");
        }
        if (*label != open.back()) {
          return reject(RejectReason::kMismatchedClosing,
                        label->ToString() + " closes " +
                            open.back().ToString());
        }
      }
      open.pop_back();
      canonical += "]";
    } else {
      canonical += word;
    }
  }
  try {
    ParseTree tree = ParseAnnotation(canonical);
    result.tree = std::move(tree);
  } catch (const TreeError &e) {
    return reject(RejectReason::kStructural, e.what());
  }
  return result;
}

Tokens SplitWhitespace(std::string_view text) {
  Tokens out;
  size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && IsSpace(text[pos])) ++pos;
    size_t start = pos;
    while (pos < text.size() && !IsSpace(text[pos])) ++pos;
    if (pos > start) out.emplace_back(text.substr(start, pos - start));
  }
  return out;
}

std::string JoinTokens(const Tokens &tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace topaug
