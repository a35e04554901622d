// Copyright 2026 The compsyn Authors.
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

#include "compsyn/ptb.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "compsyn/errors.h"

namespace compsyn::ptb {

namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  SyntaxTree ParseDocument() {
    SkipSpace();
    if (pos_ >= text_.size()) throw ParseError("empty input", pos_);
    if (text_[pos_] != '(') throw ParseError("expected '('", pos_);
    SyntaxTree tree = ParseNode(/*depth=*/0);
    SkipSpace();
    if (pos_ < text_.size()) {
      if (text_[pos_] == ')') throw ParseError("unbalanced parentheses: extra ')'", pos_);
      throw ParseError("trailing garbage after tree", pos_);
    }
    return tree;
  }

 private:
  SyntaxTree ParseNode(int depth) {
    const size_t open = pos_;
    ++pos_;  // '('
    SkipSpace();
    std::string label;
    if (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')') {
      label = ReadAtom();
    }
    std::vector<SyntaxTree> children;
    while (true) {
      SkipSpace();
      if (pos_ >= text_.size()) {
        throw ParseError("unbalanced parentheses: '(' never closed", open);
      }
      const char c = text_[pos_];
      if (c == ')') {
        ++pos_;
        break;
      }
      if (c == '(') {
        children.push_back(ParseNode(depth + 1));
        continue;
      }
      const size_t at = pos_;
      if (!children.empty()) {
        throw ParseError("a part-of-speech node must hold exactly one token", at);
      }
      children.push_back(SyntaxTree::Leaf(ReadAtom()));
      SkipSpace();
      if (pos_ < text_.size() && text_[pos_] != ')') {
        throw ParseError("a part-of-speech node must hold exactly one token", pos_);
      }
    }
    if (children.empty()) throw ParseError("empty node", open);
    if (label.empty() && (depth > 0 || children.front().is_leaf())) {
      throw ParseError("node without a label", open);
    }
    return SyntaxTree::Node(std::move(label), std::move(children));
  }

  std::string ReadAtom() {
    const size_t start = pos_;
    while (pos_ < text_.size() && !IsSpace(text_[pos_]) && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void SkipSpace() {
    while (pos_ < text_.size() && IsSpace(text_[pos_])) ++pos_;
  }

  std::string_view text_;
  size_t pos_ = 0;
};

std::string StripFunctionTags(const std::string& label) {
  if (label.empty() || label.front() == '-') return label;
  const size_t cut = label.find_first_of("-=");
  return cut == std::string::npos ? label : label.substr(0, cut);
}

// Returns false when the whole subtree vanished.
bool Normalize(SyntaxTree& node, const ParseOptions& options) {
  if (node.is_leaf()) return true;
  if (options.drop_empty_elements && node.label == "-NONE-") return false;
  if (options.strip_function_tags) node.label = StripFunctionTags(node.label);
  std::vector<SyntaxTree> kept;
  for (SyntaxTree& child : node.children) {
    if (Normalize(child, options)) kept.push_back(std::move(child));
  }
  node.children = std::move(kept);
  return !node.children.empty();
}

void Serialize(const SyntaxTree& node, std::string& out) {
  if (node.is_leaf()) {
    out += *node.token;
    return;
  }
  out += '(';
  out += node.label;
  for (const SyntaxTree& child : node.children) {
    out += ' ';
    Serialize(child, out);
  }
  out += ')';
}

void CollectLeaves(const SyntaxTree& node, std::vector<std::string>& out) {
  if (node.is_leaf()) {
    out.push_back(*node.token);
    return;
  }
  for (const SyntaxTree& child : node.children) CollectLeaves(child, out);
}

void CollectProductions(const SyntaxTree& node, std::vector<ProductionRule>& out) {
  if (node.is_leaf()) return;
  out.push_back(rule_of(node));
  for (const SyntaxTree& child : node.children) CollectProductions(child, out);
}

int EdgeHeight(const SyntaxTree& node) {
  if (node.is_leaf()) return 0;
  int best = 0;
  for (const SyntaxTree& child : node.children) best = std::max(best, EdgeHeight(child));
  return best + 1;
}

}  // namespace

SyntaxTree SyntaxTree::Leaf(std::string token) {
  SyntaxTree t;
  t.token = std::move(token);
  return t;
}

SyntaxTree SyntaxTree::Node(std::string label, std::vector<SyntaxTree> children) {
  SyntaxTree t;
  t.label = std::move(label);
  t.children = std::move(children);
  return t;
}

std::string ProductionRule::ToString() const {
  std::string out = lhs + " ->";
  for (const std::string& s : rhs) out += " " + s;
  return out;
}

ProductionRule ProductionRule::FromString(std::string_view text) {
  const size_t arrow = text.find("->");
  if (arrow == std::string_view::npos) {
    throw DataError("production rule '" + std::string(text) + "' has no '->'");
  }
  ProductionRule rule;
  std::istringstream lhs{std::string(text.substr(0, arrow))};
  lhs >> rule.lhs;
  std::istringstream rhs{std::string(text.substr(arrow + 2))};
  for (std::string sym; rhs >> sym;) rule.rhs.push_back(sym);
  if (rule.lhs.empty() || rule.rhs.empty()) {
    throw DataError("production rule '" + std::string(text) + "' is incomplete");
  }
  return rule;
}

SyntaxTree parse_tree(std::string_view text, const ParseOptions& options) {
  SyntaxTree tree = Parser(text).ParseDocument();
  while (tree.label.empty() && tree.children.size() == 1 && !tree.children[0].is_leaf()) {
    SyntaxTree inner = std::move(tree.children[0]);
    tree = std::move(inner);
  }
  if (tree.label.empty()) throw ParseError("unlabeled root with several children", 0);
  if (!Normalize(tree, options)) throw ParseError("tree is empty after removing empty elements", 0);
  return tree;
}

std::vector<SyntaxTree> read_trees(std::istream& in, const ParseOptions& options) {
  std::vector<SyntaxTree> trees;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      trees.push_back(parse_tree(line, options));
    } catch (const ParseError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return trees;
}

std::vector<SyntaxTree> read_tree_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open tree file " + path);
  return read_trees(in, options);
}

std::string serialize(const SyntaxTree& tree) {
  std::string out;
  Serialize(tree, out);
  return out;
}

std::vector<std::string> leaves(const SyntaxTree& tree) {
  std::vector<std::string> out;
  CollectLeaves(tree, out);
  return out;
}

ProductionRule rule_of(const SyntaxTree& node) {
  if (node.is_leaf()) throw DataError("token leaf '" + *node.token + "' has no production");
  ProductionRule rule;
  rule.lhs = node.label;
  for (const SyntaxTree& child : node.children) {
    rule.rhs.push_back(child.is_leaf() ? std::string(kTokenSymbol) : child.label);
  }
  return rule;
}

std::vector<ProductionRule> productions(const SyntaxTree& tree) {
  std::vector<ProductionRule> out;
  CollectProductions(tree, out);
  return out;
}

std::map<ProductionRule, size_t> count_productions(const SyntaxTree& tree) {
  std::map<ProductionRule, size_t> counts;
  for (ProductionRule& rule : productions(tree)) ++counts[std::move(rule)];
  return counts;
}

HeightMode ParseHeightMode(std::string_view name) {
  if (name == "edges-with-pos") return HeightMode::kEdgesWithPos;
  if (name == "edges-without-pos") return HeightMode::kEdgesWithoutPos;
  throw ConfigError("unknown height mode '" + std::string(name) +
                    "' (expected edges-with-pos or edges-without-pos)");
}

int height(const SyntaxTree& tree, HeightMode mode) {
  const int edges = EdgeHeight(tree);
  return mode == HeightMode::kEdgesWithPos ? edges : std::max(0, edges - 1);
}

FilterResult filter_corpus(const std::vector<SyntaxTree>& trees,
                           const std::set<int>& heights, size_t max_rules,
                           HeightMode mode) {
  FilterResult result;
  std::vector<size_t> candidates;
  std::map<ProductionRule, size_t> frequency;
  for (size_t i = 0; i < trees.size(); ++i) {
    if (!heights.contains(height(trees[i], mode))) continue;
    candidates.push_back(i);
    for (ProductionRule& rule : productions(trees[i])) ++frequency[std::move(rule)];
  }
  result.height_filtered = candidates.size();

  std::vector<std::pair<std::string, const ProductionRule*>> ranked;
  for (const auto& [rule, count] : frequency) ranked.emplace_back(rule.ToString(), &rule);
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    const size_t ca = frequency.at(*a.second), cb = frequency.at(*b.second);
    return ca != cb ? ca > cb : a.first < b.first;
  });
  std::set<ProductionRule> allowed;
  for (size_t i = 0; i < ranked.size() && i < max_rules; ++i) allowed.insert(*ranked[i].second);

  std::map<ProductionRule, size_t> present;
  for (size_t i : candidates) {
    const std::vector<ProductionRule> rules = productions(trees[i]);
    const bool covered = std::all_of(rules.begin(), rules.end(),
                                     [&](const ProductionRule& r) { return allowed.contains(r); });
    if (!covered) continue;
    result.kept.push_back(i);
    for (const ProductionRule& r : rules) ++present[r];
  }
  for (const auto& [rule, count] : present) result.vocabulary.push_back({rule, count});
  return result;
}

}  // namespace compsyn::ptb
