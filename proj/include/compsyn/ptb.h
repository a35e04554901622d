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

#ifndef COMPSYN_PTB_H_
#define COMPSYN_PTB_H_

#include <compare>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace compsyn::ptb {

// Constituency tree node. A token leaf has `token` set, an empty label and
// no children; every other node has a label and at least one child.
struct SyntaxTree {
  std::string label;
  std::vector<SyntaxTree> children;
  std::optional<std::string> token;

  bool is_leaf() const { return token.has_value(); }
  // A node whose single child is a token leaf (a part-of-speech node).
  bool is_preterminal() const {
    return children.size() == 1 && children.front().is_leaf();
  }

  static SyntaxTree Leaf(std::string token);
  static SyntaxTree Node(std::string label, std::vector<SyntaxTree> children);

  friend bool operator==(const SyntaxTree&, const SyntaxTree&) = default;
};

// Right-hand-side symbol used for lexical expansions POS -> token.
inline constexpr std::string_view kTokenSymbol = "<TOKEN>";

struct ProductionRule {
  std::string lhs;
  std::vector<std::string> rhs;

  size_t arity() const { return rhs.size(); }
  bool is_lexical() const { return rhs.size() == 1 && rhs.front() == kTokenSymbol; }
  // "S -> NP VP"
  std::string ToString() const;
  static ProductionRule FromString(std::string_view text);

  friend auto operator<=>(const ProductionRule&, const ProductionRule&) = default;
};

struct ParseOptions {
  // NP-SBJ-1 -> NP, NP=2 -> NP. Labels that start with '-' (-LRB-) are kept.
  bool strip_function_tags = true;
  // Drop -NONE- empty-element subtrees and any constituent left childless.
  bool drop_empty_elements = true;
};

// Parses one bracketed tree. A PTB-style unlabeled wrapper "( (S ...) )" is
// unwrapped. Throws ParseError with a byte offset.
SyntaxTree parse_tree(std::string_view text, const ParseOptions& options = {});

// One tree per non-blank line.
std::vector<SyntaxTree> read_trees(std::istream& in, const ParseOptions& options = {});
std::vector<SyntaxTree> read_tree_file(const std::string& path,
                                       const ParseOptions& options = {});

// Canonical single-space serialization.
std::string serialize(const SyntaxTree& tree);

// Left-to-right token sequence.
std::vector<std::string> leaves(const SyntaxTree& tree);

// The production expanded at an internal node.
ProductionRule rule_of(const SyntaxTree& node);

// One rule per internal node, pre-order.
std::vector<ProductionRule> productions(const SyntaxTree& tree);
std::map<ProductionRule, size_t> count_productions(const SyntaxTree& tree);

enum class HeightMode {
  kEdgesWithPos,     // "(NN dog)" has height 1
  kEdgesWithoutPos,  // "(NN dog)" has height 0
};

HeightMode ParseHeightMode(std::string_view name);
int height(const SyntaxTree& tree, HeightMode mode = HeightMode::kEdgesWithPos);

struct RuleCount {
  ProductionRule rule;
  size_t count = 0;
};

struct FilterResult {
  std::vector<size_t> kept;       // indices into the input corpus, ascending
  std::vector<RuleCount> vocabulary;  // rules present in kept trees, sorted by rule
  size_t height_filtered = 0;     // trees that passed the height filter
};

// Keeps trees whose height is in `heights` and whose every production is
// among the `max_rules` most frequent productions of the height-filtered
// subset (frequency counted with multiplicity; ties broken by the rule's
// string form).
FilterResult filter_corpus(const std::vector<SyntaxTree>& trees,
                           const std::set<int>& heights, size_t max_rules,
                           HeightMode mode = HeightMode::kEdgesWithPos);

}  // namespace compsyn::ptb

#endif  // COMPSYN_PTB_H_
