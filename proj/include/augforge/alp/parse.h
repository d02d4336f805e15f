// Copyright 2026 The AugForge Authors
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

#ifndef AUGFORGE_ALP_PARSE_H_
#define AUGFORGE_ALP_PARSE_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "augforge/alp/grammar.h"

namespace augforge::alp {

// Node of a CNF parse tree. Lexical nodes carry a word and no children;
// every other node has exactly two children.
struct ParseNode {
  std::string label;
  int rule = -1;
  double rule_prob = 1.0;
  // Product of the probabilities of every rule in this subtree.
  double inside = 1.0;
  std::string word;
  std::vector<ParseNode> children;
  size_t begin = 0;
  size_t end = 0;
  std::string head_word;
  std::string head_pos;

  bool is_lexical() const { return children.empty(); }
  bool operator==(const ParseNode&) const = default;
};

struct ParseTree {
  ParseNode root;

  std::vector<std::string> yield() const;
  // Preterminal tag of each token (bottom of the lexical node's chain).
  std::vector<std::string> tags() const;
  double probability() const { return root.inside; }
  size_t leaf_count() const { return yield().size(); }
  // Bracketed form; with `debinarize`, intermediate symbols are flattened and
  // collapsed unary chains expanded.
  std::string to_string(bool debinarize = false) const;
  // Recomputes spans and inside probabilities from stored rule probabilities.
  void refresh();
  bool operator==(const ParseTree&) const = default;
};

// Viterbi CKY. Returns the maximum-probability tree rooted in the start
// symbol, or nothing when a token is unknown or no parse exists. Equal scores
// keep the lower-indexed rule, then the leftmost split.
std::optional<ParseTree> cky_parse(const std::vector<std::string>& tokens,
                                   const Grammar& grammar);

// How a nonterminal picks its head child.
struct HeadRule {
  bool from_right = false;
  // Child labels tried in priority order; each is scanned in the rule's
  // direction. When none matches, the first child in that direction wins.
  std::vector<std::string> priority;
};

class HeadRules {
 public:
  HeadRules() = default;
  explicit HeadRules(std::map<std::string, HeadRule> table)
      : table_(std::move(table)) {}

  // Table for the bundled cart-item grammar: verbal heads for S/VP, nominal
  // heads (rightmost) for NP, prepositions for PP, and so on.
  static HeadRules defaults();

  const HeadRule* find(const std::string& label) const;

 private:
  std::map<std::string, HeadRule> table_;
};

// Percolates lexical heads bottom-up. Labels without a rule fall back to the
// leftmost child; each such label is reported once in the returned warnings.
std::vector<std::string> assign_heads(ParseTree& tree, const HeadRules& rules);

}  // namespace augforge::alp

#endif  // AUGFORGE_ALP_PARSE_H_
