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

#ifndef AUGFORGE_ALP_GRAMMAR_H_
#define AUGFORGE_ALP_GRAMMAR_H_

#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "augforge/common.h"

namespace augforge::alp {

// Raw n-ary constituency tree as read from a bracketed treebank. A node with
// a word and no children is a preterminal.
struct BracketTree {
  std::string label;
  std::string word;
  std::vector<BracketTree> children;

  bool is_preterminal() const { return children.empty(); }
  std::vector<std::string> yield() const;
  std::string to_string() const;
  bool operator==(const BracketTree&) const = default;
};

// Parses one Penn-style tree, e.g. `(S (NP (DT the) (NNS carts)) (VP (V
// repel)))`. An unlabeled outer wrapper `( (S ...) )` is accepted.
BracketTree parse_bracketed(const std::string& text);

// One tree per non-empty line; '#' starts a comment line. Errors name the
// offending tree index (0-based).
std::vector<BracketTree> read_treebank(const std::string& content);

// Symbol naming used by the CNF transform:
//   "A+B"       unary chain A -> B collapsed into one symbol;
//   "@A[B C]"   intermediate symbol from right-factoring A's remaining children.
bool is_intermediate(const std::string& symbol);
// First element of a collapsed chain ("S+VP" -> "S").
std::string top_label(const std::string& symbol);
// Last element of a collapsed chain ("NP+NNS" -> "NNS").
std::string bottom_label(const std::string& symbol);

// Binarizes (right-factored, no markovization) and collapses unary chains so
// that every production is A -> B C or A -> word.
BracketTree to_cnf(const BracketTree& tree);

struct Rule {
  std::string lhs;
  std::vector<std::string> rhs;  // two symbols, or one word when lexical
  double prob = 0.0;
  bool lexical = false;
};

// PCFG in Chomsky normal form. The rule index is the tie-break order for
// parsing.
class Grammar {
 public:
  Grammar() = default;
  Grammar(std::string start, std::vector<Rule> rules);

  const std::string& start() const { return start_; }
  const std::vector<Rule>& rules() const { return rules_; }
  // Maximum-likelihood estimates over the untransformed productions, kept for
  // inspection; parsing uses rules().
  const std::vector<Rule>& source_rules() const { return source_rules_; }
  void set_source_rules(std::vector<Rule> rules) {
    source_rules_ = std::move(rules);
  }

  size_t symbol_count() const { return symbols_.size(); }
  int symbol_id(const std::string& s) const;  // -1 if unknown
  const std::string& symbol(int id) const { return symbols_[id]; }
  bool is_start_symbol(int id) const { return start_ok_[id]; }
  bool has_terminal(const std::string& word) const {
    return lexical_.count(word) > 0;
  }
  // Lexical rule indices for a word.
  const std::vector<int>& lexical_rules(const std::string& word) const;

  struct BinaryRule {
    int rule;
    int lhs;
    int left;
    int right;
  };
  const std::vector<BinaryRule>& binary_rules() const { return binary_; }
  int lhs_id(int rule) const { return rule_lhs_[rule]; }

  // Probability of a source production lhs -> rhs (0 when absent).
  double source_probability(const std::string& lhs,
                            const std::vector<std::string>& rhs) const;

 private:
  std::string start_;
  std::vector<Rule> rules_;
  std::vector<Rule> source_rules_;
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> symbol_ids_;
  std::vector<char> start_ok_;
  std::vector<int> rule_lhs_;
  std::vector<BinaryRule> binary_;
  std::unordered_map<std::string, std::vector<int>> lexical_;
};

// Checks CNF shape and that each left-hand side's probabilities sum to 1
// within `tolerance`. Throws Error naming the first violation.
void validate_grammar(const Grammar& grammar, double tolerance = 1e-9);

// Maximum-likelihood PCFG from a treebank: P(A -> rhs) = count / count(A),
// estimated on the CNF-transformed trees. The start symbol is the root label
// shared by the treebank (most frequent when mixed).
Grammar induce_pcfg(const std::vector<BracketTree>& treebank);

}  // namespace augforge::alp

#endif  // AUGFORGE_ALP_GRAMMAR_H_
