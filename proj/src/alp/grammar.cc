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

#include "augforge/alp/grammar.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <tuple>

namespace augforge::alp {
namespace {

class BracketReader {
 public:
  explicit BracketReader(const std::string& text) : s_(text) {}

  BracketTree read_root() {
    skip_ws();
    BracketTree t = read_node();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters after tree");
    // Penn wrapper: ( (S ...) )
    if (t.label.empty()) {
      if (t.children.size() != 1) fail("unlabeled root with several children");
      BracketTree inner = std::move(t.children.front());
      t = std::move(inner);
    }
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error("malformed bracketing at offset " + std::to_string(pos_) +
                ": " + why);
  }

  void skip_ws() {
    while (pos_ < s_.size() &&
           std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
  }

  std::string read_atom() {
    const size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != '(' && s_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
    return s_.substr(start, pos_ - start);
  }

  BracketTree read_node() {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != '(') fail("expected '('");
    ++pos_;
    skip_ws();
    BracketTree node;
    if (pos_ < s_.size() && s_[pos_] != '(') node.label = read_atom();
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (s_[pos_] != '(') {
      // Preterminal: (TAG word)
      if (s_[pos_] == ')') fail("empty constituent");
      node.word = read_atom();
      if (node.label.empty()) fail("preterminal without a tag");
      skip_ws();
    } else {
      while (pos_ < s_.size() && s_[pos_] == '(') {
        node.children.push_back(read_node());
        skip_ws();
      }
    }
    if (pos_ >= s_.size() || s_[pos_] != ')') fail("expected ')'");
    ++pos_;
    return node;
  }

  const std::string& s_;
  size_t pos_ = 0;
};

void collect_yield(const BracketTree& t, std::vector<std::string>& out) {
  if (t.is_preterminal()) {
    out.push_back(t.word);
    return;
  }
  for (const auto& c : t.children) collect_yield(c, out);
}

void write_tree(const BracketTree& t, std::string& out) {
  out += "(" + t.label;
  if (t.is_preterminal()) {
    out += " " + t.word;
  } else {
    for (const auto& c : t.children) {
      out += " ";
      write_tree(c, out);
    }
  }
  out += ")";
}

std::string intermediate_name(const std::string& parent,
                              const std::vector<BracketTree>& rest) {
  std::string name = "@" + parent + "[";
  for (size_t i = 0; i < rest.size(); ++i) {
    if (i) name += " ";
    name += rest[i].label;
  }
  return name + "]";
}

struct Production {
  std::string lhs;
  std::vector<std::string> rhs;
  bool lexical;
  bool operator<(const Production& o) const {
    return std::tie(lhs, rhs, lexical) < std::tie(o.lhs, o.rhs, o.lexical);
  }
};

void count_productions(const BracketTree& t,
                       std::map<Production, size_t>& counts) {
  if (t.is_preterminal()) {
    ++counts[{t.label, {t.word}, true}];
    return;
  }
  Production p{t.label, {}, false};
  for (const auto& c : t.children) p.rhs.push_back(c.label);
  ++counts[p];
  for (const auto& c : t.children) count_productions(c, counts);
}

std::vector<Rule> mle(const std::map<Production, size_t>& counts) {
  std::map<std::string, size_t> lhs_total;
  for (const auto& [p, n] : counts) lhs_total[p.lhs] += n;
  std::vector<Rule> rules;
  for (const auto& [p, n] : counts) {
    rules.push_back({p.lhs, p.rhs,
                     static_cast<double>(n) /
                         static_cast<double>(lhs_total[p.lhs]),
                     p.lexical});
  }
  return rules;
}

}  // namespace

std::vector<std::string> BracketTree::yield() const {
  std::vector<std::string> out;
  collect_yield(*this, out);
  return out;
}

std::string BracketTree::to_string() const {
  std::string out;
  write_tree(*this, out);
  return out;
}

BracketTree parse_bracketed(const std::string& text) {
  return BracketReader(text).read_root();
}

std::vector<BracketTree> read_treebank(const std::string& content) {
  std::vector<BracketTree> out;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    try {
      out.push_back(parse_bracketed(t));
    } catch (const Error& e) {
      throw Error("treebank tree " + std::to_string(out.size()) + ": " +
                  e.what());
    }
  }
  return out;
}

bool is_intermediate(const std::string& symbol) {
  return !symbol.empty() && symbol[0] == '@';
}

std::string top_label(const std::string& symbol) {
  if (is_intermediate(symbol)) return symbol;
  return symbol.substr(0, symbol.find('+'));
}

std::string bottom_label(const std::string& symbol) {
  if (is_intermediate(symbol)) return symbol;
  const size_t p = symbol.rfind('+');
  return p == std::string::npos ? symbol : symbol.substr(p + 1);
}

BracketTree to_cnf(const BracketTree& tree) {
  if (tree.is_preterminal()) return tree;
  if (tree.children.size() == 1) {
    BracketTree child = to_cnf(tree.children.front());
    child.label = tree.label + "+" + child.label;
    return child;
  }
  std::vector<BracketTree> kids;
  for (const auto& c : tree.children) kids.push_back(to_cnf(c));
  // Right-factor: A -> k0 @A[k1..kn], @A[k1..kn] -> k1 @A[k2..kn], ...
  BracketTree tail = std::move(kids.back());
  for (size_t i = kids.size() - 1; i-- > 1;) {
    std::vector<BracketTree> rest(kids.begin() + i, kids.end());
    BracketTree inter;
    inter.label = intermediate_name(tree.label, rest);
    inter.children.push_back(std::move(kids[i]));
    inter.children.push_back(std::move(tail));
    tail = std::move(inter);
  }
  BracketTree out;
  out.label = tree.label;
  out.children.push_back(std::move(kids.front()));
  out.children.push_back(std::move(tail));
  return out;
}

Grammar::Grammar(std::string start, std::vector<Rule> rules)
    : start_(std::move(start)), rules_(std::move(rules)) {
  auto intern = [&](const std::string& s) {
    auto [it, inserted] =
        symbol_ids_.emplace(s, static_cast<int>(symbols_.size()));
    if (inserted) symbols_.push_back(s);
    return it->second;
  };
  for (size_t r = 0; r < rules_.size(); ++r) {
    const Rule& rule = rules_[r];
    const int lhs = intern(rule.lhs);
    rule_lhs_.push_back(lhs);
    if (rule.lexical) {
      if (rule.rhs.size() != 1) throw Error("lexical rule needs one word");
      lexical_[rule.rhs[0]].push_back(static_cast<int>(r));
    } else {
      if (rule.rhs.size() != 2) {
        throw Error("rule " + rule.lhs + " is not in Chomsky normal form");
      }
      binary_.push_back({static_cast<int>(r), lhs, intern(rule.rhs[0]),
                         intern(rule.rhs[1])});
    }
  }
  start_ok_.assign(symbols_.size(), 0);
  for (size_t i = 0; i < symbols_.size(); ++i) {
    const std::string& s = symbols_[i];
    start_ok_[i] = s == start_ || s.rfind(start_ + "+", 0) == 0;
  }
}

int Grammar::symbol_id(const std::string& s) const {
  auto it = symbol_ids_.find(s);
  return it == symbol_ids_.end() ? -1 : it->second;
}

const std::vector<int>& Grammar::lexical_rules(const std::string& word) const {
  static const std::vector<int> kNone;
  auto it = lexical_.find(word);
  return it == lexical_.end() ? kNone : it->second;
}

double Grammar::source_probability(const std::string& lhs,
                                   const std::vector<std::string>& rhs) const {
  for (const auto& r : source_rules_) {
    if (r.lhs == lhs && r.rhs == rhs) return r.prob;
  }
  return 0.0;
}

void validate_grammar(const Grammar& g, double tolerance) {
  std::map<std::string, double> sums;
  for (const auto& r : g.rules()) {
    if (!(r.prob > 0.0 && r.prob <= 1.0)) {
      throw Error("rule " + r.lhs + " has probability outside (0, 1]");
    }
    if (r.lexical ? r.rhs.size() != 1 : r.rhs.size() != 2) {
      throw Error("rule " + r.lhs + " is not in Chomsky normal form");
    }
    sums[r.lhs] += r.prob;
  }
  for (const auto& [lhs, s] : sums) {
    if (std::abs(s - 1.0) > tolerance) {
      throw Error("rules for " + lhs + " sum to " + std::to_string(s));
    }
  }
}

Grammar induce_pcfg(const std::vector<BracketTree>& treebank) {
  if (treebank.empty()) throw Error("induce_pcfg: empty treebank");
  std::map<Production, size_t> source_counts;
  std::map<Production, size_t> cnf_counts;
  std::map<std::string, size_t> roots;
  for (size_t i = 0; i < treebank.size(); ++i) {
    const BracketTree& t = treebank[i];
    if (t.label.empty()) {
      throw Error("induce_pcfg: tree " + std::to_string(i) + " has no label");
    }
    if (t.is_preterminal()) {
      throw Error("induce_pcfg: tree " + std::to_string(i) +
                  " is a bare preterminal");
    }
    count_productions(t, source_counts);
    count_productions(to_cnf(t), cnf_counts);
    ++roots[t.label];
  }
  std::string start = roots.begin()->first;
  for (const auto& [label, n] : roots) {
    if (n > roots[start]) start = label;
  }
  Grammar g(start, mle(cnf_counts));
  g.set_source_rules(mle(source_counts));
  return g;
}

}  // namespace augforge::alp
