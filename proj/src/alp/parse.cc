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

#include "augforge/alp/parse.h"

#include <set>

namespace augforge::alp {
namespace {

void collect_leaves(const ParseNode& n, std::vector<std::string>& words,
                    std::vector<std::string>& tags) {
  if (n.is_lexical()) {
    words.push_back(n.word);
    tags.push_back(bottom_label(n.label));
    return;
  }
  for (const auto& c : n.children) collect_leaves(c, words, tags);
}

void write_node(const ParseNode& n, bool debinarize, std::string& out) {
  if (!debinarize) {
    out += "(" + n.label;
    if (n.is_lexical()) {
      out += " " + n.word;
    } else {
      for (const auto& c : n.children) {
        out += " ";
        write_node(c, debinarize, out);
      }
    }
    out += ")";
    return;
  }
  if (is_intermediate(n.label)) {
    for (size_t i = 0; i < n.children.size(); ++i) {
      if (i) out += " ";
      write_node(n.children[i], debinarize, out);
    }
    return;
  }
  size_t depth = 0;
  size_t start = 0;
  while (true) {
    const size_t plus = n.label.find('+', start);
    if (depth) out += " ";
    out += "(" + n.label.substr(start, plus - start);
    ++depth;
    if (plus == std::string::npos) break;
    start = plus + 1;
  }
  if (n.is_lexical()) {
    out += " " + n.word;
  } else {
    for (const auto& c : n.children) {
      out += " ";
      write_node(c, debinarize, out);
    }
  }
  out += std::string(depth, ')');
}

void refresh_node(ParseNode& n, size_t& pos) {
  n.begin = pos;
  if (n.is_lexical()) {
    ++pos;
    n.inside = n.rule_prob;
  } else {
    n.inside = n.rule_prob;
    for (auto& c : n.children) {
      refresh_node(c, pos);
      n.inside *= c.inside;
    }
  }
  n.end = pos;
}

struct Chart {
  size_t n;
  size_t symbols;
  std::vector<double> best;
  std::vector<int> rule;
  std::vector<int> split;

  Chart(size_t n_tokens, size_t n_symbols)
      : n(n_tokens),
        symbols(n_symbols),
        best((n + 1) * (n + 1) * symbols, 0.0),
        rule(best.size(), -1),
        split(best.size(), -1) {}

  size_t at(size_t i, size_t j, int a) const {
    return (i * (n + 1) + j) * symbols + static_cast<size_t>(a);
  }
};

ParseNode build(const Chart& chart, const Grammar& g,
                const std::vector<std::string>& tokens, size_t i, size_t j,
                int symbol) {
  const size_t cell = chart.at(i, j, symbol);
  const int r = chart.rule[cell];
  const Rule& rule = g.rules()[r];
  ParseNode node;
  node.label = g.symbol(symbol);
  node.rule = r;
  node.rule_prob = rule.prob;
  node.inside = chart.best[cell];
  node.begin = i;
  node.end = j;
  if (rule.lexical) {
    node.word = tokens[i];
    return node;
  }
  const auto k = static_cast<size_t>(chart.split[cell]);
  node.children.push_back(
      build(chart, g, tokens, i, k, g.symbol_id(rule.rhs[0])));
  node.children.push_back(
      build(chart, g, tokens, k, j, g.symbol_id(rule.rhs[1])));
  return node;
}

std::string rule_label(const std::string& label) {
  if (is_intermediate(label)) {
    return label.substr(1, label.find('[') - 1);
  }
  return bottom_label(label);
}

void effective_children(ParseNode& n, std::vector<ParseNode*>& out) {
  for (auto& c : n.children) {
    if (is_intermediate(c.label)) {
      effective_children(c, out);
    } else {
      out.push_back(&c);
    }
  }
}

void heads_node(ParseNode& n, const HeadRules& rules,
                std::set<std::string>& missing) {
  if (n.is_lexical()) {
    n.head_word = n.word;
    n.head_pos = bottom_label(n.label);
    return;
  }
  for (auto& c : n.children) heads_node(c, rules, missing);
  std::vector<ParseNode*> kids;
  if (is_intermediate(n.label)) {
    for (auto& c : n.children) kids.push_back(&c);
  } else {
    effective_children(n, kids);
  }
  const std::string label = rule_label(n.label);
  const HeadRule* rule = rules.find(label);
  const ParseNode* head = kids.front();
  if (!rule) {
    missing.insert(label);
  } else {
    const size_t m = kids.size();
    auto nth = [&](size_t k) { return kids[rule->from_right ? m - 1 - k : k]; };
    head = nth(0);
    bool found = false;
    for (const auto& want : rule->priority) {
      for (size_t k = 0; k < m && !found; ++k) {
        if (top_label(nth(k)->label) == want) {
          head = nth(k);
          found = true;
        }
      }
      if (found) break;
    }
  }
  n.head_word = head->head_word;
  n.head_pos = head->head_pos;
}

}  // namespace

std::vector<std::string> ParseTree::yield() const {
  std::vector<std::string> words;
  std::vector<std::string> tags;
  collect_leaves(root, words, tags);
  return words;
}

std::vector<std::string> ParseTree::tags() const {
  std::vector<std::string> words;
  std::vector<std::string> tags;
  collect_leaves(root, words, tags);
  return tags;
}

std::string ParseTree::to_string(bool debinarize) const {
  std::string out;
  write_node(root, debinarize, out);
  return out;
}

void ParseTree::refresh() {
  size_t pos = 0;
  refresh_node(root, pos);
}

std::optional<ParseTree> cky_parse(const std::vector<std::string>& tokens,
                                   const Grammar& g) {
  const size_t n = tokens.size();
  if (n == 0) return std::nullopt;
  for (const auto& t : tokens) {
    if (!g.has_terminal(t)) return std::nullopt;
  }
  Chart chart(n, g.symbol_count());
  for (size_t i = 0; i < n; ++i) {
    for (int r : g.lexical_rules(tokens[i])) {
      const size_t cell = chart.at(i, i + 1, g.lhs_id(r));
      const double p = g.rules()[r].prob;
      if (p > chart.best[cell]) {
        chart.best[cell] = p;
        chart.rule[cell] = r;
      }
    }
  }
  const auto& rules = g.rules();
  for (size_t len = 2; len <= n; ++len) {
    for (size_t i = 0; i + len <= n; ++i) {
      const size_t j = i + len;
      for (const auto& br : g.binary_rules()) {
        const size_t cell = chart.at(i, j, br.lhs);
        const double rp = rules[br.rule].prob;
        for (size_t k = i + 1; k < j; ++k) {
          const double l = chart.best[chart.at(i, k, br.left)];
          if (l == 0.0) continue;
          const double r = chart.best[chart.at(k, j, br.right)];
          if (r == 0.0) continue;
          const double p = rp * l * r;
          if (p > chart.best[cell]) {
            chart.best[cell] = p;
            chart.rule[cell] = br.rule;
            chart.split[cell] = static_cast<int>(k);
          }
        }
      }
    }
  }
  int root = -1;
  for (size_t a = 0; a < g.symbol_count(); ++a) {
    const int s = static_cast<int>(a);
    if (!g.is_start_symbol(s)) continue;
    const size_t cell = chart.at(0, n, s);
    if (chart.best[cell] == 0.0) continue;
    if (root < 0) {
      root = s;
      continue;
    }
    const size_t best_cell = chart.at(0, n, root);
    if (chart.best[cell] > chart.best[best_cell] ||
        (chart.best[cell] == chart.best[best_cell] &&
         chart.rule[cell] < chart.rule[best_cell])) {
      root = s;
    }
  }
  if (root < 0) return std::nullopt;
  ParseTree tree;
  tree.root = build(chart, g, tokens, 0, n, root);
  return tree;
}

HeadRules HeadRules::defaults() {
  const std::vector<std::string> verbs = {"VBP", "VBZ", "VBD", "VB", "VBN",
                                          "VBG", "V",   "MD",  "VP"};
  const std::vector<std::string> nouns = {"NN", "NNS", "NNP", "NNPS", "NP",
                                          "PRP", "CD"};
  return HeadRules({
      {"S", {false, {"VP", "S"}}},
      {"SBAR", {false, {"IN", "S"}}},
      {"VP", {false, verbs}},
      {"NP", {true, nouns}},
      {"PP", {false, {"IN", "TO"}}},
      {"ADJP", {true, {"JJ", "JJR", "JJS"}}},
      {"ADVP", {true, {"RB", "RBR", "RBS"}}},
      {"PRT", {false, {"RP"}}},
  });
}

const HeadRule* HeadRules::find(const std::string& label) const {
  auto it = table_.find(label);
  return it == table_.end() ? nullptr : &it->second;
}

std::vector<std::string> assign_heads(ParseTree& tree, const HeadRules& rules) {
  std::set<std::string> missing;
  heads_node(tree.root, rules, missing);
  std::vector<std::string> warnings;
  for (const auto& label : missing) {
    warnings.push_back("no head rule for " + label +
                       "; using the leftmost child");
  }
  return warnings;
}

}  // namespace augforge::alp
