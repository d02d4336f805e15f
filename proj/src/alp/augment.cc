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

#include "augforge/alp/augment.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_set>

#include "augforge/features.h"
#include "json.hpp"

namespace augforge::alp {
namespace {

void collect_subtrees(const ParseNode& n, std::vector<int>& path, bool is_root,
                      double threshold, std::vector<SubtreeRef>& out) {
  if (n.is_lexical()) return;
  if (!is_root && !is_intermediate(n.label) && n.inside >= threshold) {
    out.push_back({path, n.label, n.head_pos, n.inside, n.begin, n.end});
  }
  for (size_t i = 0; i < n.children.size(); ++i) {
    path.push_back(static_cast<int>(i));
    collect_subtrees(n.children[i], path, false, threshold, out);
    path.pop_back();
  }
}

ParseNode& node_at(ParseTree& t, const std::vector<int>& path) {
  ParseNode* n = &t.root;
  for (int i : path) n = &n->children[static_cast<size_t>(i)];
  return *n;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::vector<std::string> span_words(const std::vector<std::string>& words,
                                    const SubtreeRef& s) {
  return {words.begin() + static_cast<long>(s.begin),
          words.begin() + static_cast<long>(s.end)};
}

std::string capitalize(std::string s) {
  if (!s.empty()) {
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  }
  return s;
}

std::string compose(const std::vector<std::string>& segments) {
  std::string out;
  for (const auto& s : segments) {
    if (!out.empty()) out += ". ";
    out += capitalize(s);
  }
  return out + ".";
}

struct ParsedSentence {
  size_t response;
  size_t segment;
  ParseTree tree;
};

}  // namespace

void validate(const AlpParams& p) {
  if (!(p.subtree_prob_threshold > 0.0 && p.subtree_prob_threshold <= 1.0)) {
    throw Error("alp: subtree_prob_threshold must lie in (0, 1]");
  }
  if (p.max_swaps < 1) throw Error("alp: max_swaps must be >= 1");
  if (!(p.synonym_rate >= 0.0 && p.synonym_rate <= 1.0)) {
    throw Error("alp: synonym_rate must lie in [0, 1]");
  }
}

std::vector<SubtreeRef> extract_subtrees(const ParseTree& tree,
                                         const AlpParams& params) {
  std::vector<SubtreeRef> out;
  std::vector<int> path;
  collect_subtrees(tree.root, path, true, params.subtree_prob_threshold, out);
  return out;
}

SwapResult swap_subtrees(const ParseTree& a, const ParseTree& b,
                         const HeadRules& heads, const AlpParams& params,
                         Rng& rng) {
  validate(params);
  SwapResult out;
  out.a = a;
  out.b = b;
  assign_heads(out.a, heads);
  assign_heads(out.b, heads);
  // A tree swapped with itself exchanges every node with its own copy.
  if (a.to_string() != b.to_string()) {
    const int n_swaps = 1 + static_cast<int>(rng.below(
                                static_cast<uint64_t>(params.max_swaps)));
    for (int s = 0; s < n_swaps; ++s) {
      const auto ca = extract_subtrees(out.a, params);
      const auto cb = extract_subtrees(out.b, params);
      const auto wa = out.a.yield();
      const auto wb = out.b.yield();
      std::vector<std::pair<size_t, size_t>> pairs;
      for (size_t x = 0; x < ca.size(); ++x) {
        for (size_t y = 0; y < cb.size(); ++y) {
          if (ca[x].label == cb[y].label && ca[x].head_pos == cb[y].head_pos &&
              span_words(wa, ca[x]) != span_words(wb, cb[y])) {
            pairs.emplace_back(x, y);
          }
        }
      }
      if (pairs.empty()) {
        if (s == 0) out.no_op = true;
        break;
      }
      const auto [x, y] = pairs[rng.below(pairs.size())];
      std::swap(node_at(out.a, ca[x].path), node_at(out.b, cb[y].path));
      out.a.refresh();
      out.b.refresh();
      assign_heads(out.a, heads);
      assign_heads(out.b, heads);
      out.swapped.emplace_back(ca[x].label, ca[x].head_pos);
    }
  }
  out.sentence_a = join(out.a.yield());
  out.sentence_b = join(out.b.yield());
  return out;
}

void SynonymLexicon::add(const std::string& lemma, const std::string& pos,
                         std::vector<std::string> synonyms) {
  for (const auto& s : synonyms) {
    if (s == lemma) {
      throw Error("lexicon: '" + lemma + "' lists itself as a synonym");
    }
  }
  auto& slot = entries_[{lemma, pos}];
  for (auto& s : synonyms) {
    if (std::find(slot.begin(), slot.end(), s) == slot.end()) {
      slot.push_back(std::move(s));
    }
  }
}

const std::vector<std::string>* SynonymLexicon::find(
    const std::string& lemma, const std::string& pos) const {
  auto it = entries_.find({lemma, pos});
  return it == entries_.end() || it->second.empty() ? nullptr : &it->second;
}

SynonymLexicon SynonymLexicon::from_tsv(const std::string& content) {
  SynonymLexicon lex;
  std::istringstream in(content);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string col;
    while (std::getline(ls, col, '\t')) cols.push_back(trim(col));
    if (cols.size() != 3 || cols[0].empty() || cols[1].empty()) {
      throw Error("lexicon line " + std::to_string(lineno) +
                  ": expected lemma<TAB>POS<TAB>synonyms");
    }
    std::vector<std::string> syns;
    std::stringstream ss(cols[2]);
    std::string s;
    while (std::getline(ss, s, ',')) {
      s = trim(s);
      if (!s.empty()) syns.push_back(s);
    }
    try {
      lex.add(cols[0], cols[1], std::move(syns));
    } catch (const Error& e) {
      throw Error("lexicon line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return lex;
}

SynonymLexicon SynonymLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_tsv(ss.str());
}

std::vector<std::pair<std::string, std::string>> read_word_pairs(
    const std::string& content) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ls(t);
    std::string a;
    std::string b;
    if (!(ls >> a >> b)) throw Error("word pair line needs two words: " + t);
    out.emplace_back(a, b);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> audit_lexicon(
    const SynonymLexicon& lexicon,
    const std::vector<std::pair<std::string, std::string>>& forbidden) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, syns] : lexicon.entries()) {
    for (const auto& s : syns) {
      for (const auto& [x, y] : forbidden) {
        if ((key.first == x && s == y) || (key.first == y && s == x)) {
          out.emplace_back(key.first, s);
        }
      }
    }
  }
  return out;
}

std::string coarse_pos(const std::string& tag) {
  if (tag.rfind("NN", 0) == 0) return "N";
  if (tag.rfind("VB", 0) == 0 || tag == "V") return "V";
  if (tag.rfind("JJ", 0) == 0) return "ADJ";
  if (tag.rfind("RB", 0) == 0) return "ADV";
  return "";
}

std::vector<std::string> substitute_synonyms(
    const std::vector<std::string>& tokens,
    const std::vector<std::string>& tags, const SynonymLexicon& lexicon,
    double rate, Rng& rng) {
  if (tokens.size() != tags.size()) {
    throw Error("substitute_synonyms: tokens and tags differ in length");
  }
  std::vector<std::string> out = tokens;
  for (size_t i = 0; i < out.size(); ++i) {
    const std::string pos = coarse_pos(tags[i]);
    if (pos.empty()) continue;
    const auto* syns = lexicon.find(tokens[i], pos);
    if (!syns) continue;
    if (rng.uniform01() < rate) out[i] = (*syns)[rng.below(syns->size())];
  }
  return out;
}

std::vector<std::string> sentence_segments(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    std::string t = trim(cur);
    if (!t.empty()) out.push_back(std::move(t));
    cur.clear();
  };
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

AlpResult alp_augment(const Corpus& train, int category_id,
                      const Grammar& grammar, const HeadRules& heads,
                      const SynonymLexicon& lexicon, const AlpParams& params,
                      size_t n_target) {
  validate(params);
  AlpResult result;
  result.corpus = train;
  if (n_target == 0) return result;
  const ImbalanceProfile prof = profile(train, category_id);

  std::vector<size_t> minority;
  for (size_t i = 0; i < train.responses.size(); ++i) {
    if (train.responses[i].labels.at(category_id) == prof.minority_label) {
      minority.push_back(i);
    }
  }
  std::vector<std::vector<std::string>> segments(minority.size());
  std::vector<std::pair<size_t, size_t>> jobs;
  for (size_t m = 0; m < minority.size(); ++m) {
    segments[m] = sentence_segments(train.responses[minority[m]].text);
    for (size_t s = 0; s < segments[m].size(); ++s) jobs.emplace_back(m, s);
  }
  std::vector<std::optional<ParseTree>> parses(jobs.size());
  const auto n_jobs = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long j = 0; j < n_jobs; ++j) {
    const auto& [m, s] = jobs[static_cast<size_t>(j)];
    parses[j] = cky_parse(tokenize(segments[m][s]), grammar);
    if (parses[j]) assign_heads(*parses[j], heads);
  }
  std::vector<ParsedSentence> pool;
  for (size_t j = 0; j < jobs.size(); ++j) {
    if (parses[j]) {
      pool.push_back({jobs[j].first, jobs[j].second, std::move(*parses[j])});
    }
  }
  result.parsed_sentences = pool.size();
  result.skipped_sentences = jobs.size() - pool.size();
  if (pool.size() < 2) {
    throw Error("alp: category " + std::to_string(category_id) + ": only " +
                std::to_string(pool.size()) +
                " minority sentence(s) parse; need at least 2");
  }

  std::unordered_set<std::string> seen;
  for (const auto& r : train.responses) seen.insert(r.text);
  Rng rng(derive_seed(params.seed, "alp", static_cast<uint64_t>(category_id)));
  const size_t max_attempts = 20 * n_target + 200;
  size_t attempts = 0;
  std::vector<int> schema_ids = train.schema.ids();

  // Sentences without a candidate subtree can never swap, so pairs are drawn
  // only among sentences sharing at least one (label, head POS) key.
  std::vector<std::set<std::pair<std::string, std::string>>> keys(pool.size());
  std::map<std::pair<std::string, std::string>, std::vector<size_t>> by_key;
  for (size_t k = 0; k < pool.size(); ++k) {
    for (const auto& st : extract_subtrees(pool[k].tree, params)) {
      keys[k].emplace(st.label, st.head_pos);
    }
    for (const auto& key : keys[k]) by_key[key].push_back(k);
  }
  std::vector<size_t> swappable;
  for (size_t k = 0; k < pool.size(); ++k) {
    for (const auto& key : keys[k]) {
      if (by_key[key].size() > 1) {
        swappable.push_back(k);
        break;
      }
    }
  }

  while (result.added < n_target && attempts < max_attempts &&
         !swappable.empty()) {
    ++attempts;
    const size_t i = swappable[rng.below(swappable.size())];
    std::vector<size_t> partners;
    for (const auto& key : keys[i]) {
      for (size_t k : by_key[key]) {
        if (k != i) partners.push_back(k);
      }
    }
    std::sort(partners.begin(), partners.end());
    partners.erase(std::unique(partners.begin(), partners.end()),
                   partners.end());
    const size_t j = partners[rng.below(partners.size())];
    const ParsedSentence& pa = pool[i];
    const ParsedSentence& pb = pool[j];
    SwapResult swap = swap_subtrees(pa.tree, pb.tree, heads, params, rng);
    if (swap.no_op) continue;

    const ParsedSentence* sides[2] = {&pa, &pb};
    const ParseTree* trees[2] = {&swap.a, &swap.b};
    for (int side = 0; side < 2 && result.added < n_target; ++side) {
      const ParsedSentence& frame = *sides[side];
      const ParsedSentence& other = *sides[1 - side];
      std::vector<std::string> tokens = trees[side]->yield();
      if (params.synonyms_after_swap && params.synonym_rate > 0.0) {
        tokens = substitute_synonyms(tokens, trees[side]->tags(), lexicon,
                                     params.synonym_rate, rng);
      }
      std::vector<std::string> segs = segments[frame.response];
      segs[frame.segment] = join(tokens);
      const LabeledResponse& parent = train.responses[minority[frame.response]];
      const LabeledResponse& partner =
          train.responses[minority[other.response]];

      AlpAuditRecord rec;
      rec.parent_ids = {parent.id, partner.id};
      rec.source_a = segments[frame.response][frame.segment];
      rec.source_b = segments[other.response][other.segment];
      rec.swapped = swap.swapped;
      rec.text = compose(segs);
      if (!seen.insert(rec.text).second) {
        rec.reason = "duplicate";
        result.audit.push_back(std::move(rec));
        continue;
      }
      rec.accepted = true;
      rec.id = "alp-c" + std::to_string(category_id) + "-" +
               std::to_string(result.added + 1);
      LabeledResponse r;
      r.id = rec.id;
      r.text = rec.text;
      for (int id : schema_ids) r.labels[id] = 0;
      r.labels[category_id] = prof.minority_label;
      r.origin = Origin::kAlp;
      r.parent_ids = rec.parent_ids;
      r.target_category = category_id;
      result.corpus.responses.push_back(std::move(r));
      result.audit.push_back(std::move(rec));
      ++result.added;
    }
  }
  if (result.added < n_target) {
    result.warnings.push_back(
        "alp: category " + std::to_string(category_id) + ": generated " +
        std::to_string(result.added) + " of " + std::to_string(n_target) +
        " requested samples");
    log_warning(result.warnings.back());
  }
  return result;
}

std::string alp_audit_to_jsonl(const std::vector<AlpAuditRecord>& audit) {
  std::string out;
  for (const auto& r : audit) {
    nlohmann::json swapped = nlohmann::json::array();
    for (const auto& [label, pos] : r.swapped) swapped.push_back({label, pos});
    nlohmann::json obj = {{"id", r.id},
                          {"parent_ids", r.parent_ids},
                          {"source_a", r.source_a},
                          {"source_b", r.source_b},
                          {"swapped", swapped},
                          {"text", r.text},
                          {"accepted", r.accepted},
                          {"reason", r.reason}};
    out += obj.dump() + "\n";
  }
  return out;
}

}  // namespace augforge::alp
