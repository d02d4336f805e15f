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

#ifndef AUGFORGE_ALP_AUGMENT_H_
#define AUGFORGE_ALP_AUGMENT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "augforge/alp/grammar.h"
#include "augforge/alp/parse.h"
#include "augforge/corpus.h"

namespace augforge::alp {

struct AlpParams {
  double subtree_prob_threshold = 0.01;
  int max_swaps = 2;
  double synonym_rate = 0.15;
  bool synonyms_after_swap = true;
  uint64_t seed = 0;
};

void validate(const AlpParams& params);

// A swappable constituent, addressed by the child-index path from the root.
struct SubtreeRef {
  std::vector<int> path;
  std::string label;
  std::string head_pos;
  double inside = 0.0;
  size_t begin = 0;
  size_t end = 0;
};

// Internal, non-root, non-intermediate nodes whose inside probability is at
// least the threshold. Single-word constituents are excluded. The tree must
// carry heads (assign_heads).
std::vector<SubtreeRef> extract_subtrees(const ParseTree& tree,
                                         const AlpParams& params);

struct SwapResult {
  ParseTree a;
  ParseTree b;
  std::string sentence_a;
  std::string sentence_b;
  bool no_op = false;
  // (label, head POS) of each exchanged pair, in swap order.
  std::vector<std::pair<std::string, std::string>> swapped;
};

// Exchanges up to params.max_swaps randomly chosen compatible subtree pairs
// (same CNF symbol and same head POS, different yields). Swapping a tree with
// an identical tree leaves both unchanged. When no compatible pair exists the
// originals come back with no_op set.
SwapResult swap_subtrees(const ParseTree& a, const ParseTree& b,
                         const HeadRules& heads, const AlpParams& params,
                         Rng& rng);

// (surface form, coarse POS) -> synonyms. Coarse POS is one of N, V, ADJ, ADV.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  // Tab-separated `lemma<TAB>POS<TAB>syn1,syn2,...`; '#' comments allowed.
  static SynonymLexicon from_tsv(const std::string& content);
  static SynonymLexicon load(const std::filesystem::path& path);

  void add(const std::string& lemma, const std::string& pos,
           std::vector<std::string> synonyms);
  const std::vector<std::string>* find(const std::string& lemma,
                                       const std::string& pos) const;
  size_t size() const { return entries_.size(); }
  const std::map<std::pair<std::string, std::string>,
                 std::vector<std::string>>&
  entries() const {
    return entries_;
  }

 private:
  std::map<std::pair<std::string, std::string>, std::vector<std::string>>
      entries_;
};

// Pairs in `forbidden` (either order) that the lexicon lists as synonyms.
std::vector<std::pair<std::string, std::string>> audit_lexicon(
    const SynonymLexicon& lexicon,
    const std::vector<std::pair<std::string, std::string>>& forbidden);
std::vector<std::pair<std::string, std::string>> read_word_pairs(
    const std::string& content);

// Penn tag -> coarse POS ("" when not a content word).
std::string coarse_pos(const std::string& tag);

// Each content token with lexicon entries is replaced, with probability
// `rate`, by a uniformly chosen synonym of matching POS.
std::vector<std::string> substitute_synonyms(
    const std::vector<std::string>& tokens,
    const std::vector<std::string>& tags, const SynonymLexicon& lexicon,
    double rate, Rng& rng);

struct AlpAuditRecord {
  std::string id;
  std::vector<std::string> parent_ids;
  std::string source_a;
  std::string source_b;
  std::vector<std::pair<std::string, std::string>> swapped;
  std::string text;
  bool accepted = false;
  std::string reason;  // "duplicate" or "no_compatible_pair" when rejected
};

struct AlpResult {
  Corpus corpus;  // train corpus plus accepted synthetic responses
  size_t added = 0;
  size_t parsed_sentences = 0;
  size_t skipped_sentences = 0;
  std::vector<AlpAuditRecord> audit;
  std::vector<std::string> warnings;
};

// Generates up to n_target synthetic minority responses for one category.
// Sentences of minority responses are parsed (unparseable ones skipped); each
// step swaps subtrees between two parsed sentences, optionally substitutes
// synonyms, and splices the result back into its parent response. Throws when
// fewer than two sentences parse.
AlpResult alp_augment(const Corpus& train, int category_id,
                      const Grammar& grammar, const HeadRules& heads,
                      const SynonymLexicon& lexicon, const AlpParams& params,
                      size_t n_target);

std::string alp_audit_to_jsonl(const std::vector<AlpAuditRecord>& audit);

// Sentence segments of a response (split on . ! ?), trimmed, without the
// terminal punctuation.
std::vector<std::string> sentence_segments(const std::string& text);

}  // namespace augforge::alp

#endif  // AUGFORGE_ALP_AUGMENT_H_
