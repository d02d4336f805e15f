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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "augforge/alp/augment.h"
#include "augforge/alp/grammar.h"
#include "augforge/alp/parse.h"
#include "augforge/features.h"
#include "support/oracles.h"

namespace augforge::alp {
namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(BracketTest, ParseAndPrint) {
  const BracketTree t =
      parse_bracketed("( (S (NP (DT the) (NNS carts)) (VP (V repel))) )");
  EXPECT_EQ(t.label, "S");
  EXPECT_EQ(t.yield(), (std::vector<std::string>{"the", "carts", "repel"}));
  EXPECT_EQ(parse_bracketed(t.to_string()), t);
  EXPECT_THROW(parse_bracketed("(S (NP the"), Error);
}

TEST(TreebankTest, ErrorNamesTreeIndex) {
  try {
    read_treebank("# c\n(S (A a) (B b))\n(S (A a\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("1"), std::string::npos);
  }
}

TEST(CnfTest, SymbolNaming) {
  const BracketTree t =
      parse_bracketed("(S (NP (NNS carts)) (VP (VBP move) (ADVP (RB away)) "
                      "(PP (IN from) (NP (PRP it)))))");
  const BracketTree c = to_cnf(t);
  EXPECT_EQ(c.children[0].label, "NP+NNS");
  EXPECT_TRUE(is_intermediate(c.children[1].children[1].label));
  EXPECT_EQ(top_label("S+VP"), "S");
  EXPECT_EQ(bottom_label("NP+NNS"), "NNS");
}

TEST(InduceTest, MaximumLikelihood) {
  const auto tb = read_treebank(
      "(S (NP (N carts)) (VP (V move)))\n"
      "(S (S (NP (N carts)) (VP (V move))) (VP (V stop)))\n");
  const Grammar g = induce_pcfg(tb);
  EXPECT_NEAR(g.source_probability("S", {"NP", "VP"}), 2.0 / 3, 1e-12);
  EXPECT_NEAR(g.source_probability("S", {"S", "VP"}), 1.0 / 3, 1e-12);
  EXPECT_NO_THROW(validate_grammar(g));
  EXPECT_THROW(induce_pcfg({}), Error);
}

TEST(InduceTest, SingleTreeAllOnes) {
  const Grammar g =
      induce_pcfg(read_treebank("(S (NP (N charges)) (VP (V repel)))"));
  for (const auto& r : g.rules()) EXPECT_DOUBLE_EQ(r.prob, 1.0);
}

TEST(ValidateTest, RejectsBadSums) {
  Grammar g("S", {{"S", {"A", "A"}, 0.7, false}, {"A", {"x"}, 1.0, true}});
  EXPECT_THROW(validate_grammar(g), Error);
}

TEST(CkyTest, UniqueParseProbability) {
  const Grammar g("S", {{"S", {"N", "V"}, 0.6, false},
                        {"S", {"V", "V"}, 0.4, false},
                        {"N", {"charges"}, 1.0, true},
                        {"V", {"repel"}, 0.5, true},
                        {"V", {"move"}, 0.5, true}});
  const auto t = cky_parse({"charges", "repel"}, g);
  ASSERT_TRUE(t);
  EXPECT_NEAR(t->probability(), 0.6 * 1.0 * 0.5, 1e-15);
  EXPECT_EQ(t->to_string(), "(S (N charges) (V repel))");
  EXPECT_FALSE(cky_parse({"charges", "zzz"}, g));
  EXPECT_FALSE(cky_parse({}, g));
}

TEST(CkyTest, AmbiguousSentencePicksLikelierTree) {
  const Grammar g("S", {{"S", {"A", "B"}, 0.3, false},
                        {"S", {"B", "A"}, 0.7, false},
                        {"A", {"x"}, 1.0, true},
                        {"B", {"x"}, 1.0, true}});
  const auto t = cky_parse({"x", "x"}, g);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->to_string(), "(S (B x) (A x))");
  EXPECT_NEAR(t->probability(), 0.7, 1e-15);
}

TEST(CkyTest, MatchesExhaustiveEnumeration) {
  Rng rng(2024);
  size_t checked = 0;
  for (int gi = 0; gi < 12; ++gi) {
    const Grammar g = oracle::random_cnf_grammar(rng);
    for (int s = 0; s < 60; ++s) {
      std::vector<std::string> toks =
          rng.bernoulli(0.7) ? oracle::sample_sentence(g, rng, 8)
                             : std::vector<std::string>{};
      if (toks.empty()) {
        const size_t n = 1 + rng.below(8);
        const char* w[] = {"x", "y", "z"};
        for (size_t i = 0; i < n; ++i) toks.push_back(w[rng.below(3)]);
      }
      if (oracle::count_parses(g, toks) > 20000) continue;
      const auto all = oracle::enumerate_parses(g, toks);
      const auto t = cky_parse(toks, g);
      ++checked;
      if (all.empty()) {
        EXPECT_FALSE(t);
        continue;
      }
      ASSERT_TRUE(t);
      double best = 0;
      for (const auto& d : all) best = std::max(best, d.prob);
      EXPECT_NEAR(t->probability() / best, 1.0, 1e-9);
      bool found = false;
      for (const auto& d : all) {
        if (d.tree == t->to_string() &&
            std::abs(d.prob - best) <= 1e-12 * best) {
          found = true;
        }
      }
      EXPECT_TRUE(found) << t->to_string();
    }
  }
  EXPECT_GE(checked, 200u);
}

ParseTree parse_with(const Grammar& g, const std::string& s) {
  auto t = cky_parse(tokenize(s), g);
  if (!t) throw Error("unparsed: " + s);
  assign_heads(*t, HeadRules::defaults());
  return *t;
}

Grammar toy_grammar() {
  return induce_pcfg(read_treebank(
      "(S (NP (DT the) (NN cart)) (VP (V repel) (NP (DT the) (NN charge))))\n"
      "(S (NP (DT a) (NN magnet)) (VP (V move) (NP (DT a) (NN cart))))\n"
      "(S (NP (DT the) (NN charge)) (VP (V move)))\n"));
}

TEST(HeadsTest, NominalAndVerbalHeads) {
  const Grammar g = toy_grammar();
  const ParseTree t = parse_with(g, "the cart repel the charge");
  EXPECT_EQ(t.root.head_word, "repel");
  EXPECT_EQ(t.root.children[0].head_word, "cart");
  EXPECT_EQ(t.root.children[0].head_pos, "NN");
}

TEST(HeadsTest, UnknownLabelFallsBackWithWarning) {
  const Grammar g("X", {{"X", {"Q", "R"}, 1.0, false},
                        {"Q", {"a"}, 1.0, true},
                        {"R", {"b"}, 1.0, true}});
  auto t = cky_parse({"a", "b"}, g);
  ASSERT_TRUE(t);
  const auto warnings = assign_heads(*t, HeadRules::defaults());
  EXPECT_EQ(t->root.head_word, "a");
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(SubtreeTest, ThresholdBoundaries) {
  const Grammar g = toy_grammar();
  const ParseTree t = parse_with(g, "the cart repel the charge");
  AlpParams all;
  all.subtree_prob_threshold = 1e-300;
  const auto every = extract_subtrees(t, all);
  EXPECT_FALSE(every.empty());
  AlpParams one;
  one.subtree_prob_threshold = 1.0;
  for (const auto& s : extract_subtrees(t, one)) EXPECT_DOUBLE_EQ(s.inside, 1.0);
  for (const auto& s : every) {
    EXPECT_FALSE(s.path.empty());
    EXPECT_FALSE(is_intermediate(s.label));
    EXPECT_GE(s.end - s.begin, 2u);
  }
}

TEST(SwapTest, ExchangesNounPhrases) {
  const Grammar g = toy_grammar();
  const ParseTree a = parse_with(g, "the cart repel the charge");
  const ParseTree b = parse_with(g, "a magnet move a cart");
  AlpParams p;
  p.subtree_prob_threshold = 1e-300;
  p.max_swaps = 1;
  Rng rng(1);
  const SwapResult r = swap_subtrees(a, b, HeadRules::defaults(), p, rng);
  ASSERT_FALSE(r.no_op);
  ASSERT_EQ(r.swapped.size(), 1u);
  EXPECT_NE(r.sentence_a, "the cart repel the charge");
  EXPECT_EQ(tokenize(r.sentence_a).size() + tokenize(r.sentence_b).size(), 10u);
  EXPECT_EQ(r.a.leaf_count(), tokenize(r.sentence_a).size());
}

TEST(SwapTest, SelfSwapIsIdentity) {
  const Grammar g = toy_grammar();
  const ParseTree a = parse_with(g, "the cart repel the charge");
  Rng rng(1);
  const SwapResult r = swap_subtrees(a, a, HeadRules::defaults(), {}, rng);
  EXPECT_EQ(r.sentence_a, "the cart repel the charge");
  EXPECT_EQ(r.sentence_b, "the cart repel the charge");
}

TEST(SwapTest, NoCompatiblePairIsNoOp) {
  const Grammar g("S", {{"S", {"A", "B"}, 0.5, false},
                        {"S", {"C", "D"}, 0.5, false},
                        {"A", {"a"}, 1.0, true},
                        {"B", {"b"}, 1.0, true},
                        {"C", {"c"}, 1.0, true},
                        {"D", {"d"}, 1.0, true}});
  auto a = cky_parse({"a", "b"}, g);
  auto b = cky_parse({"c", "d"}, g);
  assign_heads(*a, HeadRules::defaults());
  assign_heads(*b, HeadRules::defaults());
  Rng rng(1);
  const SwapResult r = swap_subtrees(*a, *b, HeadRules::defaults(), {}, rng);
  EXPECT_TRUE(r.no_op);
  EXPECT_EQ(r.sentence_a, "a b");
}

TEST(LexiconTest, TsvAndLookups) {
  const SynonymLexicon lex =
      SynonymLexicon::from_tsv("# c\nmove\tV\ttravel,shift\ncart\tN\ttrolley\n");
  EXPECT_EQ(lex.size(), 2u);
  ASSERT_TRUE(lex.find("move", "V"));
  EXPECT_FALSE(lex.find("move", "N"));
  EXPECT_THROW(SynonymLexicon::from_tsv("move\tV\n"), Error);
  SynonymLexicon self;
  EXPECT_THROW(self.add("move", "V", {"move"}), Error);
}

TEST(LexiconTest, SubstitutionRates) {
  SynonymLexicon lex;
  lex.add("move", "V", {"travel"});
  const std::vector<std::string> toks = {"carts", "move", "and", "move"};
  const std::vector<std::string> tags = {"NNS", "VBP", "CC", "VBP"};
  Rng r0(1);
  EXPECT_EQ(substitute_synonyms(toks, tags, lex, 0.0, r0), toks);
  Rng r1(1);
  EXPECT_EQ(substitute_synonyms(toks, tags, lex, 1.0, r1),
            (std::vector<std::string>{"carts", "travel", "and", "travel"}));
  Rng a(5), b(5);
  EXPECT_EQ(substitute_synonyms(toks, tags, lex, 0.5, a),
            substitute_synonyms(toks, tags, lex, 0.5, b));
}

TEST(LexiconTest, BundledLexiconPassesAntonymAudit) {
  const std::filesystem::path data = std::filesystem::path(AUGFORGE_SOURCE_DIR) / "data";
  const SynonymLexicon lex = SynonymLexicon::load(data / "lexicon.tsv");
  const auto pairs = read_word_pairs(read_file(data / "antonyms.txt"));
  EXPECT_FALSE(pairs.empty());
  EXPECT_TRUE(audit_lexicon(lex, pairs).empty());
  SynonymLexicon bad;
  bad.add("attract", "V", {"repel"});
  EXPECT_EQ(audit_lexicon(bad, {{"repel", "attract"}}).size(), 1u);
}

TEST(SegmentsTest, SplitsOnTerminalPunctuation) {
  EXPECT_EQ(sentence_segments("A b. C d! E?"),
            (std::vector<std::string>{"A b", "C d", "E"}));
}

class AlpAugmentTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const std::filesystem::path data =
        std::filesystem::path(AUGFORGE_SOURCE_DIR) / "data";
    grammar_ = induce_pcfg(read_treebank(read_file(data / "cart_treebank.txt")));
    lexicon_ = SynonymLexicon::load(data / "lexicon.tsv");
    corpus_ = generate_benchmark_corpus(default_benchmark_spec());
  }
  Grammar grammar_;
  SynonymLexicon lexicon_;
  Corpus corpus_;
};

TEST_F(AlpAugmentTest, AddsRequestedCountWithProvenance) {
  AlpParams p;
  p.seed = 3;
  const AlpResult r =
      alp_augment(corpus_, 5, grammar_, HeadRules::defaults(), lexicon_, p, 95);
  EXPECT_EQ(r.added, 95u);
  const ImbalanceProfile prof = profile(r.corpus, 5);
  EXPECT_NEAR(prof.ratio, 1409.0 / 152.0, 1e-9);
  std::set<std::string> texts;
  for (const auto& x : corpus_.responses) texts.insert(x.text);
  for (size_t i = corpus_.size(); i < r.corpus.size(); ++i) {
    const auto& s = r.corpus.responses[i];
    EXPECT_EQ(s.origin, Origin::kAlp);
    EXPECT_EQ(s.labels.at(5), 1);
    EXPECT_EQ(s.target_category, 5);
    EXPECT_EQ(s.parent_ids.size(), 2u);
    EXPECT_TRUE(texts.insert(s.text).second) << s.text;
  }
}

TEST_F(AlpAugmentTest, DeterministicAndZeroTarget) {
  AlpParams p;
  p.seed = 4;
  const auto a =
      alp_augment(corpus_, 6, grammar_, HeadRules::defaults(), lexicon_, p, 32);
  const auto b =
      alp_augment(corpus_, 6, grammar_, HeadRules::defaults(), lexicon_, p, 32);
  EXPECT_EQ(a.added, 32u);
  EXPECT_EQ(a.corpus, b.corpus);
  EXPECT_EQ(alp_audit_to_jsonl(a.audit), alp_audit_to_jsonl(b.audit));
  const auto z =
      alp_augment(corpus_, 6, grammar_, HeadRules::defaults(), lexicon_, p, 0);
  EXPECT_EQ(z.corpus, corpus_);
}

// Category 6 has few positives and most of their sentences offer no
// subtree above the threshold; pairs must still come from the swappable ones.
TEST_F(AlpAugmentTest, SmallPoolReachesTargetAcrossSeeds) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    AlpParams p;
    p.seed = seed;
    const auto r = alp_augment(corpus_, 6, grammar_, HeadRules::defaults(),
                               lexicon_, p, 32);
    EXPECT_EQ(r.added, 32u) << "seed " << seed;
  }
}

TEST_F(AlpAugmentTest, UnparseablePoolThrows) {
  Corpus c;
  c.schema = CategorySchema::for_ids({1});
  c.responses = {{"a", "zzz qqq.", {{1, 1}}, Origin::kHuman, {}, {}},
                 {"b", "www vvv.", {{1, 1}}, Origin::kHuman, {}, {}},
                 {"c", "the carts are red.", {{1, 0}}, Origin::kHuman, {}, {}}};
  EXPECT_THROW(alp_augment(c, 1, grammar_, HeadRules::defaults(), lexicon_, {}, 3),
               Error);
}

}  // namespace
}  // namespace augforge::alp
