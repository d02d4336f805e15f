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

#include "augforge/ease.h"

#include <gtest/gtest.h>

#include "augforge/classifier.h"
#include "augforge/kernels.h"

namespace augforge {
namespace {

LabeledResponse resp(const std::string& text) {
  return {"r1", text, {{1, 0}}, Origin::kHuman, {}, {}};
}

TEST(ExtractTest, SentencesAndClauses) {
  EXPECT_EQ(extract(resp("Like charges repel. They stop when energy is gone."))
                .size(),
            2u);
  const auto because =
      extract(resp("They move because the charges repel strongly here."));
  ASSERT_EQ(because.size(), 2u);
  EXPECT_EQ(because[0].text, "They move");
  EXPECT_EQ(because[1].text, "the charges repel strongly here");
  const auto ok = extract(resp("ok"));
  ASSERT_EQ(ok.size(), 1u);
  EXPECT_EQ(ok[0].token_count, 1u);
  EXPECT_TRUE(extract(resp("")).empty());
}

TEST(ExtractTest, SpansPointIntoSource) {
  const std::string text = "Carts MOVE apart so they stop later.  Done!";
  for (const auto& f : extract(resp(text))) {
    ASSERT_LE(f.end, text.size());
    EXPECT_EQ(text.substr(f.begin, f.end - f.begin), f.text);
    EXPECT_GE(f.token_count, 1u);
  }
  EXPECT_EQ(extract(resp(text))[0].text, "Carts MOVE apart");
}

TEST(ExtractTest, ShortSideBlocksSplit) {
  EXPECT_EQ(extract(resp("Move because charges repel."), 2).size(), 1u);
}

EaseCandidate cand(const std::string& text, int label, double conf) {
  EaseCandidate c;
  c.fragment.text = text;
  c.fragment.source_id = "r";
  c.fragment.token_count = tokenize(text).size();
  c.fragment.end = text.size();
  c.acquired_label = label;
  c.confidence = conf;
  return c;
}

TEST(SiftTest, ReasonsInOrder) {
  std::vector<EaseCandidate> cs = {
      cand("ok", 1, 0.99),
      cand("one two three four five", 0, 0.99),
      cand("one two three four six", 1, 0.79),
      cand("one two three four seven", 1, 0.80),
      cand("the original response text here", 1, 0.95),
      cand("one two three four seven", 1, 0.95),
  };
  const auto acc = sift(cs, {}, 1, {"the original response text here"});
  EXPECT_EQ(acc, (std::vector<size_t>{3}));
  EXPECT_EQ(cs[0].rejection, Rejection::kTooShort);
  EXPECT_EQ(cs[1].rejection, Rejection::kWrongLabel);
  EXPECT_EQ(cs[2].rejection, Rejection::kLowConfidence);
  EXPECT_FALSE(cs[3].rejection);
  EXPECT_EQ(cs[4].rejection, Rejection::kDuplicate);
  EXPECT_EQ(cs[5].rejection, Rejection::kDuplicate);
}

TEST(SiftTest, LimitStopsEvaluation) {
  std::vector<EaseCandidate> cs = {cand("a b c d e", 1, 0.9),
                                   cand("a b c d f", 1, 0.9),
                                   cand("x", 1, 0.9)};
  EXPECT_EQ(sift(cs, {}, 1, {}, 1).size(), 1u);
  EXPECT_FALSE(cs[2].rejection);
  EXPECT_THROW(sift(cs, {0, 0.8, true}, 1, {}), Error);
}

TEST(AcquireTest, ConstantStubAndUntrained) {
  const Vocabulary v = fit_vocabulary(std::vector<std::string>{"a b", "a c"},
                                      {1, 1, 1});
  Fragment f;
  f.text = "a b";
  const auto [label, conf] = acquire(f, v, ConstantLabeler(1));
  EXPECT_EQ(label, 1);
  EXPECT_DOUBLE_EQ(conf, 1.0);
  EXPECT_THROW(acquire(f, v, LogRegLabeler({}, 1, v.size())), Error);
}

TEST(EmployTest, AppendsWithProvenance) {
  Corpus c;
  c.schema = CategorySchema::for_ids({1, 2});
  c.responses = {{"a", "x y", {{1, 0}, {2, 1}}, Origin::kHuman, {}, {}}};
  const EaseCandidate e = cand("carts move apart", 1, 0.9);
  const Corpus out = employ(c, {&e}, 1, 1);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out.responses[0], c.responses[0]);
  const auto& s = out.responses[1];
  EXPECT_EQ(s.origin, Origin::kEase);
  EXPECT_EQ(s.labels.at(1), 1);
  EXPECT_EQ(s.labels.at(2), 0);
  EXPECT_EQ(s.parent_ids, (std::vector<std::string>{"r"}));
  EXPECT_EQ(employ(c, {}, 1, 1), c);
  const EaseCandidate wrong = cand("z", 0, 0.9);
  EXPECT_THROW(employ(c, {&wrong}, 1, 1), Error);
}

// Adding the accepted counts to the base counts reproduces the post-EASE
// ratios.
TEST(EmployTest, RatioArithmetic) {
  const struct {
    size_t major, minor, added;
    double ratio;
  } rows[] = {{1409, 57, 1195, 1.13}, {1447, 19, 1246, 1.14},
              {1398, 68, 1164, 1.13}};
  for (const auto& r : rows) {
    const double got = static_cast<double>(r.major) / (r.minor + r.added);
    EXPECT_NEAR(got, r.ratio, 0.005 + 1e-9);
  }
}

struct Trained {
  Corpus corpus;
  Vocabulary vocab;
  std::unique_ptr<LogRegLabeler> labeler;
};

Trained train_on(const BenchmarkSpec& spec, int cat) {
  Trained t;
  t.corpus = generate_benchmark_corpus(spec);
  std::vector<std::string> texts;
  std::vector<int> y;
  for (const auto& r : t.corpus.responses) {
    texts.push_back(r.text);
    y.push_back(r.labels.at(cat));
  }
  t.vocab = fit_vocabulary(texts);
  const auto x = kernels::parallel::tfidf_batch(texts, t.vocab);
  LogRegParams p;
  p.learning_rate = 4.0;
  p.class_weighting = true;
  t.labeler = std::make_unique<LogRegLabeler>(p, 1, t.vocab.size());
  t.labeler->train(x, y);
  return t;
}

BenchmarkSpec keyword_spec(size_t signal_count, double signal_prob) {
  BenchmarkSpec spec;
  spec.total = 1466;
  spec.seed = 17;
  BenchmarkCategorySpec c;
  c.id = 5;
  c.positives = 57;
  c.signal_count = signal_count;
  c.signal_prob = signal_prob;
  for (int k = 0; k < 80; ++k) c.keywords.push_back("sig" + std::to_string(k));
  spec.categories = {c};
  return spec;
}

TEST(EaseRunTest, AbundantSignalReachesParity) {
  const Trained t = train_on(keyword_spec(30, 0.95), 5);
  ASSERT_NEAR(profile(t.corpus, 5).ratio, 24.72, 0.01);
  const EaseResult r = ease_run(t.corpus, 5, *t.labeler, t.vocab, {}, 1.15, 3);
  EXPECT_LE(r.final_ratio, 1.15);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.corpus.size(), t.corpus.size() + r.added);
  for (size_t i = 0; i < t.corpus.size(); ++i) {
    EXPECT_EQ(r.corpus.responses[i], t.corpus.responses[i]);
  }
  size_t accepted = 0;
  for (const auto& c : r.audit) {
    if (!c.accepted) continue;
    ++accepted;
    EXPECT_GE(c.fragment.token_count, 5u);
    EXPECT_GE(c.confidence, 0.8);
    EXPECT_EQ(c.acquired_label, 1);
  }
  EXPECT_EQ(accepted, r.added);
  const EaseResult again =
      ease_run(t.corpus, 5, *t.labeler, t.vocab, {}, 1.15, 3);
  EXPECT_EQ(ease_audit_to_jsonl(again.audit), ease_audit_to_jsonl(r.audit));
}

TEST(EaseRunTest, PlantedKeywordFragmentIsLabeledPositive) {
  const Trained t = train_on(keyword_spec(30, 0.95), 5);
  Fragment f;
  f.text = "the answer talks about sig3 and sig41";
  const auto [label, conf] = acquire(f, t.vocab, *t.labeler);
  EXPECT_EQ(label, 1);
  EXPECT_GT(conf, 0.5);
  f.text = "the track is flat";
  EXPECT_EQ(acquire(f, t.vocab, *t.labeler).first, 0);
}

TEST(EaseRunTest, TargetAlreadyMetEmploysNothing) {
  const Trained t = train_on(keyword_spec(2, 0.95), 5);
  const EaseResult r = ease_run(t.corpus, 5, *t.labeler, t.vocab, {}, 30.0, 3);
  EXPECT_EQ(r.added, 0u);
  EXPECT_EQ(r.corpus, t.corpus);
}

TEST(EaseRunTest, SignalFreeCorpusWarns) {
  const Trained t = train_on(keyword_spec(1, 0.0), 5);
  const EaseResult r = ease_run(t.corpus, 5, *t.labeler, t.vocab, {}, 1.15, 3);
  EXPECT_GT(r.final_ratio, 1.15);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings[0].find("ease"), std::string::npos);
}

}  // namespace
}  // namespace augforge
