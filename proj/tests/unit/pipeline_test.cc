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

#include "augforge/pipeline.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "augforge/hash.h"

namespace augforge {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json small_config(const fs::path& out) {
  const fs::path data = fs::path(AUGFORGE_SOURCE_DIR) / "data";
  return {
      {"benchmark",
       {{"total", 300},
        {"seed", 5},
        {"categories",
         {{{"id", 1}, {"positives", 100}},
          {{"id", 5}, {"positives", 12}, {"signal_count", 2}},
          {{"id", 6}, {"positives", 10}, {"signal_count", 2}}}}}},
      {"seed", 3},
      {"output_dir", out.string()},
      {"classifier", {{"learning_rate", 4.0}, {"epochs", 60}}},
      {"strategies", {"baseline", "smote", "llm", "ease", "alp"}},
      {"ease",
       {{"labeler", {{"learning_rate", 4.0}, {"epochs", 60},
                     {"class_weighting", true}}}}},
      {"alp",
       {{"treebank", (data / "cart_treebank.txt").string()},
        {"lexicon", (data / "lexicon.tsv").string()},
        {"target_ratio", 6.0}}},
      {"llm", {{"mode", "stub"}, {"item_stem", "Explain what happens."}}},
  };
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("augforge_pipeline_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()));
    fs::remove_all(dir_);
    clear_interrupt();
  }
  void TearDown() override {
    fs::remove_all(dir_);
    clear_interrupt();
  }
  RunConfig config() const { return parse_run_config(small_config(dir_), dir_); }
  fs::path dir_;
};

TEST(RunConfigTest, RejectsUnknownKeysAndStrategies) {
  json j = small_config("/tmp/x");
  j["bogus"] = 1;
  EXPECT_THROW(parse_run_config(j, "/tmp"), Error);
  j = small_config("/tmp/x");
  j["strategies"] = {"baseline", "mixup"};
  EXPECT_THROW(parse_run_config(j, "/tmp"), Error);
  EXPECT_TRUE(is_known_strategy("alp"));
  EXPECT_FALSE(is_known_strategy("mixup"));
}

TEST(RunConfigTest, HashIsStable) {
  const RunConfig a = parse_run_config(small_config("/tmp/x"), "/tmp");
  const RunConfig b = parse_run_config(small_config("/tmp/x"), "/tmp");
  EXPECT_EQ(a.hash(), b.hash());
  json j = small_config("/tmp/x");
  j["seed"] = 4;
  EXPECT_NE(parse_run_config(j, "/tmp").hash(), a.hash());
}

TEST(ImbalanceReportTest, FlagsAndInfinity) {
  const Corpus c = generate_benchmark_corpus(default_benchmark_spec());
  EXPECT_EQ(flagged_categories(c, 10.0), (std::vector<int>{5, 6, 7, 8, 9}));
  Corpus balanced;
  balanced.schema = CategorySchema::for_ids({1, 2});
  for (int i = 0; i < 10; ++i) {
    balanced.responses.push_back({"r" + std::to_string(i), "x",
                                  {{1, i % 2}, {2, 0}}, Origin::kHuman, {}, {}});
  }
  EXPECT_EQ(flagged_categories(balanced, 10.0), (std::vector<int>{2}));
  const auto rows = sorted_profiles(balanced);
  EXPECT_EQ(rows.front().category_id, 2);
  EXPECT_NE(render_imbalance_text(rows, 10.0).find("inf"), std::string::npos);
  balanced.responses[0].labels[2] = 1;
  EXPECT_TRUE(flagged_categories(balanced, 10.0).empty());
}

TEST_F(PipelineTest, FullRunWritesManifestedArtifacts) {
  Pipeline p(config());
  const EvaluationOutput ev = p.run_all();
  p.finish("complete");
  EXPECT_EQ(ev.reports.size(), 5u);
  EXPECT_TRUE(ev.comparison.incomplete.empty());
  const Manifest m = load_manifest(dir_ / "manifest.json");
  EXPECT_EQ(m.status, "complete");
  for (const auto& st : m.stages) {
    for (const auto& [rel, hash] : st.outputs) {
      EXPECT_EQ(sha256_file(dir_ / rel), hash) << rel;
    }
  }
  for (const char* rel : {"analyze/imbalance.csv", "split/test.jsonl",
                          "augment/ease/audit.jsonl", "augment/alp/train.jsonl",
                          "augment/llm/audit.jsonl", "evaluate/metrics.jsonl",
                          "report/comparison.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / rel)) << rel;
  }
}

TEST_F(PipelineTest, RerunSkipsStagesAndKeepsDigest) {
  std::string first;
  {
    Pipeline p(config());
    p.run_all();
    p.finish("complete");
    first = p.manifest().digest();
  }
  Pipeline again(config());
  again.run_all();
  again.finish("complete");
  EXPECT_EQ(again.manifest().digest(), first);
  const StageRecord* split = again.manifest().find("split");
  ASSERT_TRUE(split);
  EXPECT_EQ(split->status, "skipped");
}

TEST_F(PipelineTest, InterruptMarksRemainingStagesIncomplete) {
  PipelineOptions opts;
  opts.after_stage = [](const std::string& stage) {
    if (stage == "augment:smote") request_interrupt();
  };
  Pipeline p(config(), opts);
  EXPECT_THROW(p.run_all(), Interrupted);
  p.finish("incomplete", "interrupted");
  const Manifest m = load_manifest(dir_ / "manifest.json");
  EXPECT_EQ(m.status, "incomplete");
  EXPECT_NE(std::find(m.incomplete_stages.begin(), m.incomplete_stages.end(),
                      "evaluate"),
            m.incomplete_stages.end());
  EXPECT_NE(m.find("augment:smote"), nullptr);
  EXPECT_EQ(m.find("evaluate"), nullptr);
}

TEST_F(PipelineTest, TamperedTestSplitIsRejected) {
  {
    Pipeline p(config());
    p.analyze();
    p.prepare();
    p.finish("complete");
  }
  {
    std::ofstream out(dir_ / "split/test.jsonl", std::ios::app);
    out << "\n";
  }
  Pipeline p(config());
  try {
    p.evaluate({"baseline"});
    FAIL() << "expected a hash mismatch";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("manifest hash"), std::string::npos)
        << e.what();
  }
}

TEST_F(PipelineTest, BaselineOnlyReportHasOneColumn) {
  Pipeline p(config());
  p.analyze();
  p.prepare();
  const EvaluationOutput ev = p.evaluate({"baseline"});
  ASSERT_EQ(ev.reports.size(), 1u);
  EXPECT_EQ(ev.comparison.text.find("smote"), std::string::npos);
  EXPECT_THROW(p.evaluate({"mixup"}), Error);
}

TEST_F(PipelineTest, DryRunRecordsPromptsOnly) {
  json j = small_config(dir_);
  j["llm"]["mode"] = "dry_run";
  Pipeline p(parse_run_config(j, dir_));
  p.analyze();
  p.prepare();
  p.augment("llm");
  std::ifstream in(dir_ / "augment/llm/audit.jsonl");
  std::string line;
  size_t n = 0;
  while (std::getline(in, line)) {
    const json rec = json::parse(line);
    EXPECT_TRUE(rec.at("dry_run").get<bool>());
    EXPECT_FALSE(rec.at("prompt").get<std::string>().empty());
    ++n;
  }
  EXPECT_GT(n, 0u);
}

}  // namespace
}  // namespace augforge
