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

#ifndef AUGFORGE_PIPELINE_H_
#define AUGFORGE_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "augforge/alp/augment.h"
#include "augforge/classifier.h"
#include "augforge/corpus.h"
#include "augforge/ease.h"
#include "augforge/eval.h"
#include "augforge/features.h"
#include "augforge/llm.h"
#include "augforge/smote.h"
#include "json.hpp"

namespace augforge {

inline constexpr const char* kToolVersion = "0.1.0";

struct EaseConfig {
  SiftParams sift;
  double target_ratio = 1.15;
  size_t min_clause_tokens = 2;
  // Labeler used by the acquire stage.
  LogRegParams labeler;
};

struct AlpConfig {
  std::filesystem::path treebank;
  std::filesystem::path lexicon;
  std::filesystem::path antonyms;  // optional audit list
  alp::AlpParams params;
  // Explicit per-category sample counts; other categories use target_ratio.
  std::map<int, size_t> n_target;
  double target_ratio = 3.0;
};

struct LlmConfig {
  LlmMode mode = LlmMode::kStub;
  LlmClientConfig client;
  // "explicit" uses `targets` where given and the threshold rule elsewhere;
  // "threshold" always uses the threshold rule.
  std::string planner = "explicit";
  std::map<int, size_t> targets;
  double ratio_threshold = 10.0;
  LlmRunParams run;
};

struct RunConfig {
  std::filesystem::path dataset;
  DatasetFormat format = DatasetFormat::kCsv;
  // Used when `dataset` is empty or missing: the corpus is generated.
  std::optional<BenchmarkSpec> benchmark;
  SplitSpec split;
  uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
  VocabularyParams features;
  LogRegParams classifier;
  std::vector<std::string> strategies = {"baseline"};
  // Categories to augment. Empty means every category whose train-split
  // ratio exceeds ratio_threshold.
  std::vector<int> augment_categories;
  double ratio_threshold = 10.0;
  SmoteParams smote;
  EaseConfig ease;
  AlpConfig alp;
  LlmConfig llm;
  Averaging averaging = Averaging::kMacro;

  // Normalized JSON form; the config hash is taken over its dump.
  nlohmann::json to_json() const;
  std::string hash() const;
};

// Relative paths resolve against `base_dir`.
RunConfig parse_run_config(const nlohmann::json& j,
                           const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
bool is_known_strategy(const std::string& name);

// {"default": true} or an explicit spec with "categories".
BenchmarkSpec benchmark_spec_from_json(const nlohmann::json& j);
nlohmann::json benchmark_spec_to_json(const BenchmarkSpec& spec);

// Profiles sorted by ratio, descending; ties keep category order.
std::vector<ImbalanceProfile> sorted_profiles(const Corpus& corpus);
std::string render_imbalance_text(const std::vector<ImbalanceProfile>& rows,
                                  double threshold);
std::string render_imbalance_csv(const std::vector<ImbalanceProfile>& rows,
                                 double threshold);
std::vector<int> flagged_categories(const Corpus& corpus, double threshold);

struct StageRecord {
  std::string name;
  std::string status;  // done, skipped
  std::string params_hash;
  std::map<std::string, std::string> inputs;   // relative path -> sha256
  std::map<std::string, std::string> outputs;  // relative path -> sha256
  std::string started_at;
  std::string finished_at;
};

struct Manifest {
  std::string tool_version = kToolVersion;
  std::string config_hash;
  uint64_t seed = 0;
  std::string status;  // running, complete, incomplete, failed
  std::string started_at;
  std::string finished_at;
  std::vector<StageRecord> stages;
  std::vector<std::string> incomplete_stages;
  std::vector<std::string> warnings;
  std::string error;

  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& j);
  const StageRecord* find(const std::string& name) const;
  // Hash over the config hash and every stage's input and output hashes;
  // timestamps and statuses are left out.
  std::string digest() const;
};

Manifest load_manifest(const std::filesystem::path& path);

// Set from a signal handler; checked between stages and categories.
void request_interrupt();
bool interrupt_requested();
void clear_interrupt();

class Interrupted : public Error {
 public:
  using Error::Error;
};

struct PipelineOptions {
  // Called after each stage finishes (tests use it to simulate an interrupt).
  std::function<void(const std::string& stage)> after_stage;
  // Overrides the llm backend (tests).
  CompletionBackend* llm_backend = nullptr;
};

struct EvaluationOutput {
  std::vector<MetricsReport> reports;
  ComparisonReport comparison;
};

class Pipeline {
 public:
  Pipeline(RunConfig config, PipelineOptions options = {});

  const RunConfig& config() const { return config_; }
  const Manifest& manifest() const { return manifest_; }

  // Imbalance table over the whole dataset.
  std::vector<ImbalanceProfile> analyze();
  // Split and vocabulary; skipped when inputs are unchanged.
  void prepare();
  void augment(const std::string& strategy);
  EvaluationOutput evaluate(const std::vector<std::string>& strategies);
  // analyze, prepare, augment every configured strategy, evaluate.
  EvaluationOutput run_all();

  // Marks the manifest complete, or incomplete after an interrupt, and
  // writes it.
  void finish(const std::string& status, const std::string& error = "");

  std::vector<int> augment_categories();
  const Corpus& train();
  const Corpus& test();
  const Vocabulary& vocabulary();

 private:
  std::filesystem::path out(const std::string& rel) const;
  Corpus load_source();
  std::map<std::string, std::string> hash_files(
      const std::vector<std::string>& rels) const;
  bool can_skip(const std::string& name, const std::string& params_hash,
                const std::map<std::string, std::string>& inputs) const;
  void record(StageRecord rec);
  void write_manifest() const;
  void check_interrupt(const std::string& stage, bool stage_done = false);
  std::string write_text(const std::string& rel, const std::string& content);
  void load_split();

  void augment_smote(std::vector<std::string>& outputs);
  void augment_ease(std::vector<std::string>& outputs);
  void augment_alp(std::vector<std::string>& outputs);
  void augment_llm(std::vector<std::string>& outputs);
  MetricsReport evaluate_strategy(const std::string& strategy);

  RunConfig config_;
  PipelineOptions options_;
  Manifest manifest_;
  bool split_loaded_ = false;
  std::set<std::string> done_;  // stages finished or skipped in this run
  Corpus train_;
  Corpus test_;
  Vocabulary vocab_;
};

}  // namespace augforge

#endif  // AUGFORGE_PIPELINE_H_
