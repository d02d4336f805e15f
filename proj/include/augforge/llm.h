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

#ifndef AUGFORGE_LLM_H_
#define AUGFORGE_LLM_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "augforge/corpus.h"

namespace augforge {

struct AugmentationPlan {
  int category_id = 0;
  size_t n_majority = 0;
  size_t n_minority = 0;
  size_t target_minority = 0;
  size_t n_to_generate = 0;
  double resulting_ratio = 0.0;
  double ratio_threshold = 10.0;

  // resulting_ratio to two decimals.
  std::string display_ratio() const;
};

// Explicit-target planner.
AugmentationPlan plan_generation(size_t n_majority, size_t n_minority,
                                 size_t target_minority, int category_id = 0);

// Smallest minority count m with n_majority / m <= ratio_threshold.
size_t target_for_threshold(size_t n_majority, double ratio_threshold);

struct PromptSpec {
  std::string item_stem;
  std::vector<std::string> exemplars;
  int n_requested = 5;
  std::string template_id = "revise-v1";
};

// Checks exemplars are present and non-empty and n_requested >= 1.
PromptSpec make_prompt_spec(std::string item_stem,
                            std::vector<std::string> exemplars,
                            int n_requested = 5);

// Deterministic prompt text for the spec.
std::string build_prompt(const PromptSpec& spec);

// "one" .. "ten", digits beyond.
std::string number_word(int n);

struct LlmClientConfig {
  std::string endpoint = "http://127.0.0.1:8089/v1/chat/completions";
  std::string model = "gpt-4";
  std::string api_key_env = "AUGFORGE_LLM_KEY";
  double temperature = 0.7;
  int max_retries = 3;
  double timeout_seconds = 30.0;
  double requests_per_minute = 60.0;
  double backoff_initial_seconds = 1.0;
};

void validate(const LlmClientConfig& config);

// Raised for 401/403 responses or a missing key; never retried.
class LlmAuthError : public Error {
 public:
  using Error::Error;
};

// Spaces requests at least 60 / requests_per_minute seconds apart. Shared by
// every backend that holds it; safe across threads.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_minute);
  void acquire();

 private:
  std::mutex mu_;
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_;
};

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  // Raw completion text for one prompt.
  virtual std::string complete(const PromptSpec& spec,
                               const std::string& prompt) = 0;
};

// Chat-completions client over HTTP(S).
class HttpChatBackend : public CompletionBackend {
 public:
  HttpChatBackend(LlmClientConfig config, std::shared_ptr<RateLimiter> limiter);
  std::string complete(const PromptSpec& spec,
                       const std::string& prompt) override;
  // Attempts used by the last complete() call.
  int last_attempts() const { return last_attempts_; }

 private:
  LlmClientConfig config_;
  std::shared_ptr<RateLimiter> limiter_;
  int last_attempts_ = 0;
};

// Offline stand-in: recombines exemplar sentences into a numbered list of
// n_requested answers. Deterministic for a seed and call sequence.
class StubBackend : public CompletionBackend {
 public:
  explicit StubBackend(uint64_t seed) : seed_(seed) {}
  std::string complete(const PromptSpec& spec,
                       const std::string& prompt) override;

 private:
  uint64_t seed_;
  uint64_t calls_ = 0;
};

struct ParsedAnswers {
  std::vector<std::string> texts;
  bool parse_failed = false;
};

// Splits a completion on `1.`, `1)`, `-` or `*` list markers; continuation
// lines join the current item. Without markers the trimmed raw text comes back
// as a single item with parse_failed set.
ParsedAnswers parse_answers(const std::string& completion);

struct GenerationResult {
  std::string raw;
  ParsedAnswers parsed;
};

GenerationResult request_generations(const PromptSpec& spec,
                                     CompletionBackend& backend);

struct IngestDecision {
  std::string text;
  bool accepted = false;
  std::string reason;  // empty, "empty", "too_short", "duplicate", "cap"
  std::string id;
};

struct IngestResult {
  Corpus corpus;
  size_t added = 0;
  std::vector<IngestDecision> decisions;
  std::vector<std::string> warnings;
};

// Accepts texts with >= min_tokens tokens that are not byte-equal to a corpus
// text, an exemplar or an earlier acceptance. Responses already in `train`
// with origin llm for this category count against the plan; ingestion stops
// at plan.n_to_generate.
IngestResult validate_and_ingest(const std::vector<std::string>& texts,
                                 const Corpus& train, int category_id,
                                 const AugmentationPlan& plan,
                                 const std::vector<LabeledResponse>& exemplars,
                                 size_t min_tokens = 10,
                                 bool warn_shortfall = true);

enum class LlmMode { kStub, kLive, kDryRun };

LlmMode llm_mode_from_string(const std::string& s);

struct LlmRunParams {
  std::string item_stem;
  int exemplars_per_prompt = 2;
  int answers_per_call = 5;
  // Calls allowed per category before giving up on the plan.
  int max_calls = 200;
  size_t min_tokens = 10;
  uint64_t seed = 0;
};

struct LlmCallRecord {
  int category_id = 0;
  std::string prompt_hash;
  std::string prompt;
  std::vector<std::string> exemplar_ids;
  std::string raw;
  std::vector<std::string> parsed;
  bool parse_failed = false;
  bool dry_run = false;
  std::vector<IngestDecision> decisions;
};

struct LlmResult {
  Corpus corpus;
  AugmentationPlan plan;
  size_t added = 0;
  std::vector<LlmCallRecord> calls;
  std::vector<std::string> warnings;
};

// Runs the plan for one category against `backend`. With `dry_run` no backend
// call is made; the prompts that would be sent are recorded instead.
LlmResult llm_augment(const Corpus& train, const AugmentationPlan& plan,
                      CompletionBackend* backend, const LlmRunParams& params,
                      bool dry_run);

std::string llm_audit_to_jsonl(const std::vector<LlmCallRecord>& calls);

}  // namespace augforge

#endif  // AUGFORGE_LLM_H_
