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

#include "augforge/llm.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "augforge/features.h"
#include "augforge/hash.h"
#include "httplib.h"
#include "json.hpp"

namespace augforge {
namespace {

std::vector<std::string> split_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '.' || c == '!' || c == '?') {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

std::string capitalize(std::string s) {
  if (!s.empty()) {
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  }
  return s;
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

std::string AugmentationPlan::display_ratio() const {
  return format_fixed(resulting_ratio, 2);
}

AugmentationPlan plan_generation(size_t n_majority, size_t n_minority,
                                 size_t target_minority, int category_id) {
  if (target_minority < n_minority) {
    throw Error("plan: target " + std::to_string(target_minority) +
                " is below the current minority count " +
                std::to_string(n_minority));
  }
  if (target_minority == 0) throw Error("plan: target must be positive");
  AugmentationPlan p;
  p.category_id = category_id;
  p.n_majority = n_majority;
  p.n_minority = n_minority;
  p.target_minority = target_minority;
  p.n_to_generate = target_minority - n_minority;
  p.resulting_ratio =
      static_cast<double>(n_majority) / static_cast<double>(target_minority);
  return p;
}

size_t target_for_threshold(size_t n_majority, double ratio_threshold) {
  if (!(ratio_threshold > 0.0)) throw Error("ratio threshold must be > 0");
  auto m = static_cast<size_t>(
      std::ceil(static_cast<double>(n_majority) / ratio_threshold));
  // Guard the floating-point ceil in both directions.
  while (m > 1 && static_cast<double>(n_majority) /
                          static_cast<double>(m - 1) <=
                      ratio_threshold) {
    --m;
  }
  while (m == 0 ||
         static_cast<double>(n_majority) / static_cast<double>(m) >
             ratio_threshold) {
    ++m;
  }
  return m;
}

PromptSpec make_prompt_spec(std::string item_stem,
                            std::vector<std::string> exemplars,
                            int n_requested) {
  if (exemplars.empty()) throw Error("prompt: at least one exemplar required");
  for (const auto& e : exemplars) {
    if (trim(e).empty()) throw Error("prompt: exemplar text is empty");
  }
  if (n_requested < 1) throw Error("prompt: n_requested must be >= 1");
  PromptSpec spec;
  spec.item_stem = std::move(item_stem);
  spec.exemplars = std::move(exemplars);
  spec.n_requested = n_requested;
  return spec;
}

std::string number_word(int n) {
  static const char* kWords[] = {"zero", "one", "two", "three", "four", "five",
                                 "six",  "seven", "eight", "nine", "ten"};
  if (n >= 0 && n <= 10) return kWords[n];
  return std::to_string(n);
}

std::string build_prompt(const PromptSpec& spec) {
  if (spec.exemplars.empty()) throw Error("prompt: no exemplars");
  std::ostringstream out;
  out << "Read the student answers below and work out the scientific idea "
         "they share. Then rewrite that idea as new answers in your own "
         "words.\n\n";
  out << "Answer as a middle-school student would";
  if (!spec.item_stem.empty()) out << " to this question: " << spec.item_stem;
  out << "\n\n";
  for (size_t i = 0; i < spec.exemplars.size(); ++i) {
    out << "Student " << (i + 1) << ": " << spec.exemplars[i] << "\n";
  }
  out << "\n";
  if (spec.n_requested == 1) {
    out << "Please generate one new answer on a line starting with \"1.\".\n";
  } else {
    out << "Please generate " << number_word(spec.n_requested)
        << " new answers, one per line, numbered 1. to " << spec.n_requested
        << ".\n";
  }
  return out.str();
}

void validate(const LlmClientConfig& c) {
  if (c.endpoint.find("://") == std::string::npos) {
    throw Error("llm: endpoint must be an http(s) URL");
  }
  if (c.api_key_env.empty()) throw Error("llm: api_key_env is empty");
  if (c.max_retries < 0) throw Error("llm: max_retries must be >= 0");
  if (!(c.timeout_seconds > 0)) throw Error("llm: timeout must be positive");
  if (c.requests_per_minute < 0) throw Error("llm: rate cap must be >= 0");
}

RateLimiter::RateLimiter(double requests_per_minute)
    : interval_(requests_per_minute > 0
                    ? std::chrono::duration_cast<
                          std::chrono::steady_clock::duration>(
                          std::chrono::duration<double>(60.0 /
                                                        requests_per_minute))
                    : std::chrono::steady_clock::duration::zero()),
      next_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

HttpChatBackend::HttpChatBackend(LlmClientConfig config,
                                 std::shared_ptr<RateLimiter> limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {
  validate(config_);
  if (!limiter_) {
    limiter_ = std::make_shared<RateLimiter>(config_.requests_per_minute);
  }
}

std::string HttpChatBackend::complete(const PromptSpec&,
                                      const std::string& prompt) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (!key || !*key) {
    throw LlmAuthError("llm: environment variable " + config_.api_key_env +
                       " is not set");
  }
  const size_t scheme = config_.endpoint.find("://");
  const size_t slash = config_.endpoint.find('/', scheme + 3);
  const std::string base = config_.endpoint.substr(0, slash);
  const std::string path =
      slash == std::string::npos ? "/" : config_.endpoint.substr(slash);

  httplib::Client client(base);
  const auto secs = static_cast<time_t>(config_.timeout_seconds);
  const auto usecs = static_cast<time_t>(
      (config_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  client.set_bearer_token_auth(key);

  const nlohmann::json body = {
      {"model", config_.model},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
      {"temperature", config_.temperature}};
  const std::string payload = body.dump();

  std::string last_error;
  last_attempts_ = 0;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::duration<double>(
          config_.backoff_initial_seconds * std::pow(2.0, attempt - 1)));
    }
    limiter_->acquire();
    ++last_attempts_;
    auto res = client.Post(path, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw LlmAuthError("llm: authentication failed (HTTP " +
                         std::to_string(res->status) + ")");
    }
    if (retryable(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error("llm: request rejected (HTTP " +
                  std::to_string(res->status) + "): " + res->body);
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      // Unexpected wire shape: hand the body on and let parsing flag it.
      return res->body;
    }
  }
  throw Error("llm: request failed after " + std::to_string(last_attempts_) +
              " attempts: " + last_error);
}

std::string StubBackend::complete(const PromptSpec& spec, const std::string&) {
  Rng rng(derive_seed(seed_, "llm.stub", calls_++));
  std::vector<std::string> pool;
  for (const auto& e : spec.exemplars) {
    for (auto& s : split_sentences(e)) pool.push_back(std::move(s));
  }
  if (pool.empty()) return "";
  std::ostringstream out;
  for (int k = 1; k <= spec.n_requested; ++k) {
    std::vector<std::string> picked;
    size_t tokens = 0;
    const size_t want = 2 + rng.below(2);
    while (picked.size() < want || tokens < 10) {
      std::string s = pool[rng.below(pool.size())];
      tokens += tokenize(s).size();
      picked.push_back(std::move(s));
      if (picked.size() > 8) break;
    }
    std::string answer;
    for (const auto& s : picked) {
      if (!answer.empty()) answer += ". ";
      answer += capitalize(s);
    }
    out << k << ". " << answer << ".\n";
  }
  return out.str();
}

ParsedAnswers parse_answers(const std::string& completion) {
  static const std::regex kMarker(R"(^\s*(?:\d+[.)]|[-*])\s+(.*)$)");
  ParsedAnswers out;
  std::istringstream in(completion);
  std::string line;
  bool any_marker = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (std::regex_match(line, m, kMarker)) {
      any_marker = true;
      out.texts.push_back(trim(m[1].str()));
    } else if (any_marker && !trim(line).empty()) {
      out.texts.back() += " " + trim(line);
    }
  }
  if (!any_marker) {
    out.texts.clear();
    if (!trim(completion).empty()) out.texts.push_back(trim(completion));
    out.parse_failed = true;
  }
  return out;
}

GenerationResult request_generations(const PromptSpec& spec,
                                     CompletionBackend& backend) {
  GenerationResult r;
  r.raw = backend.complete(spec, build_prompt(spec));
  r.parsed = parse_answers(r.raw);
  return r;
}

IngestResult validate_and_ingest(const std::vector<std::string>& texts,
                                 const Corpus& train, int category_id,
                                 const AugmentationPlan& plan,
                                 const std::vector<LabeledResponse>& exemplars,
                                 size_t min_tokens, bool warn_shortfall) {
  IngestResult out;
  out.corpus = train;
  const ImbalanceProfile prof = profile(train, category_id);
  size_t existing = 0;
  std::unordered_set<std::string> seen;
  for (const auto& r : train.responses) {
    seen.insert(r.text);
    if (r.origin == Origin::kLlm && r.target_category == category_id) {
      ++existing;
    }
  }
  for (const auto& e : exemplars) seen.insert(e.text);
  const size_t remaining =
      plan.n_to_generate > existing ? plan.n_to_generate - existing : 0;
  std::vector<std::string> parents;
  for (const auto& e : exemplars) parents.push_back(e.id);
  const std::vector<int> ids = train.schema.ids();

  for (const auto& raw : texts) {
    IngestDecision d;
    d.text = raw;
    const std::string t = trim(raw);
    if (out.added >= remaining) {
      d.reason = "cap";
    } else if (t.empty()) {
      d.reason = "empty";
    } else if (seen.count(raw) || seen.count(t)) {
      d.reason = "duplicate";
    } else if (tokenize(t).size() < min_tokens) {
      d.reason = "too_short";
    } else {
      d.accepted = true;
      seen.insert(t);
      ++out.added;
      d.id = "llm-c" + std::to_string(category_id) + "-" +
             std::to_string(existing + out.added);
      LabeledResponse r;
      r.id = d.id;
      r.text = t;
      for (int id : ids) r.labels[id] = 0;
      r.labels[category_id] = prof.minority_label;
      r.origin = Origin::kLlm;
      r.parent_ids = parents;
      r.target_category = category_id;
      out.corpus.responses.push_back(std::move(r));
    }
    out.decisions.push_back(std::move(d));
  }
  if (warn_shortfall && out.added < remaining) {
    out.warnings.push_back("llm: category " + std::to_string(category_id) +
                           ": ingested " + std::to_string(existing + out.added) +
                           " of " + std::to_string(plan.n_to_generate) +
                           " planned responses");
    log_warning(out.warnings.back());
  }
  return out;
}

LlmMode llm_mode_from_string(const std::string& s) {
  if (s == "stub") return LlmMode::kStub;
  if (s == "live") return LlmMode::kLive;
  if (s == "dry_run" || s == "dry-run") return LlmMode::kDryRun;
  throw Error("unknown llm mode '" + s + "' (expected stub, live, dry_run)");
}

LlmResult llm_augment(const Corpus& train, const AugmentationPlan& plan,
                      CompletionBackend* backend, const LlmRunParams& params,
                      bool dry_run) {
  if (params.exemplars_per_prompt < 1 || params.answers_per_call < 1) {
    throw Error("llm: exemplars_per_prompt and answers_per_call must be >= 1");
  }
  if (!dry_run && !backend) throw Error("llm: no backend configured");
  const int cat = plan.category_id;
  LlmResult result;
  result.corpus = train;
  result.plan = plan;
  if (plan.n_to_generate == 0) return result;

  const ImbalanceProfile prof = profile(train, cat);
  std::vector<const LabeledResponse*> pool;
  for (const auto& r : train.responses) {
    if (r.origin == Origin::kHuman && r.labels.at(cat) == prof.minority_label) {
      pool.push_back(&r);
    }
  }
  if (pool.empty()) {
    throw Error("llm: category " + std::to_string(cat) +
                " has no minority exemplars");
  }
  Rng rng(derive_seed(params.seed, "llm", static_cast<uint64_t>(cat)));
  const size_t calls_needed =
      (plan.n_to_generate + static_cast<size_t>(params.answers_per_call) - 1) /
      static_cast<size_t>(params.answers_per_call);

  for (int call = 0; call < params.max_calls; ++call) {
    if (dry_run && static_cast<size_t>(call) >= calls_needed) break;
    if (!dry_run && result.added >= plan.n_to_generate) break;
    std::vector<LabeledResponse> exemplars;
    std::vector<size_t> order(pool.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);
    const size_t k = std::min(pool.size(),
                              static_cast<size_t>(params.exemplars_per_prompt));
    for (size_t i = 0; i < k; ++i) exemplars.push_back(*pool[order[i]]);
    std::vector<std::string> texts;
    for (const auto& e : exemplars) texts.push_back(e.text);
    const PromptSpec spec =
        make_prompt_spec(params.item_stem, texts, params.answers_per_call);

    LlmCallRecord rec;
    rec.category_id = cat;
    rec.prompt = build_prompt(spec);
    rec.prompt_hash = sha256_hex(rec.prompt);
    for (const auto& e : exemplars) rec.exemplar_ids.push_back(e.id);
    rec.dry_run = dry_run;
    if (!dry_run) {
      rec.raw = backend->complete(spec, rec.prompt);
      const ParsedAnswers parsed = parse_answers(rec.raw);
      rec.parsed = parsed.texts;
      rec.parse_failed = parsed.parse_failed;
      if (!parsed.parse_failed) {
        IngestResult ing =
            validate_and_ingest(parsed.texts, result.corpus, cat, plan,
                                exemplars, params.min_tokens, false);
        result.added += ing.added;
        result.corpus = std::move(ing.corpus);
        rec.decisions = std::move(ing.decisions);
      }
    }
    result.calls.push_back(std::move(rec));
  }
  if (!dry_run && result.added < plan.n_to_generate) {
    result.warnings.push_back(
        "llm: category " + std::to_string(cat) + ": ingested " +
        std::to_string(result.added) + " of " +
        std::to_string(plan.n_to_generate) + " planned responses after " +
        std::to_string(result.calls.size()) + " calls");
    log_warning(result.warnings.back());
  }
  return result;
}

std::string llm_audit_to_jsonl(const std::vector<LlmCallRecord>& calls) {
  std::string out;
  for (const auto& c : calls) {
    nlohmann::json decisions = nlohmann::json::array();
    for (const auto& d : c.decisions) {
      decisions.push_back({{"text", d.text},
                           {"accepted", d.accepted},
                           {"reason", d.reason},
                           {"id", d.id}});
    }
    nlohmann::json obj = {{"category", c.category_id},
                          {"prompt_hash", c.prompt_hash},
                          {"exemplar_ids", c.exemplar_ids},
                          {"dry_run", c.dry_run},
                          {"raw", c.raw},
                          {"parsed", c.parsed},
                          {"parse_failed", c.parse_failed},
                          {"decisions", decisions}};
    if (c.dry_run) obj["prompt"] = c.prompt;
    out += obj.dump() + "\n";
  }
  return out;
}

}  // namespace augforge
