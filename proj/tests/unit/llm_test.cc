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

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace augforge {
namespace {

TEST(PlanTest, ReproducesPlannedCounts) {
  const AugmentationPlan c5 = plan_generation(1409, 57, 140, 5);
  EXPECT_EQ(c5.n_to_generate, 83u);
  EXPECT_EQ(c5.display_ratio(), "10.06");
  const AugmentationPlan c6 = plan_generation(1447, 19, 169, 6);
  EXPECT_EQ(c6.n_to_generate, 150u);
  EXPECT_NEAR(std::stod(c6.display_ratio()), 8.57, 0.01 + 1e-9);
  const AugmentationPlan c7 = plan_generation(1398, 68, 140, 7);
  EXPECT_EQ(c7.n_to_generate, 72u);
  EXPECT_NEAR(std::stod(c7.display_ratio()), 9.98, 0.01 + 1e-9);
  EXPECT_THROW(plan_generation(100, 50, 40), Error);
}

TEST(PlanTest, ThresholdTargets) {
  EXPECT_EQ(target_for_threshold(1409, 10.0), 141u);
  EXPECT_EQ(target_for_threshold(100, 100.0), 1u);
  EXPECT_EQ(target_for_threshold(100, 1.0), 100u);
  EXPECT_EQ(target_for_threshold(1447, 10.0), 145u);
}

TEST(PromptTest, ContainsExemplarsAndCount) {
  const PromptSpec s = make_prompt_spec(
      "Explain what happens.", {"The carts move apart.", "Like charges repel."});
  const std::string p = build_prompt(s);
  EXPECT_NE(p.find("The carts move apart."), std::string::npos);
  EXPECT_NE(p.find("Like charges repel."), std::string::npos);
  EXPECT_NE(p.find("generate five"), std::string::npos);
  EXPECT_EQ(p, build_prompt(s));
  const std::string one =
      build_prompt(make_prompt_spec("Q", {"a b", "c d"}, 1));
  EXPECT_NE(one.find("generate one new answer"), std::string::npos);
  EXPECT_THROW(make_prompt_spec("Q", {"a", " "}), Error);
  EXPECT_THROW(make_prompt_spec("Q", {}), Error);
}

TEST(ParseAnswersTest, MarkersAndProse) {
  const auto a = parse_answers("1. first one\n2) second\n  continues\n- third\n");
  EXPECT_EQ(a.texts, (std::vector<std::string>{"first one",
                                                "second continues", "third"}));
  EXPECT_FALSE(a.parse_failed);
  const auto prose = parse_answers("Here is some prose without a list.");
  EXPECT_TRUE(prose.parse_failed);
  EXPECT_EQ(prose.texts.size(), 1u);
}

Corpus minority_corpus() {
  Corpus c;
  c.schema = CategorySchema::for_ids({5});
  for (int i = 0; i < 57; ++i) {
    c.responses.push_back({"p" + std::to_string(i),
                           "positive response number " + std::to_string(i),
                           {{5, 1}}, Origin::kHuman, {}, {}});
  }
  for (int i = 0; i < 1409; ++i) {
    c.responses.push_back({"n" + std::to_string(i), "negative",
                           {{5, 0}}, Origin::kHuman, {}, {}});
  }
  return c;
}

std::vector<std::string> valid_texts(size_t n) {
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) {
    out.push_back("the carts move apart because like charges repel variant " +
                  std::to_string(i));
  }
  return out;
}

TEST(IngestTest, ReachesPlanAndCaps) {
  const Corpus c = minority_corpus();
  const AugmentationPlan plan = plan_generation(1409, 57, 140, 5);
  const std::vector<LabeledResponse> ex = {c.responses[0], c.responses[1]};
  const IngestResult r = validate_and_ingest(valid_texts(83), c, 5, plan, ex);
  EXPECT_EQ(r.added, 83u);
  EXPECT_EQ(profile(r.corpus, 5).n_minority, 140u);
  const IngestResult capped =
      validate_and_ingest(valid_texts(90), c, 5, plan, ex);
  EXPECT_EQ(capped.added, 83u);
  size_t caps = 0;
  for (const auto& d : capped.decisions) caps += d.reason == "cap";
  EXPECT_EQ(caps, 7u);
}

TEST(IngestTest, RejectionReasons) {
  const Corpus c = minority_corpus();
  const AugmentationPlan plan = plan_generation(1409, 57, 140, 5);
  const LabeledResponse ex{"N1047",
                           "the carts move apart since the charges are alike "
                           "and push on each other",
                           {{5, 1}}, Origin::kHuman, {}, {}};
  const IngestResult r = validate_and_ingest(
      {ex.text, "", "too short", valid_texts(1)[0], valid_texts(1)[0]}, c, 5,
      plan, {ex});
  ASSERT_EQ(r.decisions.size(), 5u);
  EXPECT_EQ(r.decisions[0].reason, "duplicate");
  EXPECT_EQ(r.decisions[1].reason, "empty");
  EXPECT_EQ(r.decisions[2].reason, "too_short");
  EXPECT_TRUE(r.decisions[3].accepted);
  EXPECT_EQ(r.decisions[4].reason, "duplicate");
  const auto& s = r.corpus.responses.back();
  EXPECT_EQ(s.origin, Origin::kLlm);
  EXPECT_EQ(s.parent_ids, (std::vector<std::string>{"N1047"}));
}

TEST(StubBackendTest, DeterministicNumberedList) {
  const PromptSpec s = make_prompt_spec(
      "Q", {"The carts move apart quickly. Like charges repel each other.",
            "The charges push the carts. They stop after a while."});
  StubBackend a(3), b(3);
  const std::string out = a.complete(s, build_prompt(s));
  EXPECT_EQ(out, b.complete(s, build_prompt(s)));
  const auto parsed = parse_answers(out);
  EXPECT_FALSE(parsed.parse_failed);
  EXPECT_EQ(parsed.texts.size(), 5u);
}

// Local chat-completions stand-in. The handler decides each response.
class FakeServer {
 public:
  explicit FakeServer(
      std::function<void(const httplib::Request&, httplib::Response&)> h) {
    server_.Post("/v1/chat/completions", h);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string chat_body(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"content", content}}}}}}}
      .dump();
}

LlmClientConfig test_config(const std::string& endpoint) {
  LlmClientConfig c;
  c.endpoint = endpoint;
  c.api_key_env = "AUGFORGE_TEST_LLM_KEY";
  c.backoff_initial_seconds = 0.01;
  c.requests_per_minute = 60000;
  c.timeout_seconds = 5;
  return c;
}

class HttpBackendTest : public ::testing::Test {
 protected:
  void SetUp() override { setenv("AUGFORGE_TEST_LLM_KEY", "test-key", 1); }
  void TearDown() override { unsetenv("AUGFORGE_TEST_LLM_KEY"); }
  PromptSpec spec_ = make_prompt_spec("Q", {"a b c", "d e f"});
};

TEST_F(HttpBackendTest, FiveNumberedAnswers) {
  std::string auth;
  FakeServer srv([&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    res.set_content(chat_body("1. a\n2. b\n3. c\n4. d\n5. e"),
                    "application/json");
  });
  HttpChatBackend b(test_config(srv.endpoint()),
                    std::make_shared<RateLimiter>(60000));
  const auto r = request_generations(spec_, b);
  EXPECT_EQ(r.parsed.texts.size(), 5u);
  EXPECT_EQ(auth, "Bearer test-key");
}

TEST_F(HttpBackendTest, RetriesAfter429) {
  std::atomic<int> calls{0};
  FakeServer srv([&](const httplib::Request&, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 429;
      return;
    }
    res.set_content(chat_body("1. ok"), "application/json");
  });
  HttpChatBackend b(test_config(srv.endpoint()),
                    std::make_shared<RateLimiter>(60000));
  EXPECT_EQ(b.complete(spec_, "p"), "1. ok");
  EXPECT_EQ(b.last_attempts(), 2);
}

TEST_F(HttpBackendTest, AuthFailureIsNotRetried) {
  std::atomic<int> calls{0};
  FakeServer srv([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 401;
  });
  HttpChatBackend b(test_config(srv.endpoint()),
                    std::make_shared<RateLimiter>(60000));
  EXPECT_THROW(b.complete(spec_, "p"), LlmAuthError);
  EXPECT_EQ(calls.load(), 1);
}

TEST_F(HttpBackendTest, MissingKeyFailsBeforeAnyRequest) {
  unsetenv("AUGFORGE_TEST_LLM_KEY");
  std::atomic<int> calls{0};
  FakeServer srv([&](const httplib::Request&, httplib::Response&) { ++calls; });
  HttpChatBackend b(test_config(srv.endpoint()),
                    std::make_shared<RateLimiter>(60000));
  EXPECT_THROW(b.complete(spec_, "p"), LlmAuthError);
  EXPECT_EQ(calls.load(), 0);
}

TEST_F(HttpBackendTest, ProseFlagsParseFailure) {
  FakeServer srv([&](const httplib::Request&, httplib::Response& res) {
    res.set_content(chat_body("Sure, here are some thoughts on carts."),
                    "application/json");
  });
  HttpChatBackend b(test_config(srv.endpoint()),
                    std::make_shared<RateLimiter>(60000));
  EXPECT_TRUE(request_generations(spec_, b).parsed.parse_failed);
}

TEST_F(HttpBackendTest, ServerErrorsExhaustRetries) {
  FakeServer srv([&](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
  });
  LlmClientConfig cfg = test_config(srv.endpoint());
  cfg.max_retries = 2;
  HttpChatBackend b(cfg, std::make_shared<RateLimiter>(60000));
  EXPECT_THROW(b.complete(spec_, "p"), Error);
  EXPECT_EQ(b.last_attempts(), 3);
}

TEST(LlmAugmentTest, DryRunMakesNoCalls) {
  const Corpus c = minority_corpus();
  const AugmentationPlan plan = plan_generation(1409, 57, 140, 5);
  LlmRunParams p;
  p.item_stem = "Explain.";
  const LlmResult r = llm_augment(c, plan, nullptr, p, true);
  EXPECT_EQ(r.added, 0u);
  EXPECT_EQ(r.calls.size(), 17u);
  for (const auto& call : r.calls) {
    EXPECT_TRUE(call.dry_run);
    EXPECT_FALSE(call.prompt.empty());
    EXPECT_EQ(call.exemplar_ids.size(), 2u);
  }
}

TEST(LlmAugmentTest, StubRunReachesPlan) {
  Corpus c = minority_corpus();
  for (size_t i = 0; i < 57; ++i) {
    c.responses[i].text = "The carts move apart quickly. Like charges repel "
                          "each other number " + std::to_string(i) +
                          ". They stop after a while.";
  }
  const AugmentationPlan plan = plan_generation(1409, 57, 140, 5);
  StubBackend stub(1);
  LlmRunParams p;
  p.item_stem = "Explain.";
  const LlmResult r = llm_augment(c, plan, &stub, p, false);
  EXPECT_EQ(r.added, 83u);
  EXPECT_EQ(profile(r.corpus, 5).n_minority, 140u);
}

TEST(RateLimiterTest, SpacesCalls) {
  RateLimiter lim(600);  // 100 ms apart
  const auto t0 = std::chrono::steady_clock::now();
  lim.acquire();
  lim.acquire();
  lim.acquire();
  EXPECT_GE(std::chrono::steady_clock::now() - t0, std::chrono::milliseconds(190));
}

}  // namespace
}  // namespace augforge
