// Copyright 2026 The cfq Authors
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
#include <httplib.h>

#include <atomic>
#include <json.hpp>
#include <thread>

#include "cfq/error.hpp"
#include "cfq/gateway.hpp"
#include "test_support.hpp"

namespace cfq {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

CompletionRequest sample_request(const std::string& body = "Say hi") {
  CompletionRequest r;
  r.prompt.body = body;
  return r;
}

/// Fails with a transient error `failures` times, then answers.
class ScriptedProvider : public CompletionProvider {
 public:
  ScriptedProvider(int failures, std::string reply, std::shared_ptr<std::atomic<int>> calls)
      : failures_(failures), reply_(std::move(reply)), calls_(std::move(calls)) {}
  std::string name() const override { return "scripted"; }
  std::string complete(const CompletionRequest&, const std::string&) override {
    const int n = (*calls_)++;
    if (n < failures_) throw TransientProviderError("HTTP 429");
    return reply_;
  }

 private:
  int failures_;
  std::string reply_;
  std::shared_ptr<std::atomic<int>> calls_;
};


GatewayOptions no_sleep(std::vector<std::chrono::milliseconds>& sleeps) {
  GatewayOptions o;
  o.sleep = [&sleeps](std::chrono::milliseconds d) { sleeps.push_back(d); };
  return o;
}

TEST(Fingerprint, PureFunctionOfRequestFields) {
  auto a = sample_request();
  auto b = sample_request();
  b.prompt.category = PromptCategory::SyntaxAnalysis;
  b.prompt.challenge_id = "x";
  EXPECT_EQ(fingerprint(a), fingerprint(b));
  EXPECT_EQ(fingerprint(a).size(), 64u);
  for (auto mutate : std::vector<std::function<void(CompletionRequest&)>>{
           [](auto& r) { r.prompt.body += " "; }, [](auto& r) { r.model = "gpt-4"; },
           [](auto& r) { r.temperature = 0.2; }, [](auto& r) { r.max_output = 10; }}) {
    auto c = sample_request();
    mutate(c);
    EXPECT_NE(fingerprint(c), fingerprint(a));
  }
}

TEST(Fingerprint, StableValue) {
  // Independent recomputation of the documented key layout.
  std::string key = "cfq-completion-v1";
  key += std::string(1, '\0') + "gpt-3.5-turbo" + std::string(1, '\0') + "0.7" + std::string(1, '\0') + "1024" +
         std::string(1, '\0') + "Say hi";
  EXPECT_EQ(fingerprint(sample_request()), sha256_hex(key));
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Validate, Bounds) {
  auto r = sample_request();
  r.temperature = 2.5;
  EXPECT_THROW(validate_request(r), Error);
  r.temperature = -0.1;
  EXPECT_THROW(validate_request(r), Error);
  r = sample_request();
  r.max_output = 0;
  EXPECT_THROW(validate_request(r), Error);
  r = sample_request();
  r.temperature = 2.0;
  EXPECT_NO_THROW(validate_request(r));
}

TEST(Replay, IdentityAfterRecord) {
  TempDir dir;
  const std::string text = "| LineNumber | LineCode | Question |\n|--|--|--|\n| 1 | x | y? |\n\nTrailing \xE2\x9C\x93 ";
  auto req = sample_request();
  const auto fp = record_fixture(req, text, dir.path());
  EXPECT_EQ(fp, fingerprint(req));
  EXPECT_TRUE(fs::exists(dir / (fp + ".json")));
  Gateway g(std::make_unique<ReplayProvider>(dir.path()));
  auto res = g.complete(req);
  EXPECT_EQ(res.text, text);
  EXPECT_FALSE(res.cached);
  EXPECT_EQ(res.attempts, 1);
  EXPECT_EQ(res.provider, "replay");
  EXPECT_EQ(res.request_fingerprint, fp);
}

TEST(Replay, FixtureMissing) {
  TempDir dir;
  Gateway g(std::make_unique<ReplayProvider>(dir.path()));
  try {
    g.complete(sample_request());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FixtureMissing);
    EXPECT_EQ(e.detail(), fingerprint(sample_request()));
  }
}

TEST(Replay, RecordTwiceOverwrites) {
  TempDir dir;
  record_fixture(sample_request(), "first", dir.path());
  record_fixture(sample_request(), "second", dir.path());
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++files;
  EXPECT_EQ(files, 1);
  EXPECT_EQ(read_fixture(dir.path(), fingerprint(sample_request())), "second");
}

TEST(Replay, FixtureFileCarriesMetadata) {
  TempDir dir;
  auto req = sample_request();
  req.prompt.category = PromptCategory::GoalOrientedAnalysis;
  req.prompt.challenge_id = "bingo-board";
  const auto fp = record_fixture(req, "r", dir.path());
  auto doc = nlohmann::json::parse(read_file(dir / (fp + ".json")));
  EXPECT_EQ(doc["fingerprint"], fp);
  EXPECT_EQ(doc["request"]["category"], "GoalOrientedAnalysis");
  EXPECT_EQ(doc["request"]["challenge_id"], "bingo-board");
  EXPECT_EQ(doc["request"]["prompt"], "Say hi");
  EXPECT_EQ(doc["response"], "r");
}

TEST(Cache, SecondCallIsCachedWithoutProviderCall) {
  auto calls = std::make_shared<std::atomic<int>>(0);
  std::vector<std::chrono::milliseconds> sleeps;
  Gateway g(std::make_unique<ScriptedProvider>(0, "hello", calls), no_sleep(sleeps));
  auto first = g.complete(sample_request());
  auto second = g.complete(sample_request());
  EXPECT_FALSE(first.cached);
  EXPECT_TRUE(second.cached);
  EXPECT_EQ(second.text, "hello");
  EXPECT_EQ(calls->load(), 1);
  EXPECT_EQ(g.provider_calls(), 1);
}

TEST(Cache, DiskCacheSurvivesGatewayRestart) {
  TempDir dir;
  auto calls = std::make_shared<std::atomic<int>>(0);
  std::vector<std::chrono::milliseconds> sleeps;
  auto opts = no_sleep(sleeps);
  opts.cache_dir = dir / "cache";
  {
    Gateway g(std::make_unique<ScriptedProvider>(0, "hello", calls), opts);
    g.complete(sample_request());
  }
  Gateway g2(std::make_unique<ScriptedProvider>(0, "other", calls), opts);
  auto res = g2.complete(sample_request());
  EXPECT_TRUE(res.cached);
  EXPECT_EQ(res.text, "hello");
  EXPECT_EQ(calls->load(), 1);
}

TEST(Retry, TwoTransientFailuresThenSuccess) {
  auto calls = std::make_shared<std::atomic<int>>(0);
  std::vector<std::chrono::milliseconds> sleeps;
  auto opts = no_sleep(sleeps);
  opts.retries = 3;
  Gateway g(std::make_unique<ScriptedProvider>(2, "ok", calls), opts);
  auto res = g.complete(sample_request());
  EXPECT_EQ(res.text, "ok");
  EXPECT_EQ(res.attempts, 3);
  EXPECT_EQ(sleeps, (std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(1000),
                                                            std::chrono::milliseconds(2000)}));
}

TEST(Retry, GivesUpAfterRetries) {
  auto calls = std::make_shared<std::atomic<int>>(0);
  std::vector<std::chrono::milliseconds> sleeps;
  auto opts = no_sleep(sleeps);
  opts.retries = 3;
  Gateway g(std::make_unique<ScriptedProvider>(100, "never", calls), opts);
  try {
    g.complete(sample_request());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProviderUnavailable);
  }
  EXPECT_EQ(calls->load(), 4);
  EXPECT_EQ(sleeps.size(), 3u);
  EXPECT_EQ(sleeps.back(), std::chrono::milliseconds(4000));
}

TEST(Budget, CeilingStopsProviderCalls) {
  auto calls = std::make_shared<std::atomic<int>>(0);
  std::vector<std::chrono::milliseconds> sleeps;
  auto opts = no_sleep(sleeps);
  opts.max_requests = 2;
  Gateway g(std::make_unique<ScriptedProvider>(0, "ok", calls), opts);
  g.complete(sample_request("a"));
  g.complete(sample_request("b"));
  EXPECT_NO_THROW(g.complete(sample_request("a")));  // cached, free
  try {
    g.complete(sample_request("c"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetExceeded);
  }
  EXPECT_EQ(calls->load(), 2);
}

class SlowProvider : public CompletionProvider {
 public:
  explicit SlowProvider(std::atomic<int>& peak) : peak_(peak) {}
  std::string name() const override { return "slow"; }
  std::string complete(const CompletionRequest& r, const std::string&) override {
    const int now = ++in_flight_;
    int prev = peak_.load();
    while (now > prev && !peak_.compare_exchange_weak(prev, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    --in_flight_;
    return r.prompt.body;
  }

 private:
  std::atomic<int> in_flight_{0};
  std::atomic<int>& peak_;
};

TEST(Concurrency, AtMostKInFlight) {
  std::atomic<int> peak{0};
  GatewayOptions opts;
  opts.concurrency = 3;
  Gateway g(std::make_unique<SlowProvider>(peak), opts);
  std::vector<std::thread> threads;
  for (int i = 0; i < 16; ++i) {
    threads.emplace_back([&g, i] { g.complete(sample_request("req " + std::to_string(i))); });
  }
  for (auto& t : threads) t.join();
  EXPECT_LE(peak.load(), 3);
  EXPECT_GE(peak.load(), 2);
  EXPECT_EQ(g.provider_calls(), 16);
}

class FakeChatServer {
 public:
  explicit FakeChatServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeChatServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::string chat_reply(const std::string& content) {
  nlohmann::json j;
  j["choices"] = nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}});
  return j.dump();
}

TEST(HttpProvider, RetriesOn429ThenSucceeds) {
  std::atomic<int> hits{0};
  std::string seen_auth, seen_body;
  FakeChatServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_body = req.body;
    if (hits++ < 2) {
      res.status = 429;
      return;
    }
    res.set_content(chat_reply("answer"), "application/json");
  });
  std::vector<std::chrono::milliseconds> sleeps;
  Gateway g(std::make_unique<HttpChatProvider>(server.endpoint(), "sk-test"), no_sleep(sleeps));
  auto res = g.complete(sample_request());
  EXPECT_EQ(res.text, "answer");
  EXPECT_EQ(res.attempts, 3);
  EXPECT_EQ(seen_auth, "Bearer sk-test");
  auto body = nlohmann::json::parse(seen_body);
  EXPECT_EQ(body["model"], "gpt-3.5-turbo");
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "Say hi");
  EXPECT_EQ(body["max_tokens"], 1024);
}

TEST(HttpProvider, AuthErrorIsNotRetried) {
  std::atomic<int> hits{0};
  FakeChatServer server([&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 401;
  });
  std::vector<std::chrono::milliseconds> sleeps;
  Gateway g(std::make_unique<HttpChatProvider>(server.endpoint(), "bad"), no_sleep(sleeps));
  try {
    g.complete(sample_request());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AuthError);
  }
  EXPECT_EQ(hits.load(), 1);
}

TEST(HttpProvider, ServerErrorsExhaustRetries) {
  FakeChatServer server([](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  std::vector<std::chrono::milliseconds> sleeps;
  auto opts = no_sleep(sleeps);
  opts.retries = 1;
  Gateway g(std::make_unique<HttpChatProvider>(server.endpoint(), "k"), opts);
  try {
    g.complete(sample_request());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ProviderUnavailable);
  }
  EXPECT_EQ(g.provider_calls(), 2);
}

TEST(RecordingProvider, WritesFixtureThatReplays) {
  TempDir dir;
  FakeChatServer server(
      [](const httplib::Request&, httplib::Response& res) { res.set_content(chat_reply("rec"), "application/json"); });
  Gateway rec(std::make_unique<RecordingProvider>(std::make_unique<HttpChatProvider>(server.endpoint(), "k"),
                                                  dir.path()));
  EXPECT_EQ(rec.complete(sample_request()).text, "rec");
  Gateway replay(std::make_unique<ReplayProvider>(dir.path()));
  EXPECT_EQ(replay.complete(sample_request()).text, "rec");
}

}  // namespace
}  // namespace cfq
