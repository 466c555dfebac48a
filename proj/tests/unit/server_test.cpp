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

#include <json.hpp>
#include <thread>

#include "cfq/error.hpp"
#include "cfq/server.hpp"
#include "cfq/taxonomy.hpp"
#include "test_support.hpp"

namespace cfq {
namespace {

using json = nlohmann::json;
using testing::TempDir;

class ServerTest : public ::testing::Test {
 protected:
  void SetUp() override { start(); }
  void TearDown() override { shutdown(); }

  void start() {
    store_ = std::make_unique<Store>(dir_.path(), bundled_catalog(), testing::stepping_clock());
    config_.fixtures = testing::test_data("fixtures/replay");
    config_.store_path = dir_.path();
    server_ = std::make_unique<Server>(config_, *store_, std::shared_ptr<Gateway>(make_gateway(config_)));
    port_ = server_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->listen(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int i = 0; i < 100 && !client_->Get("/"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }

  void shutdown() {
    if (!server_) return;
    server_->stop();
    thread_.join();
    server_.reset();
    store_.reset();
  }

  json get(const std::string& path, int expected = 200) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expected) << path << " -> " << res->body;
    return json::parse(res->body);
  }

  json post(const std::string& path, const json& body, int expected) {
    auto res = client_->Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expected) << path << " -> " << res->body;
    return json::parse(res->body);
  }

  json wait_job(const std::string& id) {
    server_->jobs().wait_idle();
    return get("/api/jobs/" + id);
  }

  TempDir dir_;
  Config config_;
  std::unique_ptr<Store> store_;
  std::unique_ptr<Server> server_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(ServerTest, ListsBundledChallenges) {
  auto body = get("/api/challenges");
  ASSERT_TRUE(body.is_array());
  EXPECT_EQ(body.size(), 13u);
  EXPECT_TRUE(body[0].contains("source"));
}

TEST_F(ServerTest, UnknownQuestionIs404) {
  auto body = post("/api/annotations", {{"question_id", "nope"}, {"annotator", "alice"}, {"label", "S"}}, 404);
  EXPECT_EQ(body["error"], "UnknownQuestion");
}

TEST_F(ServerTest, WrongMethodIs405) {
  for (const char* path : {"/api/challenges", "/api/questions", "/api/reports/crosstab", "/api/enhanced/bingo-board"}) {
    auto res = client_->Put(path, "{}", "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 405) << path;
    EXPECT_EQ(json::parse(res->body)["error"], "MethodNotAllowed");
  }
  auto res = client_->Post("/api/questions", "{}", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 405);
  res = client_->Get("/api/annotations");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 405);
}

TEST_F(ServerTest, BadInputIs400) {
  auto res = client_->Post("/api/annotations", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  post("/api/annotations", {{"question_id", "x"}, {"annotator", "alice"}, {"label", "Q"}}, 400);
  get("/api/questions?category=Nope", 400);
  get("/api/reports/agreement", 400);
}

TEST_F(ServerTest, GenerateJobThenReviewLoop) {
  auto job = post("/api/jobs",
                  {{"kind", "generate"}, {"challenges", {"circle-area-calculator"}}, {"categories", {"SyntaxAnalysis"}}},
                  202);
  const std::string id = job["job_id"];
  auto done = wait_job(id);
  EXPECT_EQ(done["state"], "Done");
  EXPECT_EQ(done["progress"]["done"], done["progress"]["total"]);
  EXPECT_EQ(done["progress"]["total"], 1);

  auto questions = get("/api/questions?challenge=circle-area-calculator&category=SyntaxAnalysis");
  ASSERT_EQ(questions.size(), 6u);
  EXPECT_EQ(get("/api/questions?anchor=Relocated").size(), 0u);
  const std::string qid = questions[0]["id"];

  auto a = post("/api/annotations",
                {{"question_id", qid}, {"annotator", "alice"}, {"label", "S"}, {"theme", "LU-Syntax"},
                 {"decision", "Accepted"}},
                201);
  EXPECT_EQ(a["label"], "S");
  EXPECT_EQ(get("/api/questions?decision=Accepted").size(), 1u);
  EXPECT_EQ(get("/api/questions?decision=Pending").size(), 5u);

  auto props = get("/api/reports/proportions?dimension=theme");
  EXPECT_EQ(props["total"], 1);
  EXPECT_EQ(props["rows"][0]["key"], "LU-Syntax");
  EXPECT_EQ(props["rows"][0]["proportion"], 1.0);

  auto cross = get("/api/reports/crosstab");
  EXPECT_EQ(cross["rows"][1]["counts"][0], 1);

  auto doc = get("/api/enhanced/circle-area-calculator");
  std::size_t attached = 0;
  for (const auto& l : doc["lines"]) attached += l["questions"].size();
  EXPECT_EQ(attached, 1u);
  auto html = client_->Get("/api/enhanced/circle-area-calculator?format=html");
  ASSERT_TRUE(html);
  EXPECT_EQ(html->status, 200);
  EXPECT_NE(html->body.find("<details"), std::string::npos);
  get("/api/enhanced/nope", 404);
}

TEST_F(ServerTest, GenerateJobRejectsUnknownChallengeUpFront) {
  auto body = post("/api/jobs", {{"kind", "generate"}, {"challenges", {"nope"}}}, 400);
  EXPECT_EQ(body["error"], "ConfigError");
  post("/api/jobs", {{"kind", "bake"}}, 400);
  get("/api/jobs/job-999", 404);
}

TEST_F(ServerTest, SuggestJobReportsFailures) {
  auto q = testing::sample_question("bingo-board", PromptCategory::SyntaxAnalysis, "What if?", 1);
  store_->put_questions({q});
  auto job = post("/api/jobs", {{"kind", "suggest"}, {"question_ids", {q.id}}}, 202);
  auto done = wait_job(job["job_id"]);
  EXPECT_EQ(done["state"], "Done");
  ASSERT_EQ(done["errors"].size(), 1u);
  EXPECT_NE(done["errors"][0].get<std::string>().find("FixtureMissing"), std::string::npos);
}

TEST_F(ServerTest, AgreementReport) {
  auto q1 = testing::sample_question("bingo-board", PromptCategory::SyntaxAnalysis, "A?", 1);
  auto q2 = testing::sample_question("bingo-board", PromptCategory::SyntaxAnalysis, "B?", 1);
  store_->put_questions({q1, q2});
  for (const auto& [qid, la, lb] : {std::tuple{q1.id, "S", "S"}, std::tuple{q2.id, "PL", "G"}}) {
    post("/api/annotations", {{"question_id", qid}, {"annotator", "alice"}, {"label", la}}, 201);
    post("/api/annotations", {{"question_id", qid}, {"annotator", "llm:gpt-3.5-turbo"}, {"label", lb}}, 201);
  }
  auto r = get("/api/reports/agreement?annotator_a=alice&annotator_b=llm:gpt-3.5-turbo");
  EXPECT_EQ(r["total"], 2);
  EXPECT_EQ(r["matrix"][0][0], 1);
  EXPECT_EQ(r["matrix"][1][2], 1);
  EXPECT_EQ(r["percent_agreement"], 0.5);
  EXPECT_EQ(r["kappa_status"], "ok");
  auto empty = get("/api/reports/agreement?annotator_a=x&annotator_b=y");
  EXPECT_EQ(empty["kappa_status"], "empty");
  EXPECT_TRUE(empty["kappa"].is_null());
}

TEST_F(ServerTest, ThemesAndChallenges) {
  EXPECT_EQ(get("/api/themes").size(), 6u);
  post("/api/themes", {{"id", "error-handling"}, {"display_name", "Error Handling"}}, 201);
  EXPECT_EQ(post("/api/themes", {{"id", "LU-Syntax"}}, 409)["error"], "ReservedId");
  EXPECT_EQ(post("/api/themes", {{"id", "error-handling"}}, 409)["error"], "DuplicateTheme");
  EXPECT_EQ(get("/api/themes").size(), 7u);

  auto c = post("/api/challenges",
                {{"title", "Even Odd"}, {"category", "ComparisonsRules"}, {"source", "class E {\n}\n"}}, 201);
  EXPECT_EQ(c["id"], "even-odd");
  EXPECT_EQ(c["provenance"], "UserImported");
  EXPECT_EQ(c["source"].size(), 2u);
  post("/api/challenges", {{"title", "Even Odd"}, {"category", "ComparisonsRules"}, {"source", "x"}}, 409);
  post("/api/challenges", {{"title", "Blank"}, {"category", "ComparisonsRules"}, {"source", ""}}, 400);
  EXPECT_EQ(get("/api/challenges").size(), 14u);
}

TEST_F(ServerTest, DecisionsSurviveRestart) {
  auto q = testing::sample_question("bingo-board", PromptCategory::SyntaxAnalysis, "Persist?", 1);
  store_->put_questions({q});
  post("/api/annotations", {{"question_id", q.id}, {"annotator", "alice"}, {"label", "G"}, {"decision", "Rejected"}},
       201);
  shutdown();
  start();
  auto qs = get("/api/questions?decision=Rejected");
  ASSERT_EQ(qs.size(), 1u);
  EXPECT_EQ(qs[0]["id"], q.id);
}

TEST_F(ServerTest, RootServesPage) {
  auto res = client_->Get("/");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_NE(res->body.find("<html"), std::string::npos);
}

TEST(ServerBind, PortInUseIsBindError) {
  Store store(bundled_catalog());
  Config config;
  Server a(config, store, std::shared_ptr<Gateway>(make_gateway(config)));
  const int port = a.bind("127.0.0.1", 0);
  Server b(config, store, std::shared_ptr<Gateway>(make_gateway(config)));
  try {
    b.bind("127.0.0.1", port);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BindError);
  }
}

TEST(HttpStatus, Mapping) {
  EXPECT_EQ(http_status(ErrorCode::UnknownQuestion), 404);
  EXPECT_EQ(http_status(ErrorCode::UnknownChallenge), 404);
  EXPECT_EQ(http_status(ErrorCode::DuplicateTheme), 409);
  EXPECT_EQ(http_status(ErrorCode::InvalidArgument), 400);
  EXPECT_EQ(http_status(ErrorCode::BudgetExceeded), 429);
  EXPECT_EQ(http_status(ErrorCode::ProviderUnavailable), 502);
}

}  // namespace
}  // namespace cfq
