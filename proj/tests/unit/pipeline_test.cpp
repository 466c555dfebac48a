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

#include <atomic>
#include <cstdlib>

#include "cfq/error.hpp"
#include "cfq/pipeline.hpp"
#include "cfq/promptgen.hpp"
#include "cfq/taxonomy.hpp"
#include "test_support.hpp"

namespace cfq {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorCode::InvalidArgument;
}

Config replay_config(const fs::path& fixtures) {
  Config c;
  c.fixtures = fixtures;
  return c;
}

const std::vector<std::string> kCorpusChallenges = {"circle-area-calculator", "prime-checker", "bank-account"};

TEST(Config, DefaultsAndFile) {
  TempDir dir;
  write_file_atomic(dir / "c.json",
                    R"({"provider": {"mode": "record", "temperature": 0.2, "retries": 5, "fixtures": "fx"},
                        "store": {"path": "st"}, "ui": {"dir": "ui"}})");
  auto c = load_config(dir / "c.json");
  EXPECT_EQ(c.mode, ProviderMode::Record);
  EXPECT_EQ(c.temperature, 0.2);
  EXPECT_EQ(c.retries, 5);
  EXPECT_EQ(c.fixtures, "fx");
  EXPECT_EQ(c.store_path, "st");
  EXPECT_EQ(c.ui_dir, fs::path("ui"));
  EXPECT_EQ(c.concurrency, 4);
  EXPECT_EQ(c.model, "gpt-3.5-turbo");
  auto d = load_config(std::nullopt);
  EXPECT_EQ(d.mode, ProviderMode::Replay);
  EXPECT_EQ(d.temperature, 0.7);
  EXPECT_EQ(d.retries, 3);
  EXPECT_EQ(d.store_path, "cfq-store");
}

TEST(Config, Errors) {
  TempDir dir;
  write_file_atomic(dir / "bad.json", R"({"provider": {"colour": "blue"}})");
  EXPECT_EQ(code_of([&] { load_config(dir / "bad.json"); }), ErrorCode::ConfigError);
  write_file_atomic(dir / "broken.json", "{");
  EXPECT_EQ(code_of([&] { load_config(dir / "broken.json"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { load_config(dir / "absent.json"); }), ErrorCode::ConfigError);
  Config c;
  EXPECT_EQ(code_of([&] { apply_config_override(c, "provider.temperature", "3"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { apply_config_override(c, "provider.retries", "x"); }), ErrorCode::ConfigError);
  EXPECT_EQ(code_of([&] { apply_config_override(c, "provider.mode", "offline"); }), ErrorCode::ConfigError);
  apply_config_override(c, "provider.max_requests", "10");
  EXPECT_EQ(c.max_requests, 10);
}

TEST(Config, LiveModeNeedsKey) {
  Config c;
  c.mode = ProviderMode::Live;
  c.api_key.clear();
  EXPECT_EQ(code_of([&] { make_gateway(c); }), ErrorCode::ConfigError);
  c.api_key = "k";
  EXPECT_TRUE(make_gateway(c)->provider().is_live());
  EXPECT_FALSE(make_gateway(Config{})->provider().is_live());
}

TEST(Generate, ReplayMatchesGoldenSummary) {
  Store store(bundled_catalog(), testing::fixed_clock());
  const auto config = replay_config(testing::test_data("fixtures/replay"));
  auto gw = make_gateway(config);
  auto summary = generate(store, *gw, config, {kCorpusChallenges, {}});
  EXPECT_EQ(summary.to_text(), read_file(testing::test_data("golden/generate_summary.txt")));
  EXPECT_FALSE(summary.any_failed());
  EXPECT_EQ(summary.pairs.size(), 15u);
}

TEST(Generate, SecondRunDeduplicatesEverything) {
  TempDir dir;
  const auto config = replay_config(testing::test_data("fixtures/replay"));
  Store store(dir.path(), bundled_catalog(), testing::fixed_clock());
  auto first = generate(store, *make_gateway(config), config, {kCorpusChallenges, {}});
  const auto before = read_file(dir / "store.json");
  auto second = generate(store, *make_gateway(config), config, {kCorpusChallenges, {}});
  EXPECT_EQ(second.total_inserted(), 0);
  EXPECT_EQ(second.total_deduplicated(), first.total_inserted() + first.total_deduplicated());
  EXPECT_EQ(read_file(dir / "store.json"), before);
  EXPECT_NO_THROW(store.snapshot()->check_integrity());
}

TEST(Generate, RawResponsesAreKeptAndLinked) {
  Store store(bundled_catalog(), testing::fixed_clock());
  const auto config = replay_config(testing::test_data("fixtures/replay"));
  generate(store, *make_gateway(config), config, {{"prime-checker"}, {PromptCategory::SyntaxAnalysis}});
  auto snap = store.snapshot();
  ASSERT_FALSE(snap->questions.empty());
  for (const auto& [id, q] : snap->questions) {
    ASSERT_TRUE(snap->has_response(q.response_fingerprint));
    auto raw = store.raw_response(q.response_fingerprint);
    ASSERT_TRUE(raw);
    EXPECT_EQ(*raw, read_file(testing::test_data("fixtures/responses/prime-checker/SyntaxAnalysis.txt")));
  }
}

TEST(Generate, MissingFixtureFailsOnlyThatPair) {
  TempDir fx;
  const auto& c = get_challenge(bundled_catalog(), "circle-area-calculator");
  for (auto category : kPromptCategories) {
    if (category == PromptCategory::GoalOrientedAnalysis) continue;
    const auto reply = read_file(testing::test_data("fixtures/responses/circle-area-calculator/" +
                                                    std::string(to_string(category)) + ".txt"));
    record_fixture(make_request(Config{}, build_question_prompt(category, c)), reply, fx.path());
  }
  Store store(bundled_catalog());
  const auto config = replay_config(fx.path());
  auto summary = generate(store, *make_gateway(config), config, {{"circle-area-calculator"}, {}});
  ASSERT_EQ(summary.pairs.size(), 5u);
  int failed = 0;
  for (const auto& p : summary.pairs) {
    if (p.error) {
      ++failed;
      EXPECT_EQ(p.category, PromptCategory::GoalOrientedAnalysis);
      EXPECT_EQ(p.error->code(), ErrorCode::FixtureMissing);
    } else {
      EXPECT_GT(p.inserted, 0);
    }
  }
  EXPECT_EQ(failed, 1);
  EXPECT_TRUE(summary.any_failed());
  EXPECT_NE(summary.to_text().find("FAILED FixtureMissing"), std::string::npos);
}

class CountingProvider : public CompletionProvider {
 public:
  explicit CountingProvider(std::atomic<int>& calls) : calls_(calls) {}
  std::string name() const override { return "counting"; }
  std::string complete(const CompletionRequest&, const std::string&) override {
    ++calls_;
    return "";
  }

 private:
  std::atomic<int>& calls_;
};

TEST(Generate, UnknownChallengeBeforeAnyProviderCall) {
  std::atomic<int> calls{0};
  Gateway gw(std::make_unique<CountingProvider>(calls));
  Store store(bundled_catalog());
  EXPECT_EQ(code_of([&] { generate(store, gw, Config{}, {{"circle-area-calculator", "no-such"}, {}}); }),
            ErrorCode::ConfigError);
  EXPECT_EQ(calls.load(), 0);
}

TEST(Generate, EmptyReplyIsAFailedPair) {
  std::atomic<int> calls{0};
  Gateway gw(std::make_unique<CountingProvider>(calls));
  Store store(bundled_catalog());
  auto s = generate(store, gw, Config{}, {{"bingo-board"}, {PromptCategory::SyntaxAnalysis}});
  ASSERT_EQ(s.pairs.size(), 1u);
  ASSERT_TRUE(s.pairs[0].error);
  EXPECT_EQ(s.pairs[0].error->code(), ErrorCode::NoTableFound);
}

TEST(Generate, ProgressReportsEveryPair) {
  Store store(bundled_catalog());
  const auto config = replay_config(testing::test_data("fixtures/replay"));
  std::vector<std::pair<int, int>> seen;
  generate(store, *make_gateway(config), config, {{"bank-account"}, {}},
           [&](int done, int total) { seen.emplace_back(done, total); });
  ASSERT_EQ(seen.size(), 5u);
  EXPECT_EQ(seen.back(), std::make_pair(5, 5));
}

TEST(SuggestLabels, DefaultsToUnlabeledQuestions) {
  TempDir fx;
  Store store(bundled_catalog(), testing::stepping_clock());
  const auto& c = get_challenge(bundled_catalog(), "bingo-board");
  std::vector<GeneratedQuestion> qs = {
      testing::sample_question(c.id, PromptCategory::SyntaxAnalysis, "What if the array had 6 columns?", 1),
      testing::sample_question(c.id, PromptCategory::SyntaxAnalysis, "What if the loop used <=?", 1),
      testing::sample_question(c.id, PromptCategory::SyntaxAnalysis, "What if?", 1)};
  store.put_questions(qs);
  record_fixture(make_request(Config{}, build_label_suggestion_prompt(qs[0], c)), "G", fx.path());
  record_fixture(make_request(Config{}, build_label_suggestion_prompt(qs[1], c)), "I think: pl.", fx.path());
  const auto config = replay_config(fx.path());
  auto gw = make_gateway(config);
  auto s = suggest_labels(store, *gw, config, {});
  EXPECT_EQ(s.suggested, 2);
  ASSERT_EQ(s.failures.size(), 1u);
  EXPECT_EQ(s.failures[0].first, qs[2].id);
  EXPECT_EQ(s.failures[0].second.code(), ErrorCode::FixtureMissing);
  auto snap = store.snapshot();
  EXPECT_EQ(current_annotation(*snap, qs[0].id, "llm:gpt-3.5-turbo")->label, LabelClass::G);
  EXPECT_EQ(current_annotation(*snap, qs[1].id, "llm:gpt-3.5-turbo")->label, LabelClass::PL);
  auto again = suggest_labels(store, *gw, config, {});
  EXPECT_EQ(again.suggested, 0);
  EXPECT_EQ(again.failures.size(), 1u);
}

TEST(GenerateProgram, AddsLlmGeneratedChallenge) {
  TempDir fx;
  const std::string goal = "Read a temperature in Celsius and print it in Fahrenheit.";
  record_fixture(make_request(Config{}, build_program_prompt(goal)),
                 "Here is a simple program:\n\n```java\npublic class Temp {\n    public static void main(String[] a) {\n"
                 "    }\n}\n```\nHope it helps!",
                 fx.path());
  Store store(bundled_catalog());
  const auto config = replay_config(fx.path());
  auto gw = make_gateway(config);
  auto c = generate_program(store, *gw, config, "Temperature Converter", FunctionalCategory::ObjectArithmetic, goal);
  EXPECT_EQ(c.id, "temperature-converter");
  EXPECT_EQ(c.provenance, Provenance::LlmGenerated);
  ASSERT_EQ(c.source.size(), 4u);
  EXPECT_EQ(c.source[0].text, "public class Temp {");
  EXPECT_EQ(*store.snapshot()->find_challenge(c.id), c);
  EXPECT_EQ(code_of([&] {
              generate_program(store, *gw, config, "Temperature Converter", FunctionalCategory::ObjectArithmetic, goal);
            }),
            ErrorCode::DuplicateId);
  EXPECT_EQ(code_of([&] {
              generate_program(store, *gw, config, "Other", FunctionalCategory::ObjectArithmetic, "  ");
            }),
            ErrorCode::EmptyGoal);
}

TEST(Jobs, RunInOrderAndReportProgress) {
  JobRunner runner;
  std::vector<int> order;
  std::mutex mu;
  auto a = runner.submit(JobKind::Generate, [&](const ProgressFn& p) {
    std::lock_guard lock(mu);
    order.push_back(1);
    p(1, 2);
    p(2, 2);
    return std::vector<std::string>{};
  });
  auto b = runner.submit(JobKind::Suggest, [&](const ProgressFn& p) {
    std::lock_guard lock(mu);
    order.push_back(2);
    p(1, 1);
    return std::vector<std::string>{"q1: FixtureMissing"};
  });
  auto c = runner.submit(JobKind::Generate, [](const ProgressFn&) -> std::vector<std::string> {
    throw Error(ErrorCode::ConfigError, "boom");
  });
  runner.wait_idle();
  EXPECT_EQ(order, (std::vector<int>{1, 2}));
  auto sa = runner.status(a);
  ASSERT_TRUE(sa);
  EXPECT_EQ(sa->state, JobState::Done);
  EXPECT_EQ(sa->done, sa->total);
  EXPECT_EQ(sa->kind, JobKind::Generate);
  auto sb = runner.status(b);
  EXPECT_EQ(sb->state, JobState::Done);
  EXPECT_EQ(sb->errors, std::vector<std::string>{"q1: FixtureMissing"});
  auto sc = runner.status(c);
  EXPECT_EQ(sc->state, JobState::Failed);
  ASSERT_EQ(sc->errors.size(), 1u);
  EXPECT_NE(sc->errors[0].find("boom"), std::string::npos);
  EXPECT_FALSE(runner.status("nope"));
  EXPECT_NE(a, b);
}

}  // namespace
}  // namespace cfq
