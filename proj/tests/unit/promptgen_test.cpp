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

#include "cfq/error.hpp"
#include "cfq/promptgen.hpp"
#include "test_support.hpp"

namespace cfq {
namespace {

TEST(QuestionPrompt, MatchesGoldenFiles) {
  const auto challenge = testing::fixture_challenge();
  for (auto category : kPromptCategories) {
    const auto golden =
        read_file(testing::test_data("golden/prompts/" + std::string(to_string(category)) + ".txt"));
    const auto p = build_question_prompt(category, challenge);
    EXPECT_EQ(p.body, golden) << to_string(category);
    EXPECT_EQ(p.category, category);
    EXPECT_EQ(p.challenge_id, challenge.id);
  }
}

TEST(QuestionPrompt, KeywordExamples) {
  const auto& c = get_challenge(bundled_catalog(), "circle-area-calculator");
  auto syntax = build_question_prompt(PromptCategory::SyntaxAnalysis, c).body;
  EXPECT_EQ(syntax.rfind(kQuestionPromptPrefix, 0), 0u);
  EXPECT_NE(syntax.find("syntactic perspectives or aspects"), std::string::npos);
  auto goal = build_question_prompt(PromptCategory::GoalOrientedAnalysis, c).body;
  EXPECT_NE(goal.find("such that final goal of the program is changed"), std::string::npos);
}

TEST(QuestionPrompt, EmptySource) {
  auto c = testing::fixture_challenge();
  c.source.clear();
  try {
    build_question_prompt(PromptCategory::CriticalThinkingPerspective, c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySource);
  }
}

TEST(QuestionPrompt, CategoriesDifferOnlyInKeywords) {
  for (const auto& c : bundled_catalog().challenges()) {
    const std::string block = "\n\n" + fenced_program(c);
    for (auto category : kPromptCategories) {
      const auto body = build_question_prompt(category, c).body;
      const std::string expected =
          std::string(kQuestionPromptPrefix) + " " + std::string(prompt_keywords(category)) + "." + block;
      EXPECT_EQ(body, expected);
      EXPECT_EQ(body, build_question_prompt(category, c).body);
    }
  }
}

TEST(ProgramPrompt, ContainsGoalAndPhrase) {
  auto p = build_program_prompt("compute the area of a circle from user input").body;
  EXPECT_NE(p.find("compute the area of a circle from user input"), std::string::npos);
  EXPECT_NE(p.find("as a novice programmer would"), std::string::npos);
  EXPECT_FALSE(build_program_prompt("x").category.has_value());
}

TEST(ProgramPrompt, EmptyGoal) {
  for (const char* g : {"", "  \n "}) {
    try {
      build_program_prompt(g);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::EmptyGoal);
    }
  }
}

TEST(ProgramPrompt, NewlinePreserved) {
  auto p = build_program_prompt("read two numbers\nprint their sum").body;
  EXPECT_NE(p.find("read two numbers\nprint their sum"), std::string::npos);
}

TEST(LabelPrompt, Construction) {
  const auto c = testing::fixture_challenge();
  auto q = testing::sample_question(c.id, PromptCategory::SyntaxAnalysis,
                                    "What if we wrote \"x\" as 'x' and used `var`?", 3);
  auto body = build_label_suggestion_prompt(q, c).body;
  EXPECT_NE(body.find("What if we wrote \"x\" as 'x' and used `var`?"), std::string::npos);
  for (auto l : kLabelClasses) {
    EXPECT_NE(body.find(std::string(to_string(l)) + " ("), std::string::npos);
    EXPECT_NE(body.find(definition(l)), std::string::npos);
  }
  EXPECT_NE(body.find("The ability of code to compile successfully"), std::string::npos);
  EXPECT_NE(body.find(fenced_program(c)), std::string::npos);
  EXPECT_NE(body.find("{S, PL, G, M}"), std::string::npos);
}

TEST(ExtractCodeBlock, Variants) {
  EXPECT_EQ(extract_code_block("Here:\n```java\nclass A {}\n```\nDone."), "class A {}");
  EXPECT_EQ(extract_code_block("```\nx;\ny;\n```"), "x;\ny;");
  EXPECT_EQ(extract_code_block("class B {}"), "class B {}");
  EXPECT_EQ(extract_code_block("```java\n```"), "");
}

}  // namespace
}  // namespace cfq
