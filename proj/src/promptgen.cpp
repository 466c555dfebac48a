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

#include "cfq/promptgen.hpp"

#include "cfq/error.hpp"
#include "cfq/util.hpp"

namespace cfq {

std::string_view prompt_keywords(PromptCategory category) noexcept {
  switch (category) {
    case PromptCategory::CriticalThinkingPerspective: return "different perspectives or aspects";
    case PromptCategory::SyntaxAnalysis: return "syntactic perspectives or aspects";
    case PromptCategory::GoalOrientedAnalysis: return "such that final goal of the program is changed";
    case PromptCategory::ProblemSolutionMapping: return "could ask that have the same program as the solution";
    case PromptCategory::IntrinsicProgramAnalysis:
      return "based on the program and the answer to those questions lie within the program";
  }
  return "";
}

std::string fenced_program(const CodeChallenge& challenge) {
  return "```java\n" + join_source(challenge.source) + "\n```";
}

PromptText build_question_prompt(PromptCategory category, const CodeChallenge& challenge) {
  if (challenge.source.empty()) throw Error(ErrorCode::EmptySource, challenge.id);
  PromptText p;
  p.body.append(kQuestionPromptPrefix);
  p.body.push_back(' ');
  p.body.append(prompt_keywords(category));
  p.body.append(".\n\n");
  p.body.append(fenced_program(challenge));
  p.category = category;
  p.challenge_id = challenge.id;
  return p;
}

PromptText build_program_prompt(std::string_view goal) {
  if (trim(goal).empty()) throw Error(ErrorCode::EmptyGoal, "");
  PromptText p;
  p.body = "Write a complete Java program as a novice programmer would that accomplishes the following goal:\n\n";
  p.body.append(goal);
  p.body.append("\n\nReply with the whole program in a single ```java fenced code block.");
  return p;
}

PromptText build_label_suggestion_prompt(const GeneratedQuestion& question, const CodeChallenge& challenge) {
  PromptText p;
  p.body =
      "The question below was asked about the following Java program. Classify the question into exactly one "
      "of these label classes.\n\n";
  for (auto l : kLabelClasses) {
    p.body.append(to_string(l));
    p.body.append(" (");
    p.body.append(display_name(l));
    p.body.append("): ");
    p.body.append(definition(l));
    p.body.append("\n");
  }
  p.body.append("\nQuestion: ");
  p.body.append(question.row.question);
  p.body.append("\n\nAnswer with exactly one token from {S, PL, G, M} and nothing else.\n\n");
  p.body.append(fenced_program(challenge));
  p.category = question.category;
  p.challenge_id = challenge.id;
  return p;
}

std::string extract_code_block(std::string_view reply) {
  const auto open = reply.find("```");
  if (open == std::string_view::npos) return std::string(trim(reply));
  const auto body_start = reply.find('\n', open);
  if (body_start == std::string_view::npos) return std::string(trim(reply));
  const auto close = reply.find("\n```", body_start);
  const auto end = close == std::string_view::npos ? reply.size() : close;
  if (end <= body_start) return {};
  return std::string(reply.substr(body_start + 1, end - body_start - 1));
}

}  // namespace cfq
