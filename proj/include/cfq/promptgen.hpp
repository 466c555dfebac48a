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

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "cfq/corpus.hpp"
#include "cfq/model.hpp"

namespace cfq {

struct PromptText {
  std::string body;
  std::optional<PromptCategory> category;
  std::optional<std::string> challenge_id;

  friend bool operator==(const PromptText&, const PromptText&) = default;
};

/// Shared opening of every question-generation prompt.
inline constexpr std::string_view kQuestionPromptPrefix =
    "In tabular file format with the following columns (LineNumber, LineCode, Question) generate "
    "counterfactual questions to make students critically think about the program from";

/// Keyword phrase appended to the prefix for each category.
std::string_view prompt_keywords(PromptCategory category) noexcept;

/// Program rendered as a ```java fenced block, lines verbatim.
std::string fenced_program(const CodeChallenge& challenge);

/// PREFIX + " " + keywords + "." + blank line + fenced program.
/// Throws EmptySource.
PromptText build_question_prompt(PromptCategory category, const CodeChallenge& challenge);

/// Asks for a novice-style Java program meeting `goal`. Throws EmptyGoal.
PromptText build_program_prompt(std::string_view goal);

/// Asks the model for exactly one of S, PL, G, M for `question`.
PromptText build_label_suggestion_prompt(const GeneratedQuestion& question, const CodeChallenge& challenge);

/// Pulls the first fenced code block out of a model reply; falls back to the
/// whole reply when it has no fence.
std::string extract_code_block(std::string_view reply);

}  // namespace cfq
