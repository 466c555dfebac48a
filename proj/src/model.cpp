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

#include "cfq/model.hpp"

#include <algorithm>

namespace cfq {

std::string_view to_string(PromptCategory c) noexcept {
  switch (c) {
    case PromptCategory::CriticalThinkingPerspective: return "CriticalThinkingPerspective";
    case PromptCategory::SyntaxAnalysis: return "SyntaxAnalysis";
    case PromptCategory::GoalOrientedAnalysis: return "GoalOrientedAnalysis";
    case PromptCategory::ProblemSolutionMapping: return "ProblemSolutionMapping";
    case PromptCategory::IntrinsicProgramAnalysis: return "IntrinsicProgramAnalysis";
  }
  return "";
}

std::string_view display_name(PromptCategory c) noexcept {
  switch (c) {
    case PromptCategory::CriticalThinkingPerspective: return "Critical Thinking and Perspective Taking";
    case PromptCategory::SyntaxAnalysis: return "Syntax Analysis";
    case PromptCategory::GoalOrientedAnalysis: return "Goal-Oriented Analysis";
    case PromptCategory::ProblemSolutionMapping: return "Problem-Solution Mapping";
    case PromptCategory::IntrinsicProgramAnalysis: return "Intrinsic Program Analysis";
  }
  return "";
}

std::optional<PromptCategory> parse_prompt_category(std::string_view s) noexcept {
  for (auto c : kPromptCategories) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

int rank(PromptCategory c) noexcept {
  return static_cast<int>(std::find(kPromptCategories.begin(), kPromptCategories.end(), c) -
                          kPromptCategories.begin());
}

std::string_view to_string(LabelClass l) noexcept {
  switch (l) {
    case LabelClass::S: return "S";
    case LabelClass::PL: return "PL";
    case LabelClass::G: return "G";
    case LabelClass::M: return "M";
  }
  return "";
}

std::string_view display_name(LabelClass l) noexcept {
  switch (l) {
    case LabelClass::S: return "Syntax";
    case LabelClass::PL: return "Programming Logic";
    case LabelClass::G: return "Goal-oriented";
    case LabelClass::M: return "Miscellaneous";
  }
  return "";
}

std::string_view definition(LabelClass l) noexcept {
  switch (l) {
    case LabelClass::S:
      return "The ability of code to compile successfully depends on whether it adheres to the syntax rules of "
             "the programming language. The concept of syntax in a programming language includes the proper use "
             "of brackets, punctuation like semicolons or colons, variable declaration, and so on. E.g., \"What "
             "would happen if we forgot to include the semicolon at the end?\"";
    case LabelClass::PL:
      return "Logical comprehension and overall understanding of a piece of code or a program. The emphasis is "
             "not on specific syntax or language constructs, but rather on understanding how the pieces of the "
             "code fit together to create a functioning program. This could involve understanding the purpose of "
             "specific variables or functions, how control flow structures like loops or conditionals are used, "
             "or the logic behind a specific algorithm or data structure used in the code. In some cases, these "
             "questions could involve modifications or adaptations of existing code to meet new requirements or "
             "goals. E.g. \"What if we needed to read input from a file instead of from the user? How could we "
             "modify the code to achieve this?\"";
    case LabelClass::G:
      return "Achieving a desired result regardless of the specifics of the code. This category is more focused "
             "on the problem-solving aspect of programming, where the specific language or implementation details "
             "are secondary to the overall objective. E.g. \"What if we wanted to read the radius value from a "
             "file instead of user input?\"";
    case LabelClass::M:
      return "A catch-all category for questions that don't neatly fit into the other categories. This could "
             "involve questions about programming best practices, questions about specific development tools or "
             "environments, version control, debugging strategies, or questions about the broader principles and "
             "philosophies of software development. E.g., \"Why is the main method necessary in a Java program?\"";
  }
  return "";
}

std::optional<LabelClass> parse_label_class(std::string_view s) noexcept {
  for (auto l : kLabelClasses) {
    if (s == to_string(l)) return l;
  }
  return std::nullopt;
}

int index_of(LabelClass l) noexcept { return static_cast<int>(l); }

const std::array<Theme, 6>& builtin_themes() {
  static const std::array<Theme, 6> themes = {{
      {"LU-Syntax", "Language Understanding - Syntax", "Grammar and syntax rules of the language.", true},
      {"LU-Semantic", "Language Understanding - Semantic",
       "Meaning of keywords and constructs and how they behave.", true},
      {"LU-Other", "Language Understanding - Other", "Core concepts, conventions and quirks of the language.",
       true},
      {"LibraryFunction", "Library/Function Understanding", "How a library, class or function works.", true},
      {"ExternalBehaviour", "External Behaviour", "Input, output and other observable effects of the program.",
       true},
      {"RefactoringInternal", "Refactoring, Internal Behaviour",
       "Restructuring the code or reasoning about its internal control flow.", true},
  }};
  return themes;
}

bool is_builtin_theme(std::string_view id) noexcept {
  const auto& themes = builtin_themes();
  return std::any_of(themes.begin(), themes.end(), [&](const Theme& t) { return t.id == id; });
}

std::string_view to_string(Decision d) noexcept {
  switch (d) {
    case Decision::Pending: return "Pending";
    case Decision::Accepted: return "Accepted";
    case Decision::Rejected: return "Rejected";
  }
  return "";
}

std::optional<Decision> parse_decision(std::string_view s) noexcept {
  for (auto d : {Decision::Pending, Decision::Accepted, Decision::Rejected}) {
    if (s == to_string(d)) return d;
  }
  return std::nullopt;
}

std::string_view to_string(AnchorStatus s) noexcept {
  switch (s) {
    case AnchorStatus::Anchored: return "Anchored";
    case AnchorStatus::Relocated: return "Relocated";
    case AnchorStatus::Unanchored: return "Unanchored";
  }
  return "";
}

std::optional<AnchorStatus> parse_anchor_status(std::string_view s) noexcept {
  for (auto a : {AnchorStatus::Anchored, AnchorStatus::Relocated, AnchorStatus::Unanchored}) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

std::string question_id(std::string_view challenge_id, PromptCategory category, std::string_view question_text) {
  std::string key = "cfq-question-v1";
  key.push_back('\0');
  key.append(challenge_id);
  key.push_back('\0');
  key.append(to_string(category));
  key.push_back('\0');
  key.append(question_text);
  return sha256_hex(key).substr(0, 16);
}

GeneratedQuestion make_question(std::string challenge_id, PromptCategory category, ParsedRow row,
                                AnchorResult anchor, std::string response_fingerprint) {
  GeneratedQuestion q;
  q.id = question_id(challenge_id, category, row.question);
  q.challenge_id = std::move(challenge_id);
  q.category = category;
  q.row = std::move(row);
  q.anchor = anchor;
  q.response_fingerprint = std::move(response_fingerprint);
  return q;
}

std::string annotation_id(const Annotation& a) {
  std::string key = "cfq-annotation-v1";
  for (std::string_view part : {std::string_view(a.question_id), std::string_view(a.annotator), to_string(a.label),
                                std::string_view(a.theme ? *a.theme : std::string_view{}), to_string(a.decision)}) {
    key.push_back('\0');
    key.append(part);
  }
  key.push_back('\0');
  key.append(a.theme ? "1" : "0");
  key.push_back('\0');
  key.append(std::to_string(a.timestamp.time_since_epoch().count()));
  return sha256_hex(key).substr(0, 16);
}

bool supersedes(const Annotation& candidate, const Annotation& current) noexcept {
  if (candidate.timestamp != current.timestamp) return candidate.timestamp > current.timestamp;
  return candidate.id > current.id;
}

}  // namespace cfq
