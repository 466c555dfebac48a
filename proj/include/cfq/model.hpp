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

// Value types shared by the pipeline stages: prompt categories, label
// classes, themes, parsed rows, anchors, questions and annotations.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "cfq/util.hpp"

namespace cfq {

/// Question-generation prompt categories, in hierarchy order.
enum class PromptCategory {
  CriticalThinkingPerspective,
  SyntaxAnalysis,
  GoalOrientedAnalysis,
  ProblemSolutionMapping,
  IntrinsicProgramAnalysis,
};

inline constexpr std::array<PromptCategory, 5> kPromptCategories = {
    PromptCategory::CriticalThinkingPerspective, PromptCategory::SyntaxAnalysis,
    PromptCategory::GoalOrientedAnalysis, PromptCategory::ProblemSolutionMapping,
    PromptCategory::IntrinsicProgramAnalysis};

std::string_view to_string(PromptCategory c) noexcept;
std::string_view display_name(PromptCategory c) noexcept;
std::optional<PromptCategory> parse_prompt_category(std::string_view s) noexcept;
/// Position in kPromptCategories.
int rank(PromptCategory c) noexcept;

enum class LabelClass { S, PL, G, M };

inline constexpr std::array<LabelClass, 4> kLabelClasses = {LabelClass::S, LabelClass::PL, LabelClass::G,
                                                            LabelClass::M};

std::string_view to_string(LabelClass l) noexcept;
std::string_view display_name(LabelClass l) noexcept;
/// Full class definition text shown to annotators and to the model.
std::string_view definition(LabelClass l) noexcept;
std::optional<LabelClass> parse_label_class(std::string_view s) noexcept;
int index_of(LabelClass l) noexcept;

struct Theme {
  std::string id;
  std::string display_name;
  std::string description;
  bool builtin = false;

  friend bool operator==(const Theme&, const Theme&) = default;
};

/// The six themes present in every fresh store.
const std::array<Theme, 6>& builtin_themes();
bool is_builtin_theme(std::string_view id) noexcept;

enum class Decision { Pending, Accepted, Rejected };

std::string_view to_string(Decision d) noexcept;
std::optional<Decision> parse_decision(std::string_view s) noexcept;

struct ParsedRow {
  long long line_number = 0;
  std::string line_code;
  std::string question;

  friend bool operator==(const ParsedRow&, const ParsedRow&) = default;
};

enum class AnchorStatus { Anchored, Relocated, Unanchored };

std::string_view to_string(AnchorStatus s) noexcept;
std::optional<AnchorStatus> parse_anchor_status(std::string_view s) noexcept;

struct AnchorResult {
  AnchorStatus status = AnchorStatus::Unanchored;
  /// Validated 1-based line; set iff status != Unanchored.
  std::optional<int> line;

  static AnchorResult anchored(int n) { return {AnchorStatus::Anchored, n}; }
  static AnchorResult relocated(int n) { return {AnchorStatus::Relocated, n}; }
  static AnchorResult unanchored() { return {}; }

  friend bool operator==(const AnchorResult&, const AnchorResult&) = default;
};

struct GeneratedQuestion {
  std::string id;
  std::string challenge_id;
  PromptCategory category = PromptCategory::CriticalThinkingPerspective;
  ParsedRow row;
  AnchorResult anchor;
  std::string response_fingerprint;

  friend bool operator==(const GeneratedQuestion&, const GeneratedQuestion&) = default;
};

/// Dedup key: hash over challenge, category and question text. Line number
/// and line code are deliberately excluded.
std::string question_id(std::string_view challenge_id, PromptCategory category, std::string_view question_text);

GeneratedQuestion make_question(std::string challenge_id, PromptCategory category, ParsedRow row,
                                AnchorResult anchor, std::string response_fingerprint);

inline constexpr std::string_view kLlmAnnotatorPrefix = "llm:";

inline bool is_llm_annotator(std::string_view annotator) noexcept {
  return annotator.substr(0, kLlmAnnotatorPrefix.size()) == kLlmAnnotatorPrefix;
}

struct Annotation {
  std::string id;
  std::string question_id;
  std::string annotator;
  LabelClass label = LabelClass::M;
  std::optional<std::string> theme;
  Decision decision = Decision::Pending;
  Timestamp timestamp{};

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

/// Content hash of every annotation field except the id itself.
std::string annotation_id(const Annotation& a);

/// True when `candidate` replaces `current` for the same (question, annotator):
/// later timestamp wins, equal timestamps fall back to the larger id.
bool supersedes(const Annotation& candidate, const Annotation& current) noexcept;

}  // namespace cfq
