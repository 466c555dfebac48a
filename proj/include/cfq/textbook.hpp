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
#include <vector>

#include "cfq/bank.hpp"
#include "cfq/model.hpp"

namespace cfq {

struct AttachedQuestion {
  std::string question_id;
  PromptCategory category = PromptCategory::CriticalThinkingPerspective;
  std::string question;
  AnchorStatus anchor_status = AnchorStatus::Unanchored;
  std::string annotator;
  LabelClass label = LabelClass::M;
  std::optional<std::string> theme;

  friend bool operator==(const AttachedQuestion&, const AttachedQuestion&) = default;
};

struct DocumentLine {
  SourceLine source;
  std::vector<AttachedQuestion> questions;

  friend bool operator==(const DocumentLine&, const DocumentLine&) = default;
};

struct EnhancedDocument {
  int schema_version = kSchemaVersion;
  std::string challenge_id;
  std::string title;
  std::vector<DocumentLine> lines;
  std::vector<AttachedQuestion> unanchored;
  Timestamp generated_at{};

  [[nodiscard]] std::size_t question_count() const noexcept;

  friend bool operator==(const EnhancedDocument&, const EnhancedDocument&) = default;
};

struct EnhanceFilter {
  std::optional<LabelClass> label;
  std::optional<std::string> theme;
  std::optional<PromptCategory> category;
  /// Reviewer whose decision counts; default is the designated annotation.
  std::optional<std::string> annotator;
};

/// Accepted questions of one challenge placed on their anchored lines.
/// A question is accepted when its designated annotation says so. Within a
/// line questions are ordered by prompt category, then id.
/// Throws UnknownChallenge.
EnhancedDocument enhance(std::string_view challenge_id, const StoreSnapshot& s, const EnhanceFilter& filter,
                         Timestamp generated_at);

enum class RenderFormat { Json, Html };

std::optional<RenderFormat> parse_render_format(std::string_view s) noexcept;

std::string render(const EnhancedDocument& doc, RenderFormat format);
std::string render_json(const EnhancedDocument& doc);
std::string render_html(const EnhancedDocument& doc);

/// Inverse of render_json. Throws ParseError, SchemaMismatch.
EnhancedDocument parse_document_json(std::string_view text);

}  // namespace cfq
