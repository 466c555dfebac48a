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

#include "cfq/bank.hpp"
#include "cfq/gateway.hpp"
#include "cfq/model.hpp"

namespace cfq {

/// Stores or supersedes the (question, annotator) annotation, stamped with
/// the store clock. Throws UnknownQuestion, UnknownTheme, InvalidArgument.
Annotation annotate(Store& store, std::string_view question_id, std::string_view annotator, LabelClass label,
                    const std::optional<std::string>& theme, Decision decision);

/// Current annotation of (question, annotator), if any.
std::optional<Annotation> current_annotation(const StoreSnapshot& s, std::string_view question_id,
                                             std::string_view annotator);

/// Registers a custom theme. Throws InvalidArgument (empty id), ReservedId,
/// DuplicateTheme.
Theme add_theme(Store& store, std::string_view id, std::string_view display_name, std::string_view description);

/// First whitespace-delimited token of `reply` that, uppercased and with
/// surrounding punctuation removed, is one of S, PL, G, M.
std::optional<LabelClass> extract_label(std::string_view reply);

struct SuggestOptions {
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.7;
  int max_output = 1024;
};

/// Asks the model for a label and stores it as a Pending annotation by
/// "llm:<model>". Throws UnknownQuestion, UnknownChallenge,
/// UnparsableLabel(raw reply) and any gateway error.
Annotation suggest_label(Store& store, std::string_view question_id, Gateway& gateway,
                         const SuggestOptions& options = {});

}  // namespace cfq
