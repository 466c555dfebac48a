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

#include "cfq/taxonomy.hpp"

#include <cctype>

#include "cfq/error.hpp"
#include "cfq/promptgen.hpp"

namespace cfq {

namespace {

void store_annotation(StoreSnapshot& s, const Annotation& a) {
  AnnotationKey key{a.question_id, a.annotator};
  auto it = s.annotations.find(key);
  if (it == s.annotations.end()) {
    s.annotations.emplace(std::move(key), a);
  } else if (supersedes(a, it->second)) {
    it->second = a;
  }
}

}  // namespace

Annotation annotate(Store& store, std::string_view question_id, std::string_view annotator, LabelClass label,
                    const std::optional<std::string>& theme, Decision decision) {
  if (trim(annotator).empty()) throw Error(ErrorCode::InvalidArgument, "annotator must not be empty");
  Annotation a;
  a.question_id = std::string(question_id);
  a.annotator = std::string(annotator);
  a.label = label;
  a.theme = theme;
  a.decision = decision;
  a.timestamp = store.now();
  a.id = annotation_id(a);
  store.mutate([&](StoreSnapshot& s) {
    if (!s.find_question(question_id)) throw Error(ErrorCode::UnknownQuestion, std::string(question_id));
    if (theme && !s.themes.count(*theme)) throw Error(ErrorCode::UnknownTheme, *theme);
    store_annotation(s, a);
  });
  return a;
}

std::optional<Annotation> current_annotation(const StoreSnapshot& s, std::string_view question_id,
                                             std::string_view annotator) {
  auto it = s.annotations.find({std::string(question_id), std::string(annotator)});
  if (it == s.annotations.end()) return std::nullopt;
  return it->second;
}

Theme add_theme(Store& store, std::string_view id, std::string_view display_name, std::string_view description) {
  if (trim(id).empty()) throw Error(ErrorCode::InvalidArgument, "theme id must not be empty");
  if (is_builtin_theme(id)) throw Error(ErrorCode::ReservedId, std::string(id));
  Theme t{std::string(id), display_name.empty() ? std::string(id) : std::string(display_name),
          std::string(description), false};
  store.mutate([&](StoreSnapshot& s) {
    if (!s.themes.emplace(t.id, t).second) throw Error(ErrorCode::DuplicateTheme, t.id);
  });
  return t;
}

std::optional<LabelClass> extract_label(std::string_view reply) {
  std::size_t i = 0;
  while (i < reply.size()) {
    while (i < reply.size() && std::isspace(static_cast<unsigned char>(reply[i]))) ++i;
    const std::size_t start = i;
    while (i < reply.size() && !std::isspace(static_cast<unsigned char>(reply[i]))) ++i;
    auto token = reply.substr(start, i - start);
    // "PL." or "(S)" or "**G**" still count.
    while (!token.empty() && std::ispunct(static_cast<unsigned char>(token.front()))) token.remove_prefix(1);
    while (!token.empty() && std::ispunct(static_cast<unsigned char>(token.back()))) token.remove_suffix(1);
    if (auto label = parse_label_class(to_upper(token))) return label;
  }
  return std::nullopt;
}

Annotation suggest_label(Store& store, std::string_view question_id, Gateway& gateway, const SuggestOptions& options) {
  const auto snap = store.snapshot();
  const auto* q = snap->find_question(question_id);
  if (q == nullptr) throw Error(ErrorCode::UnknownQuestion, std::string(question_id));
  const auto* challenge = snap->find_challenge(q->challenge_id);
  if (challenge == nullptr) throw Error(ErrorCode::UnknownChallenge, q->challenge_id);

  CompletionRequest request{build_label_suggestion_prompt(*q, *challenge), options.model, options.temperature,
                            options.max_output};
  const auto response = gateway.complete(request);
  store.put_raw_response(response.request_fingerprint, response.text);
  const auto label = extract_label(response.text);
  if (!label) throw Error(ErrorCode::UnparsableLabel, response.text);
  return annotate(store, question_id, std::string(kLlmAnnotatorPrefix) + options.model, *label, std::nullopt,
                  Decision::Pending);
}

}  // namespace cfq
