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

#include "cfq/textbook.hpp"

#include <algorithm>
#include <json.hpp>

#include "cfq/analytics.hpp"
#include "cfq/error.hpp"
#include "cfq/util.hpp"

namespace cfq {

using json = nlohmann::ordered_json;

std::size_t EnhancedDocument::question_count() const noexcept {
  std::size_t n = unanchored.size();
  for (const auto& l : lines) n += l.questions.size();
  return n;
}

namespace {

bool by_hierarchy(const AttachedQuestion& a, const AttachedQuestion& b) {
  if (a.category != b.category) return rank(a.category) < rank(b.category);
  return a.question_id < b.question_id;
}

}  // namespace

EnhancedDocument enhance(std::string_view challenge_id, const StoreSnapshot& s, const EnhanceFilter& filter,
                         Timestamp generated_at) {
  const auto* challenge = s.find_challenge(challenge_id);
  if (challenge == nullptr) throw Error(ErrorCode::UnknownChallenge, std::string(challenge_id));

  EnhancedDocument doc;
  doc.challenge_id = challenge->id;
  doc.title = challenge->title;
  doc.generated_at = generated_at;
  for (const auto& line : challenge->source) doc.lines.push_back({line, {}});

  for (const auto& [id, q] : s.questions) {
    if (q.challenge_id != challenge->id) continue;
    if (filter.category && q.category != *filter.category) continue;
    const auto* a = designated_annotation(s, id, filter.annotator);
    if (a == nullptr || a->decision != Decision::Accepted) continue;
    if (filter.label && a->label != *filter.label) continue;
    if (filter.theme && a->theme != filter.theme) continue;

    AttachedQuestion aq{q.id, q.category, q.row.question, q.anchor.status, a->annotator, a->label, a->theme};
    const auto line = q.anchor.line;
    if (q.anchor.status != AnchorStatus::Unanchored && line && *line >= 1 &&
        static_cast<std::size_t>(*line) <= doc.lines.size()) {
      doc.lines[static_cast<std::size_t>(*line - 1)].questions.push_back(std::move(aq));
    } else {
      aq.anchor_status = AnchorStatus::Unanchored;
      doc.unanchored.push_back(std::move(aq));
    }
  }
  for (auto& l : doc.lines) std::sort(l.questions.begin(), l.questions.end(), by_hierarchy);
  std::sort(doc.unanchored.begin(), doc.unanchored.end(), by_hierarchy);
  return doc;
}

std::optional<RenderFormat> parse_render_format(std::string_view s) noexcept {
  const auto lower = to_lower(s);
  if (lower == "json") return RenderFormat::Json;
  if (lower == "html") return RenderFormat::Html;
  return std::nullopt;
}

std::string render(const EnhancedDocument& doc, RenderFormat format) {
  return format == RenderFormat::Json ? render_json(doc) : render_html(doc);
}

namespace {

json question_json(const AttachedQuestion& q) {
  return json{{"question_id", q.question_id},
              {"prompt_category", to_string(q.category)},
              {"question", q.question},
              {"anchor_status", to_string(q.anchor_status)},
              {"annotator", q.annotator},
              {"label", to_string(q.label)},
              {"theme", q.theme ? json(*q.theme) : json()}};
}

template <class T, class Parse>
T enum_field(const json& j, const char* key, Parse parse) {
  const auto text = j.at(key).get<std::string>();
  auto v = parse(text);
  if (!v) throw Error(ErrorCode::ParseError, std::string("bad ") + key + " '" + text + "'");
  return *v;
}

AttachedQuestion question_from(const json& j) {
  AttachedQuestion q;
  q.question_id = j.at("question_id").get<std::string>();
  q.category = enum_field<PromptCategory>(j, "prompt_category", parse_prompt_category);
  q.question = j.at("question").get<std::string>();
  q.anchor_status = enum_field<AnchorStatus>(j, "anchor_status", parse_anchor_status);
  q.annotator = j.at("annotator").get<std::string>();
  q.label = enum_field<LabelClass>(j, "label", parse_label_class);
  if (!j.at("theme").is_null()) q.theme = j.at("theme").get<std::string>();
  return q;
}

}  // namespace

std::string render_json(const EnhancedDocument& doc) {
  json j;
  j["schema_version"] = doc.schema_version;
  j["challenge_id"] = doc.challenge_id;
  j["title"] = doc.title;
  j["generated_at"] = format_timestamp(doc.generated_at);
  j["lines"] = json::array();
  for (const auto& l : doc.lines) {
    json line{{"number", l.source.number}, {"text", l.source.text}, {"questions", json::array()}};
    for (const auto& q : l.questions) line["questions"].push_back(question_json(q));
    j["lines"].push_back(std::move(line));
  }
  j["unanchored"] = json::array();
  for (const auto& q : doc.unanchored) j["unanchored"].push_back(question_json(q));
  return j.dump(2) + "\n";
}

EnhancedDocument parse_document_json(std::string_view text) {
  EnhancedDocument doc;
  try {
    auto j = json::parse(text);
    doc.schema_version = j.at("schema_version").get<int>();
    if (doc.schema_version != kSchemaVersion) {
      throw Error(ErrorCode::SchemaMismatch, "document schema " + std::to_string(doc.schema_version));
    }
    doc.challenge_id = j.at("challenge_id").get<std::string>();
    doc.title = j.at("title").get<std::string>();
    auto ts = parse_timestamp(j.at("generated_at").get<std::string>());
    if (!ts) throw Error(ErrorCode::ParseError, "bad generated_at");
    doc.generated_at = *ts;
    for (const auto& l : j.at("lines")) {
      DocumentLine line{{l.at("number").get<int>(), l.at("text").get<std::string>()}, {}};
      for (const auto& q : l.at("questions")) line.questions.push_back(question_from(q));
      doc.lines.push_back(std::move(line));
    }
    for (const auto& q : j.at("unanchored")) doc.unanchored.push_back(question_from(q));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return doc;
}

namespace {

std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

constexpr std::string_view kStyle = R"(
body { font-family: system-ui, sans-serif; margin: 2rem; color: #222; }
table.code { border-collapse: collapse; width: 100%; }
table.code td { vertical-align: top; padding: 0 .5rem; }
td.ln { color: #888; text-align: right; user-select: none; width: 3rem; }
td.src pre { margin: 0; font-family: ui-monospace, monospace; white-space: pre-wrap; }
tr.has-q td.ln { color: #0b5; font-weight: bold; }
details.q { margin: .25rem 0 .5rem 1rem; border-left: 3px solid #0b5; padding-left: .5rem; }
details.q summary { cursor: pointer; font-size: .85rem; }
details.q p { margin: .25rem 0; }
.tag { display: inline-block; border-radius: 3px; padding: 0 .3rem; margin-right: .3rem; background: #eee; }
.tag.label { background: #dfe; }
.tag.theme { background: #def; }
section.unanchored { margin-top: 2rem; }
)";

void render_question(std::string& out, const AttachedQuestion& q) {
  out += "<details class=\"q\" id=\"q-" + html_escape(q.question_id) + "\" data-label=\"" +
         std::string(to_string(q.label)) + "\" data-theme=\"" + html_escape(q.theme.value_or("")) +
         "\" data-category=\"" + std::string(to_string(q.category)) + "\">";
  out += "<summary><span class=\"tag label\">" + std::string(to_string(q.label)) + "</span>";
  if (q.theme) out += "<span class=\"tag theme\">" + html_escape(*q.theme) + "</span>";
  out += "<span class=\"tag cat\">" + std::string(display_name(q.category)) + "</span></summary>";
  out += "<p>" + html_escape(q.question) + "</p></details>\n";
}

}  // namespace

std::string render_html(const EnhancedDocument& doc) {
  std::string out;
  out += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
  out += "<title>" + html_escape(doc.title) + "</title>\n<style>" + std::string(kStyle) + "</style>\n</head>\n";
  out += "<body>\n<h1>" + html_escape(doc.title) + "</h1>\n";
  out += "<table class=\"code\" data-challenge=\"" + html_escape(doc.challenge_id) + "\">\n";
  for (const auto& l : doc.lines) {
    const auto n = std::to_string(l.source.number);
    out += std::string("<tr id=\"L") + n + "\"" + (l.questions.empty() ? "" : " class=\"has-q\"") + ">";
    out += "<td class=\"ln\">" + n + "</td><td class=\"src\"><pre>" + html_escape(l.source.text) + "</pre>";
    if (!l.questions.empty()) {
      out += "\n";
      for (const auto& q : l.questions) render_question(out, q);
    }
    out += "</td></tr>\n";
  }
  out += "</table>\n";
  if (!doc.unanchored.empty()) {
    out += "<section class=\"unanchored\">\n<h2>Questions about the whole program</h2>\n";
    for (const auto& q : doc.unanchored) render_question(out, q);
    out += "</section>\n";
  }
  out += "<footer><small>Generated " + format_timestamp(doc.generated_at) + "</small></footer>\n";
  out += "</body>\n</html>\n";
  return out;
}

}  // namespace cfq
