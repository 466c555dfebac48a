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

#include "cfq/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include "cfq/error.hpp"
#include "cfq/util.hpp"

namespace cfq {

std::string_view to_string(FunctionalCategory c) noexcept {
  switch (c) {
    case FunctionalCategory::ObjectArithmetic: return "ObjectArithmetic";
    case FunctionalCategory::RepeatedCalculation: return "RepeatedCalculation";
    case FunctionalCategory::ComparisonsRules: return "ComparisonsRules";
  }
  return "";
}

std::string_view display_name(FunctionalCategory c) noexcept {
  switch (c) {
    case FunctionalCategory::ObjectArithmetic: return "Object and Arithmetic";
    case FunctionalCategory::RepeatedCalculation: return "Repeated Calculation";
    case FunctionalCategory::ComparisonsRules: return "Comparisons and Rules";
  }
  return "";
}

std::optional<FunctionalCategory> parse_functional_category(std::string_view s) noexcept {
  for (auto c : kFunctionalCategories) {
    if (s == to_string(c)) return c;
  }
  return std::nullopt;
}

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::Bundled: return "Bundled";
    case Provenance::LlmGenerated: return "LlmGenerated";
    case Provenance::UserImported: return "UserImported";
  }
  return "";
}

std::optional<Provenance> parse_provenance(std::string_view s) noexcept {
  for (auto p : {Provenance::Bundled, Provenance::LlmGenerated, Provenance::UserImported}) {
    if (s == to_string(p)) return p;
  }
  return std::nullopt;
}

std::vector<SourceLine> segment_source(std::string_view raw) {
  if (!raw.empty() && raw.back() == '\n') raw.remove_suffix(1);
  if (raw.empty()) throw Error(ErrorCode::EmptySource, "");
  std::vector<SourceLine> lines;
  int number = 1;
  std::size_t start = 0;
  while (true) {
    const auto nl = raw.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back({number, std::string(raw.substr(start))});
      break;
    }
    lines.push_back({number++, std::string(raw.substr(start, nl - start))});
    start = nl + 1;
  }
  return lines;
}

std::string join_source(const std::vector<SourceLine>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out.push_back('\n');
    out += lines[i].text;
  }
  return out;
}

std::string slugify(std::string_view title) {
  std::string out;
  bool pending_hyphen = false;
  for (unsigned char c : title) {
    if (std::isalnum(c)) {
      if (pending_hyphen && !out.empty()) out.push_back('-');
      pending_hyphen = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending_hyphen = true;
    }
  }
  return out;
}

bool is_valid_challenge_id(std::string_view id) noexcept {
  if (id.empty()) return false;
  for (char c : id) {
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-')) return false;
  }
  return true;
}

void validate_challenge(const CodeChallenge& c) {
  if (!is_valid_challenge_id(c.id)) throw Error(ErrorCode::InvalidArgument, "invalid challenge id '" + c.id + "'");
  if (c.source.empty()) throw Error(ErrorCode::EmptySource, c.id);
  for (std::size_t i = 0; i < c.source.size(); ++i) {
    if (c.source[i].number != static_cast<int>(i + 1)) {
      throw Error(ErrorCode::InvalidArgument, c.id + ": line numbers must be 1..n without gaps");
    }
    if (c.source[i].text.find('\n') != std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, c.id + ": source line contains a newline");
    }
  }
}

Catalog::Catalog(std::vector<CodeChallenge> challenges) : challenges_(std::move(challenges)) {
  for (std::size_t i = 0; i < challenges_.size(); ++i) {
    if (!index_.emplace(challenges_[i].id, i).second) throw Error(ErrorCode::DuplicateId, challenges_[i].id);
  }
}

const CodeChallenge* Catalog::find(std::string_view id) const noexcept {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &challenges_[it->second];
}

std::map<FunctionalCategory, int> Catalog::category_counts() const {
  std::map<FunctionalCategory, int> counts;
  for (auto c : kFunctionalCategories) counts[c] = 0;
  for (const auto& ch : challenges_) ++counts[ch.category];
  return counts;
}

const CodeChallenge& get_challenge(const Catalog& catalog, std::string_view id) {
  const auto* c = catalog.find(id);
  if (c == nullptr) throw Error(ErrorCode::UnknownChallenge, std::string(id));
  return *c;
}

namespace {

constexpr std::string_view kBlockOpen = "<<<";
constexpr std::string_view kBlockClose = ">>>";

[[noreturn]] void parse_fail(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + reason);
}

struct PendingChallenge {
  std::size_t start_line = 0;
  std::map<std::string, std::string, std::less<>> fields;
};

CodeChallenge finish(const PendingChallenge& p) {
  auto field = [&](std::string_view key) -> const std::string* {
    auto it = p.fields.find(key);
    return it == p.fields.end() ? nullptr : &it->second;
  };
  CodeChallenge c;
  const auto* title = field("title");
  if (title == nullptr || title->empty()) parse_fail(p.start_line, "challenge has no title");
  c.title = *title;
  const auto* id = field("id");
  c.id = id != nullptr ? *id : slugify(c.title);
  if (!is_valid_challenge_id(c.id)) parse_fail(p.start_line, "invalid id '" + c.id + "'");
  const auto* cat = field("category");
  if (cat == nullptr) parse_fail(p.start_line, "challenge '" + c.id + "' has no category");
  auto parsed_cat = parse_functional_category(*cat);
  if (!parsed_cat) parse_fail(p.start_line, "unknown category '" + *cat + "'");
  c.category = *parsed_cat;
  if (const auto* goal = field("goal")) c.goal = *goal;
  if (const auto* prov = field("provenance")) {
    auto parsed = parse_provenance(*prov);
    if (!parsed) parse_fail(p.start_line, "unknown provenance '" + *prov + "'");
    c.provenance = *parsed;
  }
  const auto* source = field("source");
  if (source == nullptr) parse_fail(p.start_line, "challenge '" + c.id + "' has no source block");
  try {
    c.source = segment_source(*source);
  } catch (const Error&) {
    parse_fail(p.start_line, "challenge '" + c.id + "' has an empty source block");
  }
  return c;
}

}  // namespace

Catalog parse_catalog(std::string_view text) {
  std::vector<CodeChallenge> out;
  std::optional<PendingChallenge> cur;

  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= text.size();) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const auto line = lines[i];
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t == "[challenge]") {
      if (cur) out.push_back(finish(*cur));
      cur = PendingChallenge{lineno, {}};
      continue;
    }
    if (!cur) parse_fail(lineno, "expected [challenge]");

    std::string key;
    std::string value;
    if (t.size() > kBlockOpen.size() && t.substr(t.size() - kBlockOpen.size()) == kBlockOpen) {
      key = std::string(trim(t.substr(0, t.size() - kBlockOpen.size())));
      std::size_t j = i + 1;
      bool closed = false;
      std::string block;
      for (; j < lines.size(); ++j) {
        if (lines[j] == kBlockClose) {
          closed = true;
          break;
        }
        if (j > i + 1) block.push_back('\n');
        block.append(lines[j]);
      }
      if (!closed) parse_fail(lineno, "unterminated block for '" + key + "'");
      value = std::move(block);
      i = j;
    } else {
      const auto colon = t.find(':');
      if (colon == std::string_view::npos) parse_fail(lineno, "expected 'key: value'");
      key = std::string(trim(t.substr(0, colon)));
      value = std::string(trim(t.substr(colon + 1)));
    }
    static constexpr std::string_view kKeys[] = {"id", "title", "category", "goal", "source", "provenance"};
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      parse_fail(lineno, "unknown key '" + key + "'");
    }
    if (!cur->fields.emplace(key, std::move(value)).second) parse_fail(lineno, "duplicate key '" + key + "'");
  }
  if (cur) out.push_back(finish(*cur));
  return Catalog(std::move(out));
}

Catalog load_catalog(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::FileMissing, path.string());
  return parse_catalog(read_file(path));
}

std::string serialize_catalog(const Catalog& catalog) {
  std::string out;
  for (const auto& c : catalog.challenges()) {
    if (!out.empty()) out += "\n";
    out += "[challenge]\n";
    out += "id: " + c.id + "\n";
    out += "title: " + c.title + "\n";
    out += "category: " + std::string(to_string(c.category)) + "\n";
    if (c.provenance != Provenance::Bundled) out += "provenance: " + std::string(to_string(c.provenance)) + "\n";
    out += "goal <<<\n" + c.goal + "\n>>>\n";
    out += "source <<<\n" + join_source(c.source) + "\n>>>\n";
  }
  return out;
}

const Catalog& bundled_catalog() {
  static const Catalog catalog = parse_catalog(bundled_catalog_text());
  return catalog;
}

}  // namespace cfq
