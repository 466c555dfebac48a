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

#include "cfq/qparser.hpp"

#include <algorithm>
#include <optional>

#include "cfq/error.hpp"
#include "cfq/util.hpp"

namespace cfq {

std::string_view to_string(TableFormat f) noexcept {
  switch (f) {
    case TableFormat::MarkdownPipe: return "MarkdownPipe";
    case TableFormat::Tsv: return "Tsv";
    case TableFormat::Csv: return "Csv";
  }
  return "";
}

std::string_view to_string(MalformedReason r) noexcept {
  switch (r) {
    case MalformedReason::WrongColumnCount: return "WrongColumnCount";
    case MalformedReason::NonNumericLineNumber: return "NonNumericLineNumber";
    case MalformedReason::EmptyQuestion: return "EmptyQuestion";
    case MalformedReason::UnterminatedQuote: return "UnterminatedQuote";
  }
  return "";
}

std::vector<std::string_view> split_response_lines(std::string_view raw) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < raw.size()) {
    auto nl = raw.find('\n', start);
    auto line = raw.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

namespace {

bool is_header(const std::vector<std::string>& cells) {
  static constexpr std::string_view kNames[] = {"linenumber", "linecode", "question"};
  if (cells.size() != 3) return false;
  for (std::size_t i = 0; i < 3; ++i) {
    std::string name;
    for (char c : to_lower(trim(cells[i]))) {
      if (c != ' ' && c != '_' && c != '*' && c != '`' && c != '"') name.push_back(c);
    }
    if (name != kNames[i]) return false;
  }
  return true;
}

bool is_separator(const std::vector<std::string>& cells) {
  if (cells.empty()) return false;
  for (const auto& raw : cells) {
    auto c = trim(raw);
    if (!c.empty() && c.front() == ':') c.remove_prefix(1);
    if (!c.empty() && c.back() == ':') c.remove_suffix(1);
    if (c.empty() || c.find_first_not_of('-') != std::string_view::npos) return false;
  }
  return true;
}

std::string strip_backticks(std::string_view s) {
  s = trim(s);
  std::size_t lead = 0;
  while (lead < s.size() && s[lead] == '`') ++lead;
  std::size_t tail = 0;
  while (tail < s.size() - lead && s[s.size() - 1 - tail] == '`') ++tail;
  if (lead > 0 && lead == tail) s = trim(s.substr(lead, s.size() - lead - tail));
  return std::string(s);
}

struct RowOutcome {
  std::optional<ParsedRow> row;
  MalformedReason reason = MalformedReason::WrongColumnCount;
};

RowOutcome build_row(const std::vector<std::string>& cells) {
  if (cells.size() != 3) return {std::nullopt, MalformedReason::WrongColumnCount};
  auto number = parse_integer(strip_backticks(cells[0]));
  if (!number) return {std::nullopt, MalformedReason::NonNumericLineNumber};
  auto question = std::string(trim(cells[2]));
  if (question.empty()) return {std::nullopt, MalformedReason::EmptyQuestion};
  return {ParsedRow{*number, strip_backticks(cells[1]), std::move(question)}, {}};
}

/// Cells of a pipe-table line; `\|` is a literal pipe.
std::vector<std::string> split_pipe_cells(std::string_view line) {
  line = trim(line);
  if (!line.empty() && line.front() == '|') line.remove_prefix(1);
  if (!line.empty() && line.back() == '|' && !(line.size() >= 2 && line[line.size() - 2] == '\\')) {
    line.remove_suffix(1);
  }
  std::vector<std::string> cells(1);
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && i + 1 < line.size() && line[i + 1] == '|') {
      cells.back().push_back('|');
      ++i;
    } else if (line[i] == '|') {
      cells.emplace_back();
    } else {
      cells.back().push_back(line[i]);
    }
  }
  return cells;
}

bool is_pipe_line(std::string_view line) {
  auto t = trim(line);
  return !t.empty() && t.front() == '|' && std::count(t.begin(), t.end(), '|') >= 2;
}

TableFormat detect_format(const std::vector<std::string_view>& lines) {
  if (std::any_of(lines.begin(), lines.end(), is_pipe_line)) return TableFormat::MarkdownPipe;
  if (std::any_of(lines.begin(), lines.end(),
                  [](std::string_view l) { return std::count(l.begin(), l.end(), '\t') >= 2; })) {
    return TableFormat::Tsv;
  }
  return TableFormat::Csv;
}

void add_outcome(ParseReport& report, RowOutcome outcome, std::string raw, std::size_t first, std::size_t last) {
  const LineKind kind = outcome.row ? LineKind::Row : LineKind::Malformed;
  for (std::size_t i = first; i <= last; ++i) report.line_kinds[i] = kind;
  if (outcome.row) {
    report.rows.push_back(std::move(*outcome.row));
  } else {
    report.malformed.push_back({std::move(raw), outcome.reason, static_cast<int>(first + 1)});
  }
}

void parse_markdown(const std::vector<std::string_view>& lines, ParseReport& report) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto t = trim(lines[i]);
    if (t.empty()) {
      report.line_kinds[i] = LineKind::Blank;
      continue;
    }
    if (t.front() != '|') {
      report.line_kinds[i] = LineKind::Prose;
      continue;
    }
    auto cells = split_pipe_cells(t);
    if (is_separator(cells)) {
      report.line_kinds[i] = LineKind::Separator;
    } else if (is_header(cells)) {
      report.line_kinds[i] = LineKind::Header;
    } else {
      add_outcome(report, build_row(cells), std::string(lines[i]), i, i);
    }
  }
}

std::vector<std::string> split_plain(std::string_view line, char delim) {
  std::vector<std::string> fields(1);
  for (char c : line) {
    if (c == delim) {
      fields.emplace_back();
    } else {
      fields.back().push_back(c);
    }
  }
  return fields;
}

void parse_delimited(const std::vector<std::string_view>& lines, char delim, ParseReport& report) {
  const bool quoting = delim == ',';
  bool in_table = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = lines[i];
    if (trim(line).empty()) {
      report.line_kinds[i] = LineKind::Blank;
      in_table = false;
      continue;
    }
    // Header and separator checks ignore quoting so a stray quote in prose
    // cannot swallow following lines.
    auto plain = split_plain(line, delim);
    if (is_header(plain)) {
      report.line_kinds[i] = LineKind::Header;
      in_table = true;
      continue;
    }
    if (plain.size() >= 2 && is_separator(plain)) {
      report.line_kinds[i] = LineKind::Separator;
      continue;
    }
    if (in_table && plain.size() < 2) {
      // A line without any delimiter ends the block.
      report.line_kinds[i] = LineKind::Prose;
      in_table = false;
      continue;
    }
    if (!in_table) {
      const auto first = line.substr(0, line.find(delim));
      if (plain.size() < 3 || !parse_integer(strip_backticks(first))) {
        report.line_kinds[i] = LineKind::Prose;
        continue;
      }
    }

    if (!quoting) {
      add_outcome(report, build_row(plain), std::string(line), i, i);
      continue;
    }
    std::string record(line);
    std::size_t last = i;
    auto fields = csv::split_record(record, delim);
    while (!fields && last + 1 < lines.size()) {
      ++last;
      record.push_back('\n');
      record.append(lines[last]);
      fields = csv::split_record(record, delim);
    }
    if (!fields) {
      add_outcome(report, {std::nullopt, MalformedReason::UnterminatedQuote}, std::move(record), i, last);
    } else {
      add_outcome(report, build_row(*fields), std::move(record), i, last);
    }
    i = last;
  }
}

}  // namespace

ParseReport parse_tabular_response(std::string_view raw) {
  const auto lines = split_response_lines(raw);
  ParseReport report;
  report.line_kinds.assign(lines.size(), LineKind::Prose);
  report.format_detected = detect_format(lines);
  switch (report.format_detected) {
    case TableFormat::MarkdownPipe: parse_markdown(lines, report); break;
    case TableFormat::Tsv: parse_delimited(lines, '\t', report); break;
    case TableFormat::Csv: parse_delimited(lines, ',', report); break;
  }
  if (report.rows.empty() && report.malformed.empty()) {
    throw Error(ErrorCode::NoTableFound, "no data rows in " + std::string(to_string(report.format_detected)) +
                                             " response");
  }
  return report;
}

AnchorResult anchor_row(const ParsedRow& row, const CodeChallenge& challenge) {
  const auto code = collapse_whitespace(row.line_code);
  if (code.empty()) return AnchorResult::unanchored();
  const auto n = static_cast<long long>(challenge.source.size());
  if (row.line_number >= 1 && row.line_number <= n &&
      collapse_whitespace(challenge.source[static_cast<std::size_t>(row.line_number - 1)].text) == code) {
    return AnchorResult::anchored(static_cast<int>(row.line_number));
  }
  std::optional<int> match;
  for (const auto& line : challenge.source) {
    if (collapse_whitespace(line.text) != code) continue;
    if (match) return AnchorResult::unanchored();
    match = line.number;
  }
  return match ? AnchorResult::relocated(*match) : AnchorResult::unanchored();
}

}  // namespace cfq
