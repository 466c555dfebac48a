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

#include <string>
#include <string_view>
#include <vector>

#include "cfq/corpus.hpp"
#include "cfq/model.hpp"

namespace cfq {

enum class TableFormat { MarkdownPipe, Tsv, Csv };

std::string_view to_string(TableFormat f) noexcept;

/// How each input line was classified.
enum class LineKind { Blank, Prose, Header, Separator, Row, Malformed };

enum class MalformedReason { WrongColumnCount, NonNumericLineNumber, EmptyQuestion, UnterminatedQuote };

std::string_view to_string(MalformedReason r) noexcept;

struct MalformedLine {
  std::string raw;
  MalformedReason reason = MalformedReason::WrongColumnCount;
  /// 1-based index of the first input line of the record.
  int line = 0;
};

struct ParseReport {
  std::vector<ParsedRow> rows;
  std::vector<MalformedLine> malformed;
  TableFormat format_detected = TableFormat::MarkdownPipe;
  /// One entry per input line (see split_response_lines).
  std::vector<LineKind> line_kinds;
};

/// Lines as the parser sees them: split on '\n', a trailing '\r' dropped,
/// no phantom empty line after a final newline.
std::vector<std::string_view> split_response_lines(std::string_view raw);

/// Reads a (LineNumber, LineCode, Question) table out of a model reply.
///
/// The format is detected as MarkdownPipe (any line starting with '|'),
/// then Tsv (any line with two or more tabs), then Csv. Header rows and
/// markdown separator rows are skipped; prose around the table is ignored.
/// In the delimited formats a line outside a headed block only counts as a
/// data row when its first field is an integer. Every data record becomes
/// either a ParsedRow or a MalformedLine.
///
/// Throws NoTableFound when no data records exist. Never throws anything
/// else.
ParseReport parse_tabular_response(std::string_view raw);

/// Model-reported line matched against the real source after whitespace
/// normalization: the stated line if it matches, otherwise the single
/// matching line, otherwise Unanchored (also for duplicates and for an
/// empty line_code).
AnchorResult anchor_row(const ParsedRow& row, const CodeChallenge& challenge);

}  // namespace cfq
