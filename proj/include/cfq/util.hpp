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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cfq {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Clock = std::function<Timestamp()>;

/// Wall clock truncated to milliseconds.
Timestamp system_now();

/// "2026-10-15T08:30:00.123Z"
std::string format_timestamp(Timestamp t);
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

std::string_view trim(std::string_view s) noexcept;

/// Trim, then collapse every run of whitespace to a single space.
std::string collapse_whitespace(std::string_view s);

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);

std::optional<long long> parse_integer(std::string_view s) noexcept;

/// Shortest round-trip decimal form of `v`.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);

/// Writes `data` to a temporary sibling, flushes it and renames it over
/// `path`. Readers see either the previous file or the new one.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

namespace csv {

/// RFC 4180 field quoting: quoted only when the field contains a comma,
/// a quote, CR or LF.
std::string escape(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

/// Splits one logical record. Returns nullopt when a quoted field is still
/// open at the end of `record` (the caller may append the next line).
std::optional<std::vector<std::string>> split_record(std::string_view record, char delim = ',');

}  // namespace csv

}  // namespace cfq
