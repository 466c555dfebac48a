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

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cfq {

enum class FunctionalCategory { ObjectArithmetic, RepeatedCalculation, ComparisonsRules };

inline constexpr FunctionalCategory kFunctionalCategories[] = {
    FunctionalCategory::ObjectArithmetic, FunctionalCategory::RepeatedCalculation,
    FunctionalCategory::ComparisonsRules};

std::string_view to_string(FunctionalCategory c) noexcept;
std::string_view display_name(FunctionalCategory c) noexcept;
std::optional<FunctionalCategory> parse_functional_category(std::string_view s) noexcept;

enum class Provenance { Bundled, LlmGenerated, UserImported };

std::string_view to_string(Provenance p) noexcept;
std::optional<Provenance> parse_provenance(std::string_view s) noexcept;

struct SourceLine {
  int number = 0;
  std::string text;

  friend bool operator==(const SourceLine&, const SourceLine&) = default;
};

struct CodeChallenge {
  std::string id;
  std::string title;
  FunctionalCategory category = FunctionalCategory::ObjectArithmetic;
  std::string goal;
  std::vector<SourceLine> source;
  Provenance provenance = Provenance::Bundled;

  friend bool operator==(const CodeChallenge&, const CodeChallenge&) = default;
};

/// Splits on '\n' and numbers lines from 1. A single trailing newline does
/// not produce an empty final line; every other byte is kept.
/// Throws EmptySource.
std::vector<SourceLine> segment_source(std::string_view raw);

/// Inverse of segment_source (no trailing newline).
std::string join_source(const std::vector<SourceLine>& lines);

/// "Circle Area Calculator" -> "circle-area-calculator"
std::string slugify(std::string_view title);

bool is_valid_challenge_id(std::string_view id) noexcept;

/// Checks id syntax and 1..n line numbering. Throws InvalidArgument.
void validate_challenge(const CodeChallenge& c);

/// Immutable, id-unique list of challenges in file order.
class Catalog {
 public:
  Catalog() = default;
  /// Throws DuplicateId.
  explicit Catalog(std::vector<CodeChallenge> challenges);

  [[nodiscard]] const std::vector<CodeChallenge>& challenges() const noexcept { return challenges_; }
  [[nodiscard]] std::size_t size() const noexcept { return challenges_.size(); }
  [[nodiscard]] bool empty() const noexcept { return challenges_.empty(); }
  [[nodiscard]] const CodeChallenge* find(std::string_view id) const noexcept;

  [[nodiscard]] std::map<FunctionalCategory, int> category_counts() const;

 private:
  std::vector<CodeChallenge> challenges_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Throws UnknownChallenge.
const CodeChallenge& get_challenge(const Catalog& catalog, std::string_view id);

/// Parses the catalog text format (described in README.md).
/// Throws ParseError("line N: reason") and DuplicateId.
Catalog parse_catalog(std::string_view text);

/// Throws FileMissing, ParseError, DuplicateId.
Catalog load_catalog(const std::filesystem::path& path);

std::string serialize_catalog(const Catalog& catalog);

/// The 13 challenges shipped with the library.
const Catalog& bundled_catalog();
std::string_view bundled_catalog_text() noexcept;

}  // namespace cfq
