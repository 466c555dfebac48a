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

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfq/bank.hpp"
#include "cfq/model.hpp"

namespace cfq {

/// counts[i][j]: questions labeled kLabelClasses[i] by source A and
/// kLabelClasses[j] by source B.
struct ConfusionMatrix {
  std::array<std::array<long, 4>, 4> counts{};

  [[nodiscard]] long total() const noexcept;
  [[nodiscard]] long trace() const noexcept;
  [[nodiscard]] long row_sum(std::size_t i) const noexcept;
  [[nodiscard]] long col_sum(std::size_t j) const noexcept;
  [[nodiscard]] ConfusionMatrix transposed() const noexcept;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Counts questions where both annotators have a current annotation.
ConfusionMatrix confusion_matrix(std::string_view source_a, std::string_view source_b, const StoreSnapshot& s);

/// Unweighted Cohen's kappa. nullopt when expected agreement is exactly 1
/// (both sources constant on the same class). Throws EmptyMatrix.
std::optional<double> cohen_kappa(const ConfusionMatrix& m);

/// trace / total. Throws EmptyMatrix.
double percent_agreement(const ConfusionMatrix& m);

struct AgreementReport {
  std::string annotator_a;
  std::string annotator_b;
  ConfusionMatrix matrix;
  /// Unset when the matrix is empty.
  std::optional<double> percent_agreement;
  std::optional<double> kappa;
};

AgreementReport agreement_report(std::string_view source_a, std::string_view source_b, const StoreSnapshot& s);

enum class Dimension { Theme, LabelClass, PromptCategory };

std::string_view to_string(Dimension d) noexcept;
std::optional<Dimension> parse_dimension(std::string_view s) noexcept;

struct ProportionFilter {
  std::optional<std::string> annotator;
  std::optional<Decision> decision;
};

struct ProportionReport {
  Dimension dimension = Dimension::Theme;
  /// Ordered keys: built-in values first in their canonical order, then
  /// any other keys sorted.
  std::vector<std::string> keys;
  std::map<std::string, long> counts;
  std::map<std::string, double> proportions;
  long total = 0;
};

/// Theme and LabelClass count current annotations passing the filter;
/// PromptCategory counts questions (those with at least one annotation
/// passing the filter when a filter is set). Throws EmptyDataset.
ProportionReport proportion_report(Dimension dimension, const StoreSnapshot& s, const ProportionFilter& filter = {});

/// The annotation that stands for a question in crosstabs and enhanced
/// documents: `annotator`'s if given, else that of the lexicographically
/// first non-llm annotator of the question.
const Annotation* designated_annotation(const StoreSnapshot& s, std::string_view question_id,
                                        const std::optional<std::string>& annotator = std::nullopt);

/// counts[rank(category)][index_of(label)].
using Crosstab = std::array<std::array<long, 4>, 5>;

Crosstab crosstab(const StoreSnapshot& s, const std::optional<std::string>& annotator = std::nullopt);

// CSV renderings used by the `report` command and the HTTP API.
std::string proportion_csv(const ProportionReport& r);   // key,count,proportion
std::string agreement_csv(const AgreementReport& r);     // matrix rows + summary lines
std::string crosstab_csv(const Crosstab& t);

}  // namespace cfq
