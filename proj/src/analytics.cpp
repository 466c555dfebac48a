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

#include "cfq/analytics.hpp"

#include <algorithm>

#include "cfq/error.hpp"
#include "cfq/util.hpp"

namespace cfq {

long ConfusionMatrix::total() const noexcept {
  long t = 0;
  for (const auto& row : counts)
    for (long c : row) t += c;
  return t;
}

long ConfusionMatrix::trace() const noexcept {
  long t = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
  return t;
}

long ConfusionMatrix::row_sum(std::size_t i) const noexcept {
  long t = 0;
  for (long c : counts[i]) t += c;
  return t;
}

long ConfusionMatrix::col_sum(std::size_t j) const noexcept {
  long t = 0;
  for (const auto& row : counts) t += row[j];
  return t;
}

ConfusionMatrix ConfusionMatrix::transposed() const noexcept {
  ConfusionMatrix t;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) t.counts[j][i] = counts[i][j];
  return t;
}

ConfusionMatrix confusion_matrix(std::string_view source_a, std::string_view source_b, const StoreSnapshot& s) {
  ConfusionMatrix m;
  for (const auto& [key, a] : s.annotations) {
    if (key.second != source_a) continue;
    auto it = s.annotations.find({key.first, std::string(source_b)});
    if (it == s.annotations.end()) continue;
    ++m.counts[static_cast<std::size_t>(index_of(a.label))][static_cast<std::size_t>(index_of(it->second.label))];
  }
  return m;
}

std::optional<double> cohen_kappa(const ConfusionMatrix& m) {
  const long n = m.total();
  if (n == 0) throw Error(ErrorCode::EmptyMatrix, "");
  // kappa = (po - pe) / (1 - pe), scaled by n^2 to stay in integers until
  // the final division.
  long chance = 0;
  for (std::size_t i = 0; i < 4; ++i) chance += m.row_sum(i) * m.col_sum(i);
  const long denom = n * n - chance;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(m.trace() * n - chance) / static_cast<double>(denom);
}

double percent_agreement(const ConfusionMatrix& m) {
  const long n = m.total();
  if (n == 0) throw Error(ErrorCode::EmptyMatrix, "");
  return static_cast<double>(m.trace()) / static_cast<double>(n);
}

AgreementReport agreement_report(std::string_view source_a, std::string_view source_b, const StoreSnapshot& s) {
  AgreementReport r;
  r.annotator_a = std::string(source_a);
  r.annotator_b = std::string(source_b);
  r.matrix = confusion_matrix(source_a, source_b, s);
  if (r.matrix.total() > 0) {
    r.percent_agreement = percent_agreement(r.matrix);
    r.kappa = cohen_kappa(r.matrix);
  }
  return r;
}

std::string_view to_string(Dimension d) noexcept {
  switch (d) {
    case Dimension::Theme: return "theme";
    case Dimension::LabelClass: return "label";
    case Dimension::PromptCategory: return "category";
  }
  return "";
}

std::optional<Dimension> parse_dimension(std::string_view s) noexcept {
  const auto lower = to_lower(s);
  if (lower == "theme") return Dimension::Theme;
  if (lower == "label" || lower == "labelclass") return Dimension::LabelClass;
  if (lower == "category" || lower == "promptcategory") return Dimension::PromptCategory;
  return std::nullopt;
}

namespace {

bool passes(const Annotation& a, const ProportionFilter& f) {
  if (f.annotator && a.annotator != *f.annotator) return false;
  if (f.decision && a.decision != *f.decision) return false;
  return true;
}

}  // namespace

ProportionReport proportion_report(Dimension dimension, const StoreSnapshot& s, const ProportionFilter& filter) {
  ProportionReport r;
  r.dimension = dimension;
  switch (dimension) {
    case Dimension::Theme: {
      for (const auto& t : builtin_themes()) r.keys.push_back(t.id);
      for (const auto& [id, t] : s.themes) {
        if (!t.builtin) r.keys.push_back(id);
      }
      for (const auto& k : r.keys) r.counts[k] = 0;
      for (const auto& [key, a] : s.annotations) {
        if (a.theme && passes(a, filter)) {
          if (!r.counts.count(*a.theme)) r.keys.push_back(*a.theme);
          ++r.counts[*a.theme];
        }
      }
      break;
    }
    case Dimension::LabelClass: {
      for (auto l : kLabelClasses) {
        r.keys.emplace_back(to_string(l));
        r.counts[r.keys.back()] = 0;
      }
      for (const auto& [key, a] : s.annotations) {
        if (passes(a, filter)) ++r.counts[std::string(to_string(a.label))];
      }
      break;
    }
    case Dimension::PromptCategory: {
      for (auto c : kPromptCategories) {
        r.keys.emplace_back(to_string(c));
        r.counts[r.keys.back()] = 0;
      }
      const bool filtered = filter.annotator || filter.decision;
      for (const auto& [id, q] : s.questions) {
        if (filtered) {
          const auto anns = s.annotations_for(id);
          if (std::none_of(anns.begin(), anns.end(), [&](const Annotation* a) { return passes(*a, filter); })) {
            continue;
          }
        }
        ++r.counts[std::string(to_string(q.category))];
      }
      break;
    }
  }
  for (const auto& [k, c] : r.counts) r.total += c;
  if (r.total == 0) throw Error(ErrorCode::EmptyDataset, std::string(to_string(dimension)));
  for (const auto& [k, c] : r.counts) r.proportions[k] = static_cast<double>(c) / static_cast<double>(r.total);
  return r;
}

const Annotation* designated_annotation(const StoreSnapshot& s, std::string_view question_id,
                                        const std::optional<std::string>& annotator) {
  if (annotator) {
    auto it = s.annotations.find({std::string(question_id), *annotator});
    return it == s.annotations.end() ? nullptr : &it->second;
  }
  // annotations_for is ordered by annotator, so the first human one wins.
  for (const auto* a : s.annotations_for(question_id)) {
    if (!is_llm_annotator(a->annotator)) return a;
  }
  return nullptr;
}

Crosstab crosstab(const StoreSnapshot& s, const std::optional<std::string>& annotator) {
  Crosstab t{};
  for (const auto& [id, q] : s.questions) {
    if (const auto* a = designated_annotation(s, id, annotator)) {
      ++t[static_cast<std::size_t>(rank(q.category))][static_cast<std::size_t>(index_of(a->label))];
    }
  }
  return t;
}

std::string proportion_csv(const ProportionReport& r) {
  std::string out = "key,count,proportion\n";
  for (const auto& k : r.keys) {
    out += csv::join_row({k, std::to_string(r.counts.at(k)), format_double(r.proportions.at(k))}) + "\n";
  }
  return out;
}

std::string agreement_csv(const AgreementReport& r) {
  std::string out = csv::join_row({r.annotator_a + " \\ " + r.annotator_b, "S", "PL", "G", "M"}) + "\n";
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<std::string> row{std::string(to_string(kLabelClasses[i]))};
    for (long c : r.matrix.counts[i]) row.push_back(std::to_string(c));
    out += csv::join_row(row) + "\n";
  }
  out += "total," + std::to_string(r.matrix.total()) + "\n";
  out += "percent_agreement," + (r.percent_agreement ? format_double(*r.percent_agreement) : "") + "\n";
  out += "kappa,";
  if (r.kappa) {
    out += format_double(*r.kappa);
  } else if (r.matrix.total() > 0) {
    out += "undefined";
  }
  out += "\n";
  return out;
}

std::string crosstab_csv(const Crosstab& t) {
  std::string out = "prompt_category,S,PL,G,M\n";
  for (std::size_t c = 0; c < t.size(); ++c) {
    out += std::string(to_string(kPromptCategories[c]));
    for (long v : t[c]) out += "," + std::to_string(v);
    out += "\n";
  }
  return out;
}

}  // namespace cfq
