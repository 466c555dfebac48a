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

#include "cfq/bank.hpp"

#include <algorithm>
#include <json.hpp>
#include <set>

#include "cfq/error.hpp"

namespace cfq {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

StoreSnapshot StoreSnapshot::fresh(const Catalog& seed) {
  StoreSnapshot s;
  for (const auto& c : seed.challenges()) s.challenges.emplace(c.id, c);
  for (const auto& t : builtin_themes()) s.themes.emplace(t.id, t);
  return s;
}

const GeneratedQuestion* StoreSnapshot::find_question(std::string_view id) const {
  auto it = questions.find(id);
  return it == questions.end() ? nullptr : &it->second;
}

const CodeChallenge* StoreSnapshot::find_challenge(std::string_view id) const {
  auto it = challenges.find(id);
  return it == challenges.end() ? nullptr : &it->second;
}

std::vector<const Annotation*> StoreSnapshot::annotations_for(std::string_view question_id) const {
  std::vector<const Annotation*> out;
  for (auto it = annotations.lower_bound({std::string(question_id), std::string()});
       it != annotations.end() && it->first.first == question_id; ++it) {
    out.push_back(&it->second);
  }
  return out;
}

bool StoreSnapshot::has_response(std::string_view fp) const {
  return std::binary_search(responses.begin(), responses.end(), fp);
}

void StoreSnapshot::check_integrity() const {
  for (const auto& [id, q] : questions) {
    if (!challenges.count(q.challenge_id)) {
      throw Error(ErrorCode::IntegrityError, "question " + id + " references unknown challenge " + q.challenge_id);
    }
  }
  for (const auto& [key, a] : annotations) {
    if (!questions.count(key.first)) {
      throw Error(ErrorCode::IntegrityError, "annotation references unknown question " + key.first);
    }
    if (a.theme && !themes.count(*a.theme)) {
      throw Error(ErrorCode::IntegrityError, "annotation references unknown theme " + *a.theme);
    }
  }
}

namespace {

json challenge_json(const CodeChallenge& c) {
  return json{{"id", c.id},
              {"title", c.title},
              {"category", to_string(c.category)},
              {"provenance", to_string(c.provenance)},
              {"goal", c.goal},
              {"source", join_source(c.source)}};
}

json question_json(const GeneratedQuestion& q) {
  return json{{"id", q.id},
              {"challenge_id", q.challenge_id},
              {"category", to_string(q.category)},
              {"line_number", q.row.line_number},
              {"line_code", q.row.line_code},
              {"question", q.row.question},
              {"anchor_status", to_string(q.anchor.status)},
              {"anchored_line", q.anchor.line ? json(*q.anchor.line) : json()},
              {"response_fingerprint", q.response_fingerprint}};
}

json annotation_json(const Annotation& a) {
  return json{{"id", a.id},
              {"question_id", a.question_id},
              {"annotator", a.annotator},
              {"label", to_string(a.label)},
              {"theme", a.theme ? json(*a.theme) : json()},
              {"decision", to_string(a.decision)},
              {"timestamp", format_timestamp(a.timestamp)}};
}

template <class T, class Parse>
T parse_enum(const json& j, const char* key, Parse parse) {
  const auto text = j.at(key).get<std::string>();
  auto v = parse(text);
  if (!v) throw Error(ErrorCode::ParseError, std::string("bad ") + key + " '" + text + "'");
  return *v;
}

AnchorResult anchor_from(AnchorStatus status, std::optional<int> line) {
  if (status == AnchorStatus::Unanchored) {
    if (line) throw Error(ErrorCode::ParseError, "Unanchored question with an anchored line");
    return AnchorResult::unanchored();
  }
  if (!line) throw Error(ErrorCode::ParseError, "anchored question without a line");
  return {status, line};
}

}  // namespace

std::string snapshot_to_json(const StoreSnapshot& s) {
  json doc;
  doc["schema_version"] = s.schema_version;
  doc["challenges"] = json::array();
  for (const auto& [id, c] : s.challenges) doc["challenges"].push_back(challenge_json(c));
  doc["themes"] = json::array();
  for (const auto& [id, t] : s.themes) {
    doc["themes"].push_back(
        json{{"id", t.id}, {"display_name", t.display_name}, {"description", t.description}, {"builtin", t.builtin}});
  }
  doc["questions"] = json::array();
  for (const auto& [id, q] : s.questions) doc["questions"].push_back(question_json(q));
  doc["annotations"] = json::array();
  for (const auto& [key, a] : s.annotations) doc["annotations"].push_back(annotation_json(a));
  doc["responses"] = s.responses;
  return doc.dump(2) + "\n";
}

StoreSnapshot snapshot_from_json(std::string_view text) {
  StoreSnapshot s;
  try {
    auto doc = json::parse(text);
    s.schema_version = doc.at("schema_version").get<int>();
    if (s.schema_version != kSchemaVersion) {
      throw Error(ErrorCode::SchemaMismatch, "store schema " + std::to_string(s.schema_version) + ", expected " +
                                                 std::to_string(kSchemaVersion));
    }
    for (const auto& j : doc.at("challenges")) {
      CodeChallenge c;
      c.id = j.at("id").get<std::string>();
      c.title = j.at("title").get<std::string>();
      c.category = parse_enum<FunctionalCategory>(j, "category", parse_functional_category);
      c.provenance = parse_enum<Provenance>(j, "provenance", parse_provenance);
      c.goal = j.at("goal").get<std::string>();
      c.source = segment_source(j.at("source").get<std::string>());
      validate_challenge(c);
      s.challenges.emplace(c.id, std::move(c));
    }
    for (const auto& t : builtin_themes()) s.themes.emplace(t.id, t);
    for (const auto& j : doc.at("themes")) {
      Theme t{j.at("id").get<std::string>(), j.at("display_name").get<std::string>(),
              j.at("description").get<std::string>(), j.at("builtin").get<bool>()};
      if (!t.builtin) s.themes.emplace(t.id, std::move(t));
    }
    for (const auto& j : doc.at("questions")) {
      GeneratedQuestion q;
      q.id = j.at("id").get<std::string>();
      q.challenge_id = j.at("challenge_id").get<std::string>();
      q.category = parse_enum<PromptCategory>(j, "category", parse_prompt_category);
      q.row.line_number = j.at("line_number").get<long long>();
      q.row.line_code = j.at("line_code").get<std::string>();
      q.row.question = j.at("question").get<std::string>();
      const auto& line = j.at("anchored_line");
      q.anchor = anchor_from(parse_enum<AnchorStatus>(j, "anchor_status", parse_anchor_status),
                             line.is_null() ? std::nullopt : std::optional<int>(line.get<int>()));
      q.response_fingerprint = j.at("response_fingerprint").get<std::string>();
      s.questions.emplace(q.id, std::move(q));
    }
    for (const auto& j : doc.at("annotations")) {
      Annotation a;
      a.id = j.at("id").get<std::string>();
      a.question_id = j.at("question_id").get<std::string>();
      a.annotator = j.at("annotator").get<std::string>();
      a.label = parse_enum<LabelClass>(j, "label", parse_label_class);
      if (!j.at("theme").is_null()) a.theme = j.at("theme").get<std::string>();
      a.decision = parse_enum<Decision>(j, "decision", parse_decision);
      auto ts = parse_timestamp(j.at("timestamp").get<std::string>());
      if (!ts) throw Error(ErrorCode::ParseError, "bad timestamp");
      a.timestamp = *ts;
      AnnotationKey key{a.question_id, a.annotator};
      s.annotations.emplace(std::move(key), std::move(a));
    }
    s.responses = doc.at("responses").get<std::vector<std::string>>();
    std::sort(s.responses.begin(), s.responses.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  s.check_integrity();
  return s;
}

Store::Store(fs::path dir, const Catalog& seed, Clock clock) : dir_(std::move(dir)), clock_(std::move(clock)) {
  const auto file = *dir_ / "store.json";
  StoreSnapshot s;
  if (fs::exists(file)) {
    try {
      s = snapshot_from_json(read_file(file));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SchemaMismatch) throw;
      throw Error(ErrorCode::StoreError, file.string() + ": " + e.what());
    }
    for (const auto& c : seed.challenges()) s.challenges.emplace(c.id, c);
  } else {
    s = StoreSnapshot::fresh(seed);
  }
  current_ = std::make_shared<const StoreSnapshot>(std::move(s));
}

Store::Store(const Catalog& seed, Clock clock)
    : clock_(std::move(clock)), current_(std::make_shared<const StoreSnapshot>(StoreSnapshot::fresh(seed))) {}

std::shared_ptr<const StoreSnapshot> Store::snapshot() const {
  std::lock_guard lock(snap_mu_);
  return current_;
}

void Store::commit(std::shared_ptr<StoreSnapshot> next) {
  persist(*next);
  std::lock_guard lock(snap_mu_);
  current_ = std::move(next);
}

void Store::persist(const StoreSnapshot& s) {
  if (!dir_) return;
  write_file_atomic(*dir_ / "store.json", snapshot_to_json(s));
}

void Store::flush() {
  std::lock_guard writer(writer_mu_);
  persist(*snapshot());
}

PutResult Store::put_questions(const std::vector<GeneratedQuestion>& questions) {
  return mutate([&](StoreSnapshot& s) {
    PutResult r;
    for (const auto& q : questions) {
      if (!s.challenges.count(q.challenge_id)) {
        throw Error(ErrorCode::IntegrityError, "question " + q.id + " references unknown challenge " + q.challenge_id);
      }
      if (s.questions.emplace(q.id, q).second) {
        ++r.inserted;
      } else {
        ++r.deduplicated;
      }
    }
    return r;
  });
}

void Store::add_challenge(CodeChallenge challenge) {
  validate_challenge(challenge);
  mutate([&](StoreSnapshot& s) {
    const auto id = challenge.id;
    if (!s.challenges.emplace(id, std::move(challenge)).second) throw Error(ErrorCode::DuplicateId, id);
  });
}

void Store::put_raw_response(const std::string& fp, const std::string& text) {
  if (snapshot()->has_response(fp)) return;
  if (dir_) {
    write_file_atomic(*dir_ / "responses" / (fp + ".txt"), text);
  } else {
    std::lock_guard lock(responses_mu_);
    memory_responses_.insert_or_assign(fp, text);
  }
  mutate([&](StoreSnapshot& s) {
    auto it = std::lower_bound(s.responses.begin(), s.responses.end(), fp);
    if (it == s.responses.end() || *it != fp) s.responses.insert(it, fp);
  });
}

std::optional<std::string> Store::raw_response(const std::string& fp) const {
  if (!snapshot()->has_response(fp)) return std::nullopt;
  if (dir_) return read_file(*dir_ / "responses" / (fp + ".txt"));
  std::lock_guard lock(responses_mu_);
  auto it = memory_responses_.find(fp);
  return it == memory_responses_.end() ? std::nullopt : std::optional<std::string>(it->second);
}

std::optional<ExportFormat> parse_export_format(std::string_view s) noexcept {
  const auto lower = to_lower(s);
  if (lower == "csv") return ExportFormat::Csv;
  if (lower == "jsonl") return ExportFormat::Jsonl;
  return std::nullopt;
}

const std::vector<std::string>& export_columns() {
  static const std::vector<std::string> columns = {
      "question_id", "challenge_id", "functional_category", "prompt_category", "line_number",
      "anchored_line", "anchor_status", "line_code", "question", "annotator", "label", "theme", "decision"};
  return columns;
}

namespace {

struct ExportRecord {
  std::vector<std::string> fields;  // export_columns() order
  std::string response_fingerprint;
  std::string timestamp;
};

std::vector<ExportRecord> export_records(const StoreSnapshot& s) {
  std::vector<ExportRecord> out;
  for (const auto& [id, q] : s.questions) {
    const auto* challenge = s.find_challenge(q.challenge_id);
    std::vector<std::string> base = {
        q.id,
        q.challenge_id,
        challenge ? std::string(to_string(challenge->category)) : std::string(),
        std::string(to_string(q.category)),
        std::to_string(q.row.line_number),
        q.anchor.line ? std::to_string(*q.anchor.line) : std::string(),
        std::string(to_string(q.anchor.status)),
        q.row.line_code,
        q.row.question};
    const auto annotations = s.annotations_for(q.id);
    if (annotations.empty()) {
      auto fields = base;
      fields.resize(export_columns().size());
      out.push_back({std::move(fields), q.response_fingerprint, {}});
      continue;
    }
    for (const auto* a : annotations) {
      auto fields = base;
      fields.push_back(a->annotator);
      fields.emplace_back(to_string(a->label));
      fields.push_back(a->theme.value_or(""));
      fields.emplace_back(to_string(a->decision));
      out.push_back({std::move(fields), q.response_fingerprint, format_timestamp(a->timestamp)});
    }
  }
  return out;
}

}  // namespace

std::string export_dataset_text(const StoreSnapshot& s, ExportFormat format) {
  const auto records = export_records(s);
  const auto& columns = export_columns();
  std::string out;
  if (format == ExportFormat::Csv) {
    out = csv::join_row(columns) + "\n";
    for (const auto& r : records) out += csv::join_row(r.fields) + "\n";
    return out;
  }
  for (const auto& r : records) {
    json j;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const auto& v = r.fields[i];
      if (columns[i] == "line_number") {
        j[columns[i]] = std::stoll(v);
      } else if (columns[i] == "anchored_line") {
        j[columns[i]] = v.empty() ? json() : json(std::stoi(v));
      } else if (v.empty() && (columns[i] == "annotator" || columns[i] == "label" || columns[i] == "theme" ||
                               columns[i] == "decision")) {
        j[columns[i]] = nullptr;
      } else {
        j[columns[i]] = v;
      }
    }
    j["response_fingerprint"] = r.response_fingerprint;
    j["timestamp"] = r.timestamp.empty() ? json() : json(r.timestamp);
    out += j.dump() + "\n";
  }
  return out;
}

int export_dataset(const StoreSnapshot& s, const fs::path& path, ExportFormat format) {
  const auto text = export_dataset_text(s, format);
  write_file_atomic(path, text);
  return static_cast<int>(export_records(s).size());
}

namespace {

struct ImportRecord {
  int line = 0;
  std::map<std::string, std::string> fields;  // absent annotation fields are ""
  std::optional<std::string> response_fingerprint;
  std::optional<std::string> timestamp;
};

[[noreturn]] void import_fail(int line, const std::string& reason) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + reason);
}

std::vector<ImportRecord> read_csv_records(std::string_view text) {
  const auto& columns = export_columns();
  std::vector<ImportRecord> out;
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start < text.size();) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i + 1);
    if (lines[i].empty() && header_seen) continue;
    std::string record(lines[i]);
    auto fields = csv::split_record(record);
    while (!fields && i + 1 < lines.size()) {
      record.push_back('\n');
      record.append(lines[++i]);
      fields = csv::split_record(record);
    }
    if (!fields) import_fail(lineno, "unterminated quoted field");
    if (!header_seen) {
      if (*fields != columns) import_fail(lineno, "header does not match the export columns");
      header_seen = true;
      continue;
    }
    if (fields->size() != columns.size()) {
      import_fail(lineno, "expected " + std::to_string(columns.size()) + " fields, got " +
                              std::to_string(fields->size()));
    }
    ImportRecord r;
    r.line = lineno;
    for (std::size_t c = 0; c < columns.size(); ++c) r.fields[columns[c]] = (*fields)[c];
    out.push_back(std::move(r));
  }
  if (!header_seen) import_fail(1, "missing header");
  return out;
}

std::vector<ImportRecord> read_jsonl_records(std::string_view text) {
  std::vector<ImportRecord> out;
  int lineno = 0;
  for (std::size_t start = 0; start < text.size();) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++lineno;
    if (trim(line).empty()) continue;
    ImportRecord r;
    r.line = lineno;
    try {
      auto j = json::parse(line);
      if (!j.is_object()) import_fail(lineno, "record is not an object");
      for (const auto& col : export_columns()) {
        const auto& v = j.at(col);
        if (v.is_null()) {
          r.fields[col] = "";
        } else if (v.is_number_integer()) {
          r.fields[col] = std::to_string(v.get<long long>());
        } else {
          r.fields[col] = v.get<std::string>();
        }
      }
      if (j.contains("response_fingerprint") && !j["response_fingerprint"].is_null()) {
        r.response_fingerprint = j["response_fingerprint"].get<std::string>();
      }
      if (j.contains("timestamp") && !j["timestamp"].is_null()) r.timestamp = j["timestamp"].get<std::string>();
    } catch (const json::exception& e) {
      import_fail(lineno, e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

struct ImportedRow {
  GeneratedQuestion question;
  std::optional<Annotation> annotation;
};

ImportedRow convert(const ImportRecord& r, Timestamp now) {
  auto field = [&](const char* key) -> const std::string& { return r.fields.at(key); };
  ImportedRow out;
  auto& q = out.question;
  q.id = field("question_id");
  q.challenge_id = field("challenge_id");
  auto category = parse_prompt_category(field("prompt_category"));
  if (!category) import_fail(r.line, "unknown prompt_category '" + field("prompt_category") + "'");
  q.category = *category;
  auto line_number = parse_integer(field("line_number"));
  if (!line_number) import_fail(r.line, "non-numeric line_number");
  q.row = {*line_number, field("line_code"), field("question")};
  auto status = parse_anchor_status(field("anchor_status"));
  if (!status) import_fail(r.line, "unknown anchor_status '" + field("anchor_status") + "'");
  std::optional<int> anchored;
  if (!field("anchored_line").empty()) {
    auto n = parse_integer(field("anchored_line"));
    if (!n) import_fail(r.line, "non-numeric anchored_line");
    anchored = static_cast<int>(*n);
  }
  try {
    q.anchor = anchor_from(*status, anchored);
  } catch (const Error& e) {
    import_fail(r.line, e.detail());
  }
  q.response_fingerprint = r.response_fingerprint.value_or("");

  if (!field("annotator").empty()) {
    Annotation a;
    a.question_id = q.id;
    a.annotator = field("annotator");
    auto label = parse_label_class(field("label"));
    if (!label) import_fail(r.line, "unknown label '" + field("label") + "'");
    a.label = *label;
    if (!field("theme").empty()) a.theme = field("theme");
    auto decision = parse_decision(field("decision"));
    if (!decision) import_fail(r.line, "unknown decision '" + field("decision") + "'");
    a.decision = *decision;
    a.timestamp = now;
    if (r.timestamp) {
      auto ts = parse_timestamp(*r.timestamp);
      if (!ts) import_fail(r.line, "bad timestamp");
      a.timestamp = *ts;
    }
    a.id = annotation_id(a);
    out.annotation = std::move(a);
  }
  return out;
}

}  // namespace

ImportResult import_dataset_text(Store& store, std::string_view text, ExportFormat format) {
  const auto records = format == ExportFormat::Csv ? read_csv_records(text) : read_jsonl_records(text);
  const auto now = store.now();
  std::vector<ImportedRow> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(convert(r, now));

  return store.mutate([&](StoreSnapshot& s) {
    ImportResult result;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& q = rows[i].question;
      if (!s.challenges.count(q.challenge_id)) {
        throw Error(ErrorCode::IntegrityError,
                    "line " + std::to_string(records[i].line) + ": unknown challenge " + q.challenge_id);
      }
      if (question_id(q.challenge_id, q.category, q.row.question) != q.id) {
        throw Error(ErrorCode::IntegrityError,
                    "line " + std::to_string(records[i].line) + ": question_id does not match its content");
      }
      if (seen.insert(q.id).second) ++result.questions;
      s.questions.emplace(q.id, q);

      if (const auto& a = rows[i].annotation) {
        ++result.annotations;
        if (a->theme && !s.themes.count(*a->theme)) {
          s.themes.emplace(*a->theme, Theme{*a->theme, *a->theme, "", false});
        }
        AnnotationKey key{a->question_id, a->annotator};
        auto it = s.annotations.find(key);
        if (it == s.annotations.end()) {
          s.annotations.emplace(std::move(key), *a);
        } else if (supersedes(*a, it->second)) {
          it->second = *a;
        }
      }
    }
    return result;
  });
}

ImportResult import_dataset(Store& store, const fs::path& path, ExportFormat format) {
  return import_dataset_text(store, read_file(path), format);
}

}  // namespace cfq
