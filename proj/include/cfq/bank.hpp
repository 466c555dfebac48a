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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfq/corpus.hpp"
#include "cfq/model.hpp"
#include "cfq/util.hpp"

namespace cfq {

inline constexpr int kSchemaVersion = 1;

using AnnotationKey = std::pair<std::string, std::string>;  // (question_id, annotator)

/// Everything the store holds. Maps keep iteration order stable, which the
/// exports and reports rely on.
struct StoreSnapshot {
  int schema_version = kSchemaVersion;
  std::map<std::string, CodeChallenge, std::less<>> challenges;
  std::map<std::string, GeneratedQuestion, std::less<>> questions;
  /// Current annotation per (question, annotator).
  std::map<AnnotationKey, Annotation> annotations;
  std::map<std::string, Theme, std::less<>> themes;
  /// Fingerprints of raw responses kept under responses/.
  std::vector<std::string> responses;

  /// Fresh store: the given challenges plus the built-in themes.
  static StoreSnapshot fresh(const Catalog& seed);

  [[nodiscard]] const GeneratedQuestion* find_question(std::string_view id) const;
  [[nodiscard]] const CodeChallenge* find_challenge(std::string_view id) const;
  /// Current annotations of one question, ordered by annotator.
  [[nodiscard]] std::vector<const Annotation*> annotations_for(std::string_view question_id) const;
  [[nodiscard]] bool has_response(std::string_view fp) const;

  /// Throws IntegrityError on the first dangling reference.
  void check_integrity() const;
};

std::string snapshot_to_json(const StoreSnapshot& s);
/// Throws ParseError, SchemaMismatch, IntegrityError.
StoreSnapshot snapshot_from_json(std::string_view text);

struct PutResult {
  int inserted = 0;
  int deduplicated = 0;
  friend bool operator==(const PutResult&, const PutResult&) = default;
};

/// Single-writer, multi-reader question bank.
///
/// Layout under the store directory:
///   store.json              the whole snapshot
///   responses/<fp>.txt      raw model replies
///
/// Every mutation copies the current snapshot, applies the change, writes
/// store.json with write-then-rename and only then publishes the new
/// snapshot. Readers hold immutable snapshots. A store constructed without
/// a directory keeps everything in memory.
class Store {
 public:
  /// Opens (or starts) the store at `dir`. Challenges from `seed` missing in
  /// the file are added. Throws StoreError, SchemaMismatch.
  Store(std::filesystem::path dir, const Catalog& seed, Clock clock = system_now);
  /// In-memory store.
  explicit Store(const Catalog& seed, Clock clock = system_now);

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;

  [[nodiscard]] std::shared_ptr<const StoreSnapshot> snapshot() const;
  [[nodiscard]] Timestamp now() const { return clock_(); }
  [[nodiscard]] const std::optional<std::filesystem::path>& dir() const noexcept { return dir_; }

  /// Runs `fn` on a private copy of the snapshot under the writer lock and
  /// commits the copy if `fn` returns normally. Nothing is published when it
  /// throws.
  template <class Fn>
  auto mutate(Fn&& fn) {
    std::lock_guard writer(writer_mu_);
    auto next = std::make_shared<StoreSnapshot>(*snapshot());
    if constexpr (std::is_void_v<decltype(fn(*next))>) {
      fn(*next);
      commit(std::move(next));
    } else {
      auto result = fn(*next);
      commit(std::move(next));
      return result;
    }
  }

  /// Skips questions whose id already exists. Throws IntegrityError when a
  /// question names an unknown challenge (nothing is inserted then).
  PutResult put_questions(const std::vector<GeneratedQuestion>& questions);

  /// Throws DuplicateId, InvalidArgument.
  void add_challenge(CodeChallenge challenge);

  /// Keeps the raw reply under its fingerprint (idempotent).
  void put_raw_response(const std::string& fingerprint, const std::string& text);
  [[nodiscard]] std::optional<std::string> raw_response(const std::string& fingerprint) const;

  /// Rewrites store.json from the current snapshot.
  void flush();

 private:
  void commit(std::shared_ptr<StoreSnapshot> next);
  void persist(const StoreSnapshot& s);

  std::optional<std::filesystem::path> dir_;
  Clock clock_;
  std::mutex writer_mu_;
  mutable std::mutex snap_mu_;
  std::shared_ptr<const StoreSnapshot> current_;
  mutable std::mutex responses_mu_;
  std::map<std::string, std::string> memory_responses_;
};

enum class ExportFormat { Csv, Jsonl };

std::optional<ExportFormat> parse_export_format(std::string_view s) noexcept;

/// Column order of the CSV export.
const std::vector<std::string>& export_columns();

/// One record per (question, current annotation), or one with empty
/// annotation fields for an unannotated question; sorted by question id,
/// then annotator. JSONL records add response_fingerprint and timestamp.
std::string export_dataset_text(const StoreSnapshot& s, ExportFormat format);

/// Writes the export to `path`; returns the record count. Throws IoError.
int export_dataset(const StoreSnapshot& s, const std::filesystem::path& path, ExportFormat format);

struct ImportResult {
  int questions = 0;
  int annotations = 0;
};

/// Merges an export into `store` with put_questions dedup semantics and
/// annotation supersession. Parsing happens before any mutation.
/// Throws ParseError("line N: ..."), IntegrityError.
ImportResult import_dataset_text(Store& store, std::string_view text, ExportFormat format);
ImportResult import_dataset(Store& store, const std::filesystem::path& path, ExportFormat format);

}  // namespace cfq
