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

// Orchestration shared by the CLI and the HTTP service: configuration,
// gateway construction and the multi-step generate / suggest / gen-program
// flows.

#pragma once

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cfq/bank.hpp"
#include "cfq/gateway.hpp"
#include "cfq/model.hpp"
#include "cfq/taxonomy.hpp"

namespace cfq {

enum class ProviderMode { Live, Replay, Record };

std::optional<ProviderMode> parse_provider_mode(std::string_view s) noexcept;
std::string_view to_string(ProviderMode m) noexcept;

struct Config {
  ProviderMode mode = ProviderMode::Replay;
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.7;
  int max_output = 1024;
  int retries = 3;
  int concurrency = 4;
  std::optional<long> max_requests;
  std::filesystem::path fixtures = "fixtures";
  std::filesystem::path store_path = "cfq-store";
  std::optional<std::filesystem::path> catalog_path;
  std::optional<std::filesystem::path> ui_dir;
  std::string api_key;
};

/// Reads a JSON config file of nested sections, e.g.
/// {"provider": {"mode": "replay", "fixtures": "fixtures"}, "store": {"path": "cfq-store"}}.
/// Unknown keys are a ConfigError. The API key comes from CFQ_API_KEY only.
Config load_config(const std::optional<std::filesystem::path>& path);

/// Applies one dotted override such as "provider.temperature=0.2".
void apply_config_override(Config& config, std::string_view key, std::string_view value);

/// Catalog from catalog.path, or the bundled one.
Catalog load_configured_catalog(const Config& config);

std::unique_ptr<Gateway> make_gateway(const Config& config,
                                      std::function<void(std::chrono::milliseconds)> sleep = {});

CompletionRequest make_request(const Config& config, PromptText prompt);

struct PairSummary {
  std::string challenge_id;
  PromptCategory category = PromptCategory::CriticalThinkingPerspective;
  std::optional<Error> error;
  std::string fingerprint;
  int parsed = 0;
  int malformed = 0;
  int anchored = 0;
  int relocated = 0;
  int unanchored = 0;
  int inserted = 0;
  int deduplicated = 0;
};

struct GenerateSummary {
  std::vector<PairSummary> pairs;

  [[nodiscard]] bool any_failed() const noexcept;
  [[nodiscard]] int total_inserted() const noexcept;
  [[nodiscard]] int total_deduplicated() const noexcept;
  /// One line per pair plus a totals line; stable across runs.
  [[nodiscard]] std::string to_text() const;
};

struct GenerateOptions {
  std::vector<std::string> challenges;        // empty: all challenges in the store
  std::vector<PromptCategory> categories;     // empty: all five
};

using ProgressFn = std::function<void(int done, int total)>;

/// Resolves ids and checks them all before any provider call; throws
/// ConfigError for an unknown challenge.
std::vector<std::string> resolve_challenges(const StoreSnapshot& s, const std::vector<std::string>& ids);

/// For every (challenge, category) pair: prompt, complete, parse, anchor,
/// store. A failing pair is recorded and the run continues.
GenerateSummary generate(Store& store, Gateway& gateway, const Config& config, const GenerateOptions& options,
                         const ProgressFn& progress = {});

struct SuggestSummary {
  int suggested = 0;
  std::vector<std::pair<std::string, Error>> failures;
};

/// Label suggestions for the given questions (all questions without an
/// annotation by this model when empty).
SuggestSummary suggest_labels(Store& store, Gateway& gateway, const Config& config,
                              std::vector<std::string> question_ids, const ProgressFn& progress = {});

/// Generates a novice-style program for `goal` and adds it to the store as
/// an LlmGenerated challenge. Throws DuplicateId, EmptyGoal, EmptySource.
CodeChallenge generate_program(Store& store, Gateway& gateway, const Config& config, std::string_view title,
                               FunctionalCategory category, std::string_view goal);

enum class JobKind { Generate, Suggest };
enum class JobState { Queued, Running, Done, Failed };

std::string_view to_string(JobKind k) noexcept;
std::string_view to_string(JobState s) noexcept;

struct JobStatus {
  std::string job_id;
  JobKind kind = JobKind::Generate;
  JobState state = JobState::Queued;
  int done = 0;
  int total = 0;
  std::vector<std::string> errors;
};

/// Runs jobs one at a time on a background thread, so at most one
/// generation talks to the provider at any moment.
class JobRunner {
 public:
  /// The callable reports progress and returns error strings; a thrown Error
  /// marks the job Failed.
  using Work = std::function<std::vector<std::string>(const ProgressFn&)>;

  JobRunner();
  ~JobRunner();
  JobRunner(const JobRunner&) = delete;
  JobRunner& operator=(const JobRunner&) = delete;

  std::string submit(JobKind kind, Work work);
  [[nodiscard]] std::optional<JobStatus> status(const std::string& job_id) const;
  /// Blocks until the queue is empty and nothing runs.
  void wait_idle();

 private:
  void run();

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable idle_cv_;
  std::deque<std::pair<std::string, Work>> queue_;
  std::map<std::string, JobStatus> jobs_;
  int next_id_ = 1;
  bool running_ = false;
  bool stop_ = false;
  std::thread worker_;
};

}  // namespace cfq
