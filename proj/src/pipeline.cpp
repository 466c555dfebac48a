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

#include "cfq/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <json.hpp>
#include <set>
#include <sstream>

#include "cfq/error.hpp"
#include "cfq/promptgen.hpp"
#include "cfq/qparser.hpp"
#include "cfq/util.hpp"

namespace cfq {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::optional<ProviderMode> parse_provider_mode(std::string_view s) noexcept {
  if (s == "live") return ProviderMode::Live;
  if (s == "replay") return ProviderMode::Replay;
  if (s == "record") return ProviderMode::Record;
  return std::nullopt;
}

std::string_view to_string(ProviderMode m) noexcept {
  switch (m) {
    case ProviderMode::Live: return "live";
    case ProviderMode::Replay: return "replay";
    case ProviderMode::Record: return "record";
  }
  return "";
}

namespace {

[[noreturn]] void config_fail(std::string_view key, const std::string& why) {
  throw Error(ErrorCode::ConfigError, std::string(key) + ": " + why);
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  auto n = parse_integer(value);
  if (!n) config_fail(key, "expected an integer, got '" + std::string(value) + "'");
  return static_cast<T>(*n);
}

}  // namespace

void apply_config_override(Config& config, std::string_view key, std::string_view value) {
  if (key == "provider.mode") {
    auto m = parse_provider_mode(value);
    if (!m) config_fail(key, "expected live, replay or record");
    config.mode = *m;
  } else if (key == "provider.endpoint") {
    config.endpoint = std::string(value);
  } else if (key == "provider.model") {
    config.model = std::string(value);
  } else if (key == "provider.temperature") {
    try {
      std::size_t used = 0;
      config.temperature = std::stod(std::string(value), &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      config_fail(key, "expected a number");
    }
    if (config.temperature < 0.0 || config.temperature > 2.0) config_fail(key, "must be within [0, 2]");
  } else if (key == "provider.max_output") {
    config.max_output = parse_number<int>(key, value);
    if (config.max_output < 1) config_fail(key, "must be >= 1");
  } else if (key == "provider.retries") {
    config.retries = parse_number<int>(key, value);
    if (config.retries < 0) config_fail(key, "must be >= 0");
  } else if (key == "provider.concurrency") {
    config.concurrency = parse_number<int>(key, value);
    if (config.concurrency < 1) config_fail(key, "must be >= 1");
  } else if (key == "provider.max_requests") {
    config.max_requests = parse_number<long>(key, value);
  } else if (key == "provider.fixtures") {
    config.fixtures = std::string(value);
  } else if (key == "store.path") {
    config.store_path = std::string(value);
  } else if (key == "catalog.path") {
    config.catalog_path = fs::path(std::string(value));
  } else if (key == "ui.dir") {
    config.ui_dir = fs::path(std::string(value));
  } else {
    config_fail(key, "unknown configuration key");
  }
}

Config load_config(const std::optional<fs::path>& path) {
  Config config;
  if (path) {
    json doc;
    try {
      doc = json::parse(read_file(*path));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ConfigError, path->string() + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
    if (!doc.is_object()) throw Error(ErrorCode::ConfigError, path->string() + ": expected an object");
    for (const auto& [section, body] : doc.items()) {
      if (!body.is_object()) config_fail(section, "expected an object");
      for (const auto& [name, value] : body.items()) {
        const auto key = section + "." + name;
        std::string text;
        if (value.is_string()) {
          text = value.get<std::string>();
        } else if (value.is_number_integer()) {
          text = std::to_string(value.get<long long>());
        } else if (value.is_number()) {
          text = format_double(value.get<double>());
        } else {
          config_fail(key, "expected a string or number");
        }
        apply_config_override(config, key, text);
      }
    }
  }
  if (const char* key = std::getenv("CFQ_API_KEY")) config.api_key = key;
  return config;
}

Catalog load_configured_catalog(const Config& config) {
  if (config.catalog_path) return load_catalog(*config.catalog_path);
  return bundled_catalog();
}

std::unique_ptr<Gateway> make_gateway(const Config& config, std::function<void(std::chrono::milliseconds)> sleep) {
  GatewayOptions options;
  options.retries = config.retries;
  options.concurrency = config.concurrency;
  options.max_requests = config.max_requests;
  options.sleep = std::move(sleep);
  std::unique_ptr<CompletionProvider> provider;
  switch (config.mode) {
    case ProviderMode::Replay:
      provider = std::make_unique<ReplayProvider>(config.fixtures);
      break;
    case ProviderMode::Live:
    case ProviderMode::Record: {
      if (config.api_key.empty()) throw Error(ErrorCode::ConfigError, "CFQ_API_KEY is not set");
      provider = std::make_unique<HttpChatProvider>(config.endpoint, config.api_key);
      if (config.mode == ProviderMode::Record) {
        provider = std::make_unique<RecordingProvider>(std::move(provider), config.fixtures);
      }
      options.cache_dir = config.store_path / "cache";
      break;
    }
  }
  return std::make_unique<Gateway>(std::move(provider), std::move(options));
}

CompletionRequest make_request(const Config& config, PromptText prompt) {
  return CompletionRequest{std::move(prompt), config.model, config.temperature, config.max_output};
}

bool GenerateSummary::any_failed() const noexcept {
  return std::any_of(pairs.begin(), pairs.end(), [](const PairSummary& p) { return p.error.has_value(); });
}

int GenerateSummary::total_inserted() const noexcept {
  int n = 0;
  for (const auto& p : pairs) n += p.inserted;
  return n;
}

int GenerateSummary::total_deduplicated() const noexcept {
  int n = 0;
  for (const auto& p : pairs) n += p.deduplicated;
  return n;
}

std::string GenerateSummary::to_text() const {
  std::ostringstream out;
  int failed = 0;
  for (const auto& p : pairs) {
    out << p.challenge_id << ' ' << to_string(p.category);
    if (p.error) {
      ++failed;
      out << " FAILED " << p.error->what() << '\n';
      continue;
    }
    out << " parsed=" << p.parsed << " malformed=" << p.malformed << " anchored=" << p.anchored
        << " relocated=" << p.relocated << " unanchored=" << p.unanchored << " inserted=" << p.inserted
        << " deduplicated=" << p.deduplicated << '\n';
  }
  out << "pairs=" << pairs.size() << " failed=" << failed << " inserted=" << total_inserted()
      << " deduplicated=" << total_deduplicated() << '\n';
  return out.str();
}

std::vector<std::string> resolve_challenges(const StoreSnapshot& s, const std::vector<std::string>& ids) {
  std::vector<std::string> out;
  if (ids.empty() || (ids.size() == 1 && ids.front() == "all")) {
    for (const auto& [id, c] : s.challenges) out.push_back(id);
    return out;
  }
  for (const auto& id : ids) {
    if (!s.find_challenge(id)) throw Error(ErrorCode::ConfigError, "unknown challenge '" + id + "'");
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  }
  return out;
}

namespace {

PairSummary run_pair(Store& store, Gateway& gateway, const Config& config, const CodeChallenge& challenge,
                     PromptCategory category) {
  PairSummary p;
  p.challenge_id = challenge.id;
  p.category = category;
  try {
    const auto response = gateway.complete(make_request(config, build_question_prompt(category, challenge)));
    p.fingerprint = response.request_fingerprint;
    store.put_raw_response(response.request_fingerprint, response.text);
    const auto report = parse_tabular_response(response.text);
    p.parsed = static_cast<int>(report.rows.size());
    p.malformed = static_cast<int>(report.malformed.size());
    std::vector<GeneratedQuestion> questions;
    for (const auto& row : report.rows) {
      const auto anchor = anchor_row(row, challenge);
      switch (anchor.status) {
        case AnchorStatus::Anchored: ++p.anchored; break;
        case AnchorStatus::Relocated: ++p.relocated; break;
        case AnchorStatus::Unanchored: ++p.unanchored; break;
      }
      questions.push_back(make_question(challenge.id, category, row, anchor, response.request_fingerprint));
    }
    const auto put = store.put_questions(questions);
    p.inserted = put.inserted;
    p.deduplicated = put.deduplicated;
  } catch (const Error& e) {
    p.error = e;
  }
  return p;
}

}  // namespace

GenerateSummary generate(Store& store, Gateway& gateway, const Config& config, const GenerateOptions& options,
                         const ProgressFn& progress) {
  const auto snap = store.snapshot();
  const auto ids = resolve_challenges(*snap, options.challenges);
  std::vector<PromptCategory> categories = options.categories;
  if (categories.empty()) categories.assign(kPromptCategories.begin(), kPromptCategories.end());

  GenerateSummary summary;
  const int total = static_cast<int>(ids.size() * categories.size());
  for (const auto& id : ids) {
    const auto& challenge = *snap->find_challenge(id);
    for (auto category : categories) {
      summary.pairs.push_back(run_pair(store, gateway, config, challenge, category));
      if (progress) progress(static_cast<int>(summary.pairs.size()), total);
    }
  }
  return summary;
}

SuggestSummary suggest_labels(Store& store, Gateway& gateway, const Config& config,
                              std::vector<std::string> question_ids, const ProgressFn& progress) {
  const auto annotator = std::string(kLlmAnnotatorPrefix) + config.model;
  if (question_ids.empty()) {
    const auto snap = store.snapshot();
    for (const auto& [id, q] : snap->questions) {
      if (!snap->annotations.count({id, annotator})) question_ids.push_back(id);
    }
  }
  SuggestSummary summary;
  const SuggestOptions options{config.model, config.temperature, config.max_output};
  int done = 0;
  for (const auto& id : question_ids) {
    try {
      suggest_label(store, id, gateway, options);
      ++summary.suggested;
    } catch (const Error& e) {
      summary.failures.emplace_back(id, e);
    }
    if (progress) progress(++done, static_cast<int>(question_ids.size()));
  }
  return summary;
}

CodeChallenge generate_program(Store& store, Gateway& gateway, const Config& config, std::string_view title,
                               FunctionalCategory category, std::string_view goal) {
  CodeChallenge c;
  c.title = std::string(trim(title));
  c.id = slugify(c.title);
  if (!is_valid_challenge_id(c.id)) throw Error(ErrorCode::InvalidArgument, "title yields no usable id");
  if (store.snapshot()->find_challenge(c.id)) throw Error(ErrorCode::DuplicateId, c.id);
  c.category = category;
  c.goal = std::string(goal);
  c.provenance = Provenance::LlmGenerated;
  const auto response = gateway.complete(make_request(config, build_program_prompt(goal)));
  store.put_raw_response(response.request_fingerprint, response.text);
  c.source = segment_source(extract_code_block(response.text));
  store.add_challenge(c);
  return c;
}

std::string_view to_string(JobKind k) noexcept { return k == JobKind::Generate ? "Generate" : "Suggest"; }

std::string_view to_string(JobState s) noexcept {
  switch (s) {
    case JobState::Queued: return "Queued";
    case JobState::Running: return "Running";
    case JobState::Done: return "Done";
    case JobState::Failed: return "Failed";
  }
  return "";
}

JobRunner::JobRunner() : worker_([this] { run(); }) {}

JobRunner::~JobRunner() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  worker_.join();
}

std::string JobRunner::submit(JobKind kind, Work work) {
  std::lock_guard lock(mu_);
  auto id = "job-" + std::to_string(next_id_++);
  JobStatus status;
  status.job_id = id;
  status.kind = kind;
  jobs_.emplace(id, status);
  queue_.emplace_back(id, std::move(work));
  cv_.notify_all();
  return id;
}

std::optional<JobStatus> JobRunner::status(const std::string& job_id) const {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

void JobRunner::wait_idle() {
  std::unique_lock lock(mu_);
  idle_cv_.wait(lock, [&] { return queue_.empty() && !running_; });
}

void JobRunner::run() {
  while (true) {
    std::pair<std::string, Work> job;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return stop_ || !queue_.empty(); });
      if (stop_) return;
      job = std::move(queue_.front());
      queue_.pop_front();
      running_ = true;
      jobs_[job.first].state = JobState::Running;
    }
    const auto& id = job.first;
    auto progress = [&](int done, int total) {
      std::lock_guard lock(mu_);
      jobs_[id].done = done;
      jobs_[id].total = total;
    };
    std::vector<std::string> errors;
    bool failed = false;
    try {
      errors = job.second(progress);
    } catch (const std::exception& e) {
      errors.emplace_back(e.what());
      failed = true;
    }
    {
      std::lock_guard lock(mu_);
      auto& st = jobs_[id];
      st.errors = std::move(errors);
      st.state = failed ? JobState::Failed : JobState::Done;
      if (!failed) st.done = st.total;
      running_ = false;
    }
    idle_cv_.notify_all();
  }
}

}  // namespace cfq
