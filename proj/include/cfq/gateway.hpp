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

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>

#include "cfq/error.hpp"
#include "cfq/promptgen.hpp"

namespace cfq {

struct CompletionRequest {
  PromptText prompt;
  std::string model = "gpt-3.5-turbo";
  double temperature = 0.7;
  int max_output = 1024;
};

struct CompletionResponse {
  std::string text;
  std::string request_fingerprint;
  std::string provider;
  int attempts = 1;
  bool cached = false;
};

/// Throws InvalidArgument when temperature is outside [0, 2] or max_output < 1.
void validate_request(const CompletionRequest& request);

/// SHA-256 over (prompt body, model, temperature, max_output). Stable across
/// runs and platforms: temperature is hashed in shortest round-trip form.
std::string fingerprint(const CompletionRequest& request);

/// A provider failure worth retrying (timeouts, HTTP 429 and 5xx).
class TransientProviderError : public Error {
 public:
  explicit TransientProviderError(const std::string& detail) : Error(ErrorCode::ProviderUnavailable, detail) {}
};

class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  /// Live providers are subject to the in-flight limit and request budget.
  [[nodiscard]] virtual bool is_live() const { return true; }
  /// Returns raw model text. Throws TransientProviderError, AuthError,
  /// FixtureMissing or other Errors.
  virtual std::string complete(const CompletionRequest& request, const std::string& fingerprint) = 0;
};

// Fixture directory layout: one file per fingerprint, `<dir>/<fingerprint>.json`:
//   {"fingerprint": ..., "request": {model, temperature, max_output,
//    category, challenge_id, prompt}, "response": <raw text>}

/// Writes (or overwrites) the fixture for `request`. Throws IoError.
std::string record_fixture(const CompletionRequest& request, const std::string& response_text,
                           const std::filesystem::path& dir);

/// Reads the recorded response, or nullopt if no fixture exists.
std::optional<std::string> read_fixture(const std::filesystem::path& dir, const std::string& fingerprint);

class ReplayProvider final : public CompletionProvider {
 public:
  explicit ReplayProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}
  [[nodiscard]] std::string name() const override { return "replay"; }
  [[nodiscard]] bool is_live() const override { return false; }
  std::string complete(const CompletionRequest& request, const std::string& fingerprint) override;

 private:
  std::filesystem::path dir_;
};

/// Chat-completion JSON over HTTP(S): POST {model, messages:[{role:user}],
/// temperature, max_tokens}; reads choices[0].message.content.
class HttpChatProvider final : public CompletionProvider {
 public:
  HttpChatProvider(std::string endpoint, std::string api_key,
                   std::chrono::seconds timeout = std::chrono::seconds(120));
  [[nodiscard]] std::string name() const override { return "live"; }
  std::string complete(const CompletionRequest& request, const std::string& fingerprint) override;

 private:
  std::string scheme_host_port_;
  std::string path_;
  std::string api_key_;
  std::chrono::seconds timeout_;
};

/// Forwards to `inner` and records every successful reply as a fixture.
class RecordingProvider final : public CompletionProvider {
 public:
  RecordingProvider(std::unique_ptr<CompletionProvider> inner, std::filesystem::path dir)
      : inner_(std::move(inner)), dir_(std::move(dir)) {}
  [[nodiscard]] std::string name() const override { return "record"; }
  [[nodiscard]] bool is_live() const override { return inner_->is_live(); }
  std::string complete(const CompletionRequest& request, const std::string& fingerprint) override;

 private:
  std::unique_ptr<CompletionProvider> inner_;
  std::filesystem::path dir_;
};

struct GatewayOptions {
  int retries = 3;
  std::chrono::milliseconds backoff_base{1000};
  int concurrency = 4;
  /// Ceiling on provider calls for this gateway's lifetime.
  std::optional<long> max_requests;
  /// On-disk response cache; in-memory only when unset.
  std::optional<std::filesystem::path> cache_dir;
  std::function<void(std::chrono::milliseconds)> sleep;
};

class Gateway {
 public:
  Gateway(std::unique_ptr<CompletionProvider> provider, GatewayOptions options = {});

  /// Cache lookup, then up to `retries` retries with exponential backoff.
  /// Throws ProviderUnavailable, AuthError, FixtureMissing, BudgetExceeded,
  /// InvalidArgument.
  CompletionResponse complete(const CompletionRequest& request);

  /// Number of times the provider was invoked (attempts, not requests).
  [[nodiscard]] long provider_calls() const noexcept { return provider_calls_.load(); }
  [[nodiscard]] const CompletionProvider& provider() const noexcept { return *provider_; }
  [[nodiscard]] const GatewayOptions& options() const noexcept { return options_; }

 private:
  std::optional<std::string> cache_lookup(const std::string& fp);
  void cache_store(const CompletionRequest& request, const std::string& fp, const std::string& text);

  std::unique_ptr<CompletionProvider> provider_;
  GatewayOptions options_;
  std::counting_semaphore<> in_flight_;
  std::atomic<long> provider_calls_{0};
  std::mutex cache_mu_;
  std::map<std::string, std::string> cache_;
};

}  // namespace cfq
