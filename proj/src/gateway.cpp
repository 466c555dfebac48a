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

#include "cfq/gateway.hpp"

#include <httplib.h>

#include <json.hpp>
#include <thread>

#include "cfq/util.hpp"

namespace cfq {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void validate_request(const CompletionRequest& request) {
  if (!(request.temperature >= 0.0 && request.temperature <= 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "temperature must be within [0, 2]");
  }
  if (request.max_output < 1) throw Error(ErrorCode::InvalidArgument, "max_output must be >= 1");
  if (request.prompt.body.empty()) throw Error(ErrorCode::InvalidArgument, "empty prompt");
}

std::string fingerprint(const CompletionRequest& request) {
  std::string key = "cfq-completion-v1";
  for (const std::string& part : {request.model, format_double(request.temperature),
                                  std::to_string(request.max_output), request.prompt.body}) {
    key.push_back('\0');
    key += part;
  }
  return sha256_hex(key);
}

namespace {

fs::path fixture_path(const fs::path& dir, const std::string& fp) { return dir / (fp + ".json"); }

std::string fixture_document(const CompletionRequest& request, const std::string& fp, const std::string& text) {
  json req;
  req["model"] = request.model;
  req["temperature"] = request.temperature;
  req["max_output"] = request.max_output;
  req["category"] = request.prompt.category ? json(std::string(to_string(*request.prompt.category))) : json();
  req["challenge_id"] = request.prompt.challenge_id ? json(*request.prompt.challenge_id) : json();
  req["prompt"] = request.prompt.body;
  json doc;
  doc["fingerprint"] = fp;
  doc["request"] = std::move(req);
  doc["response"] = text;
  return doc.dump(2) + "\n";
}

}  // namespace

std::string record_fixture(const CompletionRequest& request, const std::string& response_text, const fs::path& dir) {
  validate_request(request);
  const auto fp = fingerprint(request);
  write_file_atomic(fixture_path(dir, fp), fixture_document(request, fp, response_text));
  return fp;
}

std::optional<std::string> read_fixture(const fs::path& dir, const std::string& fp) {
  const auto path = fixture_path(dir, fp);
  if (!fs::exists(path)) return std::nullopt;
  try {
    auto doc = json::parse(read_file(path));
    return doc.at("response").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

std::string ReplayProvider::complete(const CompletionRequest&, const std::string& fp) {
  auto text = read_fixture(dir_, fp);
  if (!text) throw Error(ErrorCode::FixtureMissing, fp);
  return *text;
}

HttpChatProvider::HttpChatProvider(std::string endpoint, std::string api_key, std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::ConfigError, "endpoint needs a scheme: " + endpoint);
  const auto path_start = endpoint.find('/', scheme_end + 3);
  scheme_host_port_ = endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : endpoint.substr(path_start);
}

std::string HttpChatProvider::complete(const CompletionRequest& request, const std::string&) {
  json body;
  body["model"] = request.model;
  body["messages"] = json::array({json{{"role", "user"}, {"content", request.prompt.body}}});
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_output;

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout_).count(), 0);
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout_).count(), 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  auto res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) throw TransientProviderError(httplib::to_string(res.error()));
  const int status = res->status;
  if (status == 401 || status == 403) throw Error(ErrorCode::AuthError, "HTTP " + std::to_string(status));
  if (status == 429 || status >= 500) throw TransientProviderError("HTTP " + std::to_string(status));
  if (status < 200 || status >= 300) {
    throw Error(ErrorCode::ProviderUnavailable, "HTTP " + std::to_string(status) + ": " + res->body);
  }
  try {
    auto reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ProviderUnavailable, std::string("malformed completion body: ") + e.what());
  }
}

std::string RecordingProvider::complete(const CompletionRequest& request, const std::string& fp) {
  auto text = inner_->complete(request, fp);
  record_fixture(request, text, dir_);
  return text;
}

Gateway::Gateway(std::unique_ptr<CompletionProvider> provider, GatewayOptions options)
    : provider_(std::move(provider)),
      options_(std::move(options)),
      in_flight_(std::max(1, options_.concurrency)) {
  if (!provider_) throw Error(ErrorCode::ConfigError, "no completion provider");
  if (options_.retries < 0) throw Error(ErrorCode::ConfigError, "retries must be >= 0");
  if (!options_.sleep) options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::optional<std::string> Gateway::cache_lookup(const std::string& fp) {
  {
    std::lock_guard lock(cache_mu_);
    if (auto it = cache_.find(fp); it != cache_.end()) return it->second;
  }
  if (options_.cache_dir) {
    if (auto text = read_fixture(*options_.cache_dir, fp)) {
      std::lock_guard lock(cache_mu_);
      cache_.emplace(fp, *text);
      return text;
    }
  }
  return std::nullopt;
}

void Gateway::cache_store(const CompletionRequest& request, const std::string& fp, const std::string& text) {
  {
    std::lock_guard lock(cache_mu_);
    cache_.insert_or_assign(fp, text);
  }
  if (options_.cache_dir) write_file_atomic(fixture_path(*options_.cache_dir, fp), fixture_document(request, fp, text));
}

CompletionResponse Gateway::complete(const CompletionRequest& request) {
  validate_request(request);
  CompletionResponse out;
  out.request_fingerprint = fingerprint(request);
  out.provider = provider_->name();

  if (auto hit = cache_lookup(out.request_fingerprint)) {
    out.text = std::move(*hit);
    out.cached = true;
    return out;
  }

  const bool live = provider_->is_live();
  for (int attempt = 1;; ++attempt) {
    out.attempts = attempt;
    if (live && options_.max_requests) {
      if (provider_calls_.fetch_add(1) >= *options_.max_requests) {
        --provider_calls_;
        throw Error(ErrorCode::BudgetExceeded, "request ceiling of " + std::to_string(*options_.max_requests));
      }
    } else {
      ++provider_calls_;
    }
    try {
      if (live) {
        in_flight_.acquire();
        struct Release {
          std::counting_semaphore<>& s;
          ~Release() { s.release(); }
        } release{in_flight_};
        out.text = provider_->complete(request, out.request_fingerprint);
      } else {
        out.text = provider_->complete(request, out.request_fingerprint);
      }
      break;
    } catch (const TransientProviderError& e) {
      if (attempt > options_.retries) {
        throw Error(ErrorCode::ProviderUnavailable,
                    "gave up after " + std::to_string(attempt) + " attempts: " + e.detail());
      }
      options_.sleep(options_.backoff_base * (1L << (attempt - 1)));
    }
  }
  cache_store(request, out.request_fingerprint, out.text);
  return out;
}

}  // namespace cfq
