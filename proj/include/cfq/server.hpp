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

#include <memory>
#include <string>

#include "cfq/bank.hpp"
#include "cfq/gateway.hpp"
#include "cfq/pipeline.hpp"

namespace httplib {
class Server;
}

namespace cfq {

/// HTTP status for an error code (404 for unknown resources, 409 for
/// conflicts, 400 for bad input, 502/503 for provider trouble).
int http_status(ErrorCode code) noexcept;

/// JSON API under /api/ plus the static review UI at /.
///
///   GET  /api/challenges              POST /api/challenges
///   GET  /api/questions?challenge=&category=&anchor=&decision=
///   POST /api/annotations
///   GET  /api/themes                  POST /api/themes
///   POST /api/jobs                    GET  /api/jobs/{id}
///   GET  /api/reports/agreement?annotator_a=&annotator_b=
///   GET  /api/reports/proportions?dimension=&annotator=&decision=
///   GET  /api/reports/crosstab?annotator=
///   GET  /api/enhanced/{challenge}?format=&label=&theme=&category=
///
/// Errors are {"error": "<ErrorCode>", "detail": "..."}. Any other method on
/// a known path is 405.
class Server {
 public:
  Server(Config config, Store& store, std::shared_ptr<Gateway> gateway);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds without serving; port 0 picks a free port. Returns the port.
  /// Throws BindError.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  void listen();
  /// Makes listen() return; safe to call from a signal handler.
  void stop_listening();
  /// Stops accepting, drains jobs and flushes the store.
  void stop();

  JobRunner& jobs() noexcept { return jobs_; }

 private:
  void install_routes();

  Config config_;
  Store& store_;
  std::shared_ptr<Gateway> gateway_;
  JobRunner jobs_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace cfq
