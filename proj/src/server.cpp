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

#include "cfq/server.hpp"

#include <httplib.h>

#include <json.hpp>

#include "cfq/analytics.hpp"
#include "cfq/error.hpp"
#include "cfq/taxonomy.hpp"
#include "cfq/textbook.hpp"

namespace cfq {

using json = nlohmann::ordered_json;

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownQuestion:
    case ErrorCode::UnknownChallenge:
    case ErrorCode::UnknownTheme:
    case ErrorCode::FileMissing:
    case ErrorCode::FixtureMissing:
      return 404;
    case ErrorCode::DuplicateId:
    case ErrorCode::DuplicateTheme:
    case ErrorCode::ReservedId:
    case ErrorCode::IntegrityError:
      return 409;
    case ErrorCode::ProviderUnavailable:
    case ErrorCode::AuthError:
      return 502;
    case ErrorCode::BudgetExceeded:
      return 429;
    case ErrorCode::IoError:
    case ErrorCode::StoreError:
    case ErrorCode::BindError:
      return 500;
    default:
      return 400;
  }
}

namespace {

json challenge_json(const CodeChallenge& c) {
  json lines = json::array();
  for (const auto& l : c.source) lines.push_back(json{{"number", l.number}, {"text", l.text}});
  return json{{"id", c.id},
              {"title", c.title},
              {"category", to_string(c.category)},
              {"goal", c.goal},
              {"provenance", to_string(c.provenance)},
              {"source", std::move(lines)}};
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

json question_json(const StoreSnapshot& s, const GeneratedQuestion& q) {
  json anns = json::array();
  for (const auto* a : s.annotations_for(q.id)) anns.push_back(annotation_json(*a));
  const auto* designated = designated_annotation(s, q.id);
  return json{{"id", q.id},
              {"challenge_id", q.challenge_id},
              {"category", to_string(q.category)},
              {"line_number", q.row.line_number},
              {"line_code", q.row.line_code},
              {"question", q.row.question},
              {"anchor_status", to_string(q.anchor.status)},
              {"anchored_line", q.anchor.line ? json(*q.anchor.line) : json()},
              {"response_fingerprint", q.response_fingerprint},
              {"decision", to_string(designated ? designated->decision : Decision::Pending)},
              {"annotations", std::move(anns)}};
}

json theme_json(const Theme& t) {
  return json{{"id", t.id}, {"display_name", t.display_name}, {"description", t.description}, {"builtin", t.builtin}};
}

json job_json(const JobStatus& j) {
  return json{{"job_id", j.job_id},
              {"kind", to_string(j.kind)},
              {"state", to_string(j.state)},
              {"progress", json{{"done", j.done}, {"total", j.total}}},
              {"errors", j.errors}};
}

json agreement_json(const AgreementReport& r) {
  json matrix = json::array();
  for (const auto& row : r.matrix.counts) matrix.push_back(row);
  std::string kappa_status = "ok";
  if (r.matrix.total() == 0) {
    kappa_status = "empty";
  } else if (!r.kappa) {
    kappa_status = "undefined";
  }
  return json{{"annotator_a", r.annotator_a},
              {"annotator_b", r.annotator_b},
              {"classes", json::array({"S", "PL", "G", "M"})},
              {"matrix", std::move(matrix)},
              {"total", r.matrix.total()},
              {"percent_agreement", r.percent_agreement ? json(*r.percent_agreement) : json()},
              {"kappa", r.kappa ? json(*r.kappa) : json()},
              {"kappa_status", kappa_status}};
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, http_status(e.code()), json{{"error", to_string(e.code())}, {"detail", e.detail()}});
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  auto v = req.get_param_value(name);
  if (v.empty()) return std::nullopt;
  return v;
}

json parse_body(const httplib::Request& req) {
  try {
    auto body = json::parse(req.body);
    if (!body.is_object()) throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
    return body;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("invalid JSON body: ") + e.what());
  }
}

std::string required_string(const json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_string()) {
    throw Error(ErrorCode::InvalidArgument, std::string("missing string field '") + key + "'");
  }
  return body[key].get<std::string>();
}

std::optional<std::string> optional_string(const json& body, const char* key) {
  if (!body.contains(key) || body[key].is_null()) return std::nullopt;
  if (!body[key].is_string()) throw Error(ErrorCode::InvalidArgument, std::string("field '") + key + "' must be a string");
  return body[key].get<std::string>();
}

std::vector<std::string> string_list(const json& body, const char* key) {
  std::vector<std::string> out;
  if (!body.contains(key) || body[key].is_null()) return out;
  if (!body[key].is_array()) throw Error(ErrorCode::InvalidArgument, std::string("field '") + key + "' must be a list");
  for (const auto& v : body[key]) out.push_back(v.get<std::string>());
  return out;
}

template <class T, class Parse>
T parse_or_throw(std::string_view what, const std::string& text, Parse parse) {
  auto v = parse(text);
  if (!v) throw Error(ErrorCode::InvalidArgument, "unknown " + std::string(what) + " '" + text + "'");
  return *v;
}

/// Wraps a handler so library errors become JSON error responses.
template <class Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const std::exception& e) {
      send_json(res, 500, json{{"error", "Internal"}, {"detail", e.what()}});
    }
  };
}

constexpr std::string_view kPlaceholderPage = R"(<!DOCTYPE html>
<html lang="en"><head><meta charset="utf-8"><title>cfq</title></head>
<body><h1>cfq review service</h1>
<p>The review UI assets are not installed. Set <code>ui.dir</code> to serve them. The JSON API is under <code>/api/</code>.</p>
</body></html>
)";

}  // namespace

Server::Server(Config config, Store& store, std::shared_ptr<Gateway> gateway)
    : config_(std::move(config)), store_(store), gateway_(std::move(gateway)), http_(std::make_unique<httplib::Server>()) {
  // Plain SO_REUSEADDR: a port already served by another process must fail to bind.
  http_->set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  install_routes();
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = http_->bind_to_any_port(host);
  } else if (!http_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error(ErrorCode::BindError, host + ":" + std::to_string(port));
  return bound;
}

void Server::listen() { http_->listen_after_bind(); }

void Server::stop_listening() { http_->stop(); }

void Server::stop() {
  if (http_) http_->stop();
  jobs_.wait_idle();
  store_.flush();
}

void Server::install_routes() {
  auto& http = *http_;

  http.Get("/api/challenges", guarded([this](const httplib::Request&, httplib::Response& res) {
    const auto snap = store_.snapshot();
    json out = json::array();
    for (const auto& [id, c] : snap->challenges) out.push_back(challenge_json(c));
    send_json(res, 200, out);
  }));

  http.Post("/api/challenges", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    CodeChallenge c;
    c.title = required_string(body, "title");
    c.id = optional_string(body, "id").value_or(slugify(c.title));
    c.category = parse_or_throw<FunctionalCategory>("category", required_string(body, "category"),
                                                    parse_functional_category);
    c.goal = optional_string(body, "goal").value_or("");
    c.source = segment_source(required_string(body, "source"));
    c.provenance = Provenance::UserImported;
    store_.add_challenge(c);
    send_json(res, 201, challenge_json(c));
  }));

  http.Get("/api/questions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto snap = store_.snapshot();
    const auto challenge = param(req, "challenge");
    std::optional<PromptCategory> category;
    if (auto c = param(req, "category")) category = parse_or_throw<PromptCategory>("category", *c, parse_prompt_category);
    std::optional<AnchorStatus> anchor;
    if (auto a = param(req, "anchor")) anchor = parse_or_throw<AnchorStatus>("anchor", *a, parse_anchor_status);
    std::optional<Decision> decision;
    if (auto d = param(req, "decision")) decision = parse_or_throw<Decision>("decision", *d, parse_decision);
    json out = json::array();
    for (const auto& [id, q] : snap->questions) {
      if (challenge && q.challenge_id != *challenge) continue;
      if (category && q.category != *category) continue;
      if (anchor && q.anchor.status != *anchor) continue;
      if (decision) {
        const auto* a = designated_annotation(*snap, id);
        if ((a ? a->decision : Decision::Pending) != *decision) continue;
      }
      out.push_back(question_json(*snap, q));
    }
    send_json(res, 200, out);
  }));

  http.Post("/api/annotations", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    const auto label = parse_or_throw<LabelClass>("label", required_string(body, "label"), parse_label_class);
    Decision decision = Decision::Pending;
    if (auto d = optional_string(body, "decision")) decision = parse_or_throw<Decision>("decision", *d, parse_decision);
    const auto a = annotate(store_, required_string(body, "question_id"), required_string(body, "annotator"), label,
                            optional_string(body, "theme"), decision);
    send_json(res, 201, annotation_json(a));
  }));

  http.Get("/api/themes", guarded([this](const httplib::Request&, httplib::Response& res) {
    const auto snap = store_.snapshot();
    json out = json::array();
    for (const auto& t : builtin_themes()) out.push_back(theme_json(t));
    for (const auto& [id, t] : snap->themes) {
      if (!t.builtin) out.push_back(theme_json(t));
    }
    send_json(res, 200, out);
  }));

  http.Post("/api/themes", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    const auto t = add_theme(store_, required_string(body, "id"), optional_string(body, "display_name").value_or(""),
                             optional_string(body, "description").value_or(""));
    send_json(res, 201, theme_json(t));
  }));

  http.Post("/api/jobs", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    const auto kind = required_string(body, "kind");
    std::string job_id;
    if (kind == "generate") {
      GenerateOptions options;
      options.challenges = string_list(body, "challenges");
      for (const auto& c : string_list(body, "categories")) {
        options.categories.push_back(parse_or_throw<PromptCategory>("category", c, parse_prompt_category));
      }
      resolve_challenges(*store_.snapshot(), options.challenges);
      job_id = jobs_.submit(JobKind::Generate, [this, options](const ProgressFn& progress) {
        const auto summary = generate(store_, *gateway_, config_, options, progress);
        std::vector<std::string> errors;
        for (const auto& p : summary.pairs) {
          if (p.error) errors.push_back(p.challenge_id + " " + std::string(to_string(p.category)) + ": " + p.error->what());
        }
        return errors;
      });
    } else if (kind == "suggest") {
      auto ids = string_list(body, "question_ids");
      job_id = jobs_.submit(JobKind::Suggest, [this, ids](const ProgressFn& progress) {
        const auto summary = suggest_labels(store_, *gateway_, config_, ids, progress);
        std::vector<std::string> errors;
        for (const auto& [id, e] : summary.failures) errors.push_back(id + ": " + e.what());
        return errors;
      });
    } else {
      throw Error(ErrorCode::InvalidArgument, "kind must be 'generate' or 'suggest'");
    }
    send_json(res, 202, job_json(*jobs_.status(job_id)));
  }));

  http.Get(R"(/api/jobs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto st = jobs_.status(req.matches[1]);
    if (!st) {
      send_json(res, 404, json{{"error", "UnknownJob"}, {"detail", std::string(req.matches[1])}});
      return;
    }
    send_json(res, 200, job_json(*st));
  }));

  http.Get("/api/reports/agreement", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto a = param(req, "annotator_a");
    const auto b = param(req, "annotator_b");
    if (!a || !b) throw Error(ErrorCode::InvalidArgument, "annotator_a and annotator_b are required");
    send_json(res, 200, agreement_json(agreement_report(*a, *b, *store_.snapshot())));
  }));

  http.Get("/api/reports/proportions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto dimension = parse_or_throw<Dimension>("dimension", param(req, "dimension").value_or("theme"),
                                                     parse_dimension);
    ProportionFilter filter;
    filter.annotator = param(req, "annotator");
    if (auto d = param(req, "decision")) filter.decision = parse_or_throw<Decision>("decision", *d, parse_decision);
    json out{{"dimension", to_string(dimension)}, {"total", 0}, {"rows", json::array()}};
    try {
      const auto r = proportion_report(dimension, *store_.snapshot(), filter);
      out["total"] = r.total;
      for (const auto& k : r.keys) {
        out["rows"].push_back(json{{"key", k}, {"count", r.counts.at(k)}, {"proportion", r.proportions.at(k)}});
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyDataset) throw;
    }
    send_json(res, 200, out);
  }));

  http.Get("/api/reports/crosstab", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto t = crosstab(*store_.snapshot(), param(req, "annotator"));
    json rows = json::array();
    for (std::size_t c = 0; c < t.size(); ++c) {
      rows.push_back(json{{"prompt_category", to_string(kPromptCategories[c])}, {"counts", t[c]}});
    }
    send_json(res, 200, json{{"classes", json::array({"S", "PL", "G", "M"})}, {"rows", std::move(rows)}});
  }));

  http.Get(R"(/api/enhanced/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    EnhanceFilter filter;
    if (auto l = param(req, "label")) filter.label = parse_or_throw<LabelClass>("label", *l, parse_label_class);
    filter.theme = param(req, "theme");
    if (auto c = param(req, "category")) filter.category = parse_or_throw<PromptCategory>("category", *c, parse_prompt_category);
    filter.annotator = param(req, "annotator");
    const auto format = parse_or_throw<RenderFormat>("format", param(req, "format").value_or("json"), parse_render_format);
    const auto doc = enhance(std::string(req.matches[1]), *store_.snapshot(), filter, store_.now());
    res.status = 200;
    res.set_content(render(doc, format), format == RenderFormat::Json ? "application/json" : "text/html; charset=utf-8");
  }));

  // Anything else on a known resource is a method mismatch.
  const auto not_allowed = [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 405, json{{"error", "MethodNotAllowed"}});
  };
  for (const char* read_only : {"/api/questions", R"(/api/jobs/([^/]+))", "/api/reports/agreement",
                                "/api/reports/proportions", "/api/reports/crosstab", R"(/api/enhanced/([^/]+))"}) {
    http.Post(read_only, not_allowed);
  }
  for (const char* path : {"/api/challenges", "/api/questions", "/api/annotations", "/api/themes", "/api/jobs",
                           R"(/api/jobs/([^/]+))", "/api/reports/agreement", "/api/reports/proportions",
                           "/api/reports/crosstab", R"(/api/enhanced/([^/]+))"}) {
    http.Put(path, not_allowed);
    http.Delete(path, not_allowed);
    http.Patch(path, not_allowed);
  }
  for (const char* write_only : {"/api/annotations", "/api/jobs"}) http.Get(write_only, not_allowed);

  if (config_.ui_dir) {
    http.set_mount_point("/", config_.ui_dir->string());
  } else {
    http.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(std::string(kPlaceholderPage), "text/html; charset=utf-8");
    });
  }
}

}  // namespace cfq
