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

#include "cfq/cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "cfq/analytics.hpp"
#include "cfq/bank.hpp"
#include "cfq/error.hpp"
#include "cfq/pipeline.hpp"
#include "cfq/promptgen.hpp"
#include "cfq/server.hpp"
#include "cfq/textbook.hpp"
#include "cfq/util.hpp"

namespace cfq {

namespace fs = std::filesystem;

namespace {

std::atomic<Server*> g_server{nullptr};

extern "C" void handle_signal(int) {
  if (auto* s = g_server.load()) s->stop_listening();
}

struct GlobalOptions {
  std::string config_path;
  std::string store;
  std::string fixtures;
  std::string mode;
  std::string catalog;
  std::vector<std::string> overrides;
};

Config resolve_config(const GlobalOptions& g) {
  std::optional<fs::path> path;
  if (!g.config_path.empty()) {
    path = g.config_path;
  } else if (const char* env = std::getenv("CFQ_CONFIG")) {
    path = env;
  }
  Config config = load_config(path);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ConfigError, "--set expects key=value, got '" + kv + "'");
    apply_config_override(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  // Dedicated flags win over --set and the file.
  if (!g.store.empty()) config.store_path = g.store;
  if (!g.fixtures.empty()) config.fixtures = g.fixtures;
  if (!g.mode.empty()) apply_config_override(config, "provider.mode", g.mode);
  if (!g.catalog.empty()) config.catalog_path = fs::path(g.catalog);
  return config;
}

template <class T, class Parse>
T parse_flag(std::string_view flag, const std::string& text, Parse parse) {
  auto v = parse(text);
  if (!v) throw Error(ErrorCode::ConfigError, std::string(flag) + ": unknown value '" + text + "'");
  return *v;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterfactual question generation and review toolkit", "cfq"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON config file (default: $CFQ_CONFIG)");
  app.add_option("--store", g.store, "Store directory (store.path)");
  app.add_option("--fixtures", g.fixtures, "Fixture directory (provider.fixtures)");
  app.add_option("--mode", g.mode, "Provider mode: live, replay or record");
  app.add_option("--catalog", g.catalog, "Catalog file (catalog.path)");
  app.add_option("--set", g.overrides, "Config override key=value (repeatable)");

  // generate
  auto* gen = app.add_subcommand("generate", "Generate questions for challenge x category pairs");
  std::vector<std::string> gen_challenges{"all"};
  std::vector<std::string> gen_categories{"all"};
  gen->add_option("--challenges,-c", gen_challenges, "Challenge ids or 'all'")->delimiter(',');
  gen->add_option("--categories", gen_categories, "Prompt categories or 'all'")->delimiter(',');

  // gen-program
  auto* genprog = app.add_subcommand("gen-program", "Generate a novice-style program from a goal description");
  std::string prog_title, prog_category, prog_goal;
  genprog->add_option("--title", prog_title, "Challenge title")->required();
  genprog->add_option("--category", prog_category, "Functional category")->required();
  genprog->add_option("--goal", prog_goal, "Goal description")->required();

  // suggest-labels
  auto* suggest = app.add_subcommand("suggest-labels", "Ask the model for S/PL/G/M labels");
  std::vector<std::string> suggest_ids;
  suggest->add_option("--question,-q", suggest_ids, "Question ids (default: all unlabeled by this model)");

  // report
  auto* report = app.add_subcommand("report", "Agreement, proportion and crosstab reports as CSV");
  std::string dimension = "theme", annotator_a, annotator_b, report_out, report_annotator, report_decision;
  report->add_option("--dimension", dimension, "theme, label, category or crosstab");
  report->add_option("--annotator-a", annotator_a, "First label source (agreement report)");
  report->add_option("--annotator-b", annotator_b, "Second label source (agreement report)");
  report->add_option("--annotator", report_annotator, "Only this annotator's annotations");
  report->add_option("--decision", report_decision, "Only annotations with this decision");
  report->add_option("--out,-o", report_out, "Output file (default: stdout)");

  // export / import
  auto* exp = app.add_subcommand("export", "Export the dataset");
  std::string export_format = "csv", export_out;
  exp->add_option("--format", export_format, "csv or jsonl");
  exp->add_option("--out,-o", export_out, "Output file (default: stdout)");

  auto* imp = app.add_subcommand("import", "Import a dataset export");
  std::string import_format = "csv", import_in;
  imp->add_option("--format", import_format, "csv or jsonl");
  imp->add_option("input", import_in, "File to import")->required();

  // enhance
  auto* enh = app.add_subcommand("enhance", "Render an enhanced textbook document");
  std::string enh_challenge, enh_format = "html", enh_out, enh_label, enh_theme, enh_category, enh_annotator;
  enh->add_option("--challenge", enh_challenge, "Challenge id")->required();
  enh->add_option("--format", enh_format, "json or html");
  enh->add_option("--out,-o", enh_out, "Output file (default: stdout)");
  enh->add_option("--label", enh_label, "Only questions with this label class");
  enh->add_option("--theme", enh_theme, "Only questions with this theme");
  enh->add_option("--category", enh_category, "Only questions from this prompt category");
  enh->add_option("--annotator", enh_annotator, "Reviewer whose decisions count");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP JSON API and review UI");
  std::string bind = "127.0.0.1:8080";
  serve->add_option("--bind", bind, "host:port");

  // record-fixtures
  auto* rec = app.add_subcommand("record-fixtures", "Record a reply as a replay fixture");
  std::string rec_challenge, rec_category, rec_goal, rec_question, rec_response;
  rec->add_option("--challenge", rec_challenge, "Challenge id (question prompt)");
  rec->add_option("--category", rec_category, "Prompt category (question prompt)");
  rec->add_option("--goal", rec_goal, "Goal description (program prompt)");
  rec->add_option("--question", rec_question, "Question id (label prompt)");
  rec->add_option("--response", rec_response, "File holding the model reply")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const Config config = resolve_config(g);
    const Catalog catalog = load_configured_catalog(config);
    Store store(config.store_path, catalog);

    if (*gen) {
      GenerateOptions options;
      if (!(gen_challenges.size() == 1 && gen_challenges.front() == "all")) options.challenges = gen_challenges;
      if (!(gen_categories.size() == 1 && gen_categories.front() == "all")) {
        for (const auto& c : gen_categories) {
          options.categories.push_back(parse_flag<PromptCategory>("--categories", c, parse_prompt_category));
        }
      }
      resolve_challenges(*store.snapshot(), options.challenges);
      auto gateway = make_gateway(config);
      const auto summary = generate(store, *gateway, config, options);
      out << summary.to_text();
      return summary.any_failed() ? kExitPartialFailure : kExitOk;
    }

    if (*genprog) {
      const auto category = parse_flag<FunctionalCategory>("--category", prog_category, parse_functional_category);
      auto gateway = make_gateway(config);
      const auto c = generate_program(store, *gateway, config, prog_title, category, prog_goal);
      out << "added " << c.id << " (" << c.source.size() << " lines)\n";
      return kExitOk;
    }

    if (*suggest) {
      auto gateway = make_gateway(config);
      const auto summary = suggest_labels(store, *gateway, config, suggest_ids);
      for (const auto& [id, e] : summary.failures) out << id << " FAILED " << e.what() << "\n";
      out << "suggested=" << summary.suggested << " failed=" << summary.failures.size() << "\n";
      return summary.failures.empty() ? kExitOk : kExitPartialFailure;
    }

    if (*report) {
      const auto snap = store.snapshot();
      std::string text;
      if (!annotator_a.empty() || !annotator_b.empty()) {
        if (annotator_a.empty() || annotator_b.empty()) {
          throw Error(ErrorCode::ConfigError, "--annotator-a and --annotator-b go together");
        }
        text = agreement_csv(agreement_report(annotator_a, annotator_b, *snap));
      } else if (dimension == "crosstab") {
        text = crosstab_csv(crosstab(*snap, report_annotator.empty() ? std::nullopt
                                                                     : std::optional<std::string>(report_annotator)));
      } else {
        ProportionFilter filter;
        if (!report_annotator.empty()) filter.annotator = report_annotator;
        if (!report_decision.empty()) filter.decision = parse_flag<Decision>("--decision", report_decision, parse_decision);
        text = proportion_csv(proportion_report(parse_flag<Dimension>("--dimension", dimension, parse_dimension),
                                                *snap, filter));
      }
      write_output(report_out, text, out);
      return kExitOk;
    }

    if (*exp) {
      const auto format = parse_flag<ExportFormat>("--format", export_format, parse_export_format);
      write_output(export_out, export_dataset_text(*store.snapshot(), format), out);
      return kExitOk;
    }

    if (*imp) {
      const auto format = parse_flag<ExportFormat>("--format", import_format, parse_export_format);
      const auto r = import_dataset(store, import_in, format);
      out << "questions=" << r.questions << " annotations=" << r.annotations << "\n";
      return kExitOk;
    }

    if (*enh) {
      EnhanceFilter filter;
      if (!enh_label.empty()) filter.label = parse_flag<LabelClass>("--label", enh_label, parse_label_class);
      if (!enh_theme.empty()) filter.theme = enh_theme;
      if (!enh_category.empty()) {
        filter.category = parse_flag<PromptCategory>("--category", enh_category, parse_prompt_category);
      }
      if (!enh_annotator.empty()) filter.annotator = enh_annotator;
      const auto format = parse_flag<RenderFormat>("--format", enh_format, parse_render_format);
      const auto doc = enhance(enh_challenge, *store.snapshot(), filter, store.now());
      write_output(enh_out, render(doc, format), out);
      return kExitOk;
    }

    if (*serve) {
      const auto colon = bind.rfind(':');
      if (colon == std::string::npos) throw Error(ErrorCode::ConfigError, "--bind expects host:port");
      const auto port = parse_integer(bind.substr(colon + 1));
      if (!port || *port < 0 || *port > 65535) throw Error(ErrorCode::ConfigError, "bad port in --bind");
      std::shared_ptr<Gateway> gateway = make_gateway(config);
      Server server(config, store, gateway);
      const int bound = server.bind(bind.substr(0, colon), static_cast<int>(*port));
      err << "listening on " << bind.substr(0, colon) << ":" << bound << "\n";
      g_server = &server;
      std::signal(SIGINT, handle_signal);
      std::signal(SIGTERM, handle_signal);
      server.listen();
      g_server = nullptr;
      server.stop();
      return kExitOk;
    }

    if (*rec) {
      const auto reply = read_file(rec_response);
      PromptText prompt;
      if (!rec_goal.empty()) {
        prompt = build_program_prompt(rec_goal);
      } else if (!rec_question.empty()) {
        const auto snap = store.snapshot();
        const auto* q = snap->find_question(rec_question);
        if (q == nullptr) throw Error(ErrorCode::UnknownQuestion, rec_question);
        prompt = build_label_suggestion_prompt(*q, *snap->find_challenge(q->challenge_id));
      } else {
        if (rec_challenge.empty() || rec_category.empty()) {
          throw Error(ErrorCode::ConfigError, "need --challenge and --category, --goal, or --question");
        }
        const auto* c = store.snapshot()->find_challenge(rec_challenge);
        if (c == nullptr) throw Error(ErrorCode::ConfigError, "unknown challenge '" + rec_challenge + "'");
        prompt = build_question_prompt(parse_flag<PromptCategory>("--category", rec_category, parse_prompt_category), *c);
      }
      const auto fp = record_fixture(make_request(config, std::move(prompt)), reply, config.fixtures);
      out << fp << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? kExitUsage : kExitPartialFailure;
  }
  return kExitUsage;
}

}  // namespace cfq
