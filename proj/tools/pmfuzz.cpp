// Copyright 2026 The pmfuzz Authors
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

// pmfuzz: command-line workbench for fuzzy time-cost-quality crashing.
//
//   pmfuzz validate table1
//   pmfuzz cpm table1 --mode crash
//   pmfuzz payoff table1
//   pmfuzz solve table1 --scenario paper-bounds --oracle
//   pmfuzz sweep table1 --deadline 29..42
//   pmfuzz serve --port 8080 --project-dir data
//
// Project and scenario arguments are file paths; when no such file exists the
// name of a bundled fixture is accepted instead.
//
// Exit codes: 0 ok, 1 validation error, 2 infeasible scenario, 3 internal
// limit, 4 solver and oracle disagree.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pmfuzz/bundled_fixtures.hpp"
#include "pmfuzz/pmfuzz.hpp"
#include "pmfuzz/service.hpp"
#include "spdlog/sinks/stdout_sinks.h"
#include "spdlog/spdlog.h"

namespace {

using pmfuzz::io::Json;

enum ExitCode { kOk = 0, kValidation = 1, kInfeasible = 2, kLimit = 3, kDisagree = 4 };

std::string read_input(const std::string& arg, const char* what) {
  if (std::filesystem::exists(arg)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  if (auto text = pmfuzz::fixtures::find(arg)) {
    spdlog::debug("using bundled fixture {}", arg);
    return std::string(*text);
  }
  throw pmfuzz::ValidationError({{pmfuzz::ViolationKind::kParse, "", "",
                                  std::string("no ") + what + " file or bundled fixture named '" + arg + "'"}});
}

pmfuzz::io::ProjectFile load_project(const std::string& arg) {
  auto p = pmfuzz::io::parse_project_text(read_input(arg, "project"));
  spdlog::info("loaded project '{}' ({} activities)", p.name, p.network.size());
  return p;
}

pmfuzz::Scenario load_scenario(const std::optional<std::string>& arg) {
  if (!arg) return {};
  return pmfuzz::io::parse_scenario_text(read_input(*arg, "scenario"));
}

void configure_logging() {
  auto logger = spdlog::stderr_logger_mt("pmfuzz");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("PMFUZZ_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honour real names
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

bool is_machine(const std::string& format) { return format == "machine"; }

void print_json(const Json& j) { std::cout << j.dump(2) << '\n'; }

// --- validate --------------------------------------------------------------

int cmd_validate(const std::string& project, const std::string& format) {
  if (!is_machine(format)) {
    const auto p = load_project(project);
    std::cout << pmfuzz::report::validation_verdict(p.network) << '\n';
    return kOk;
  }
  // machine mode reports problems on stdout too, in the HTTP 422 shape
  try {
    const auto p = load_project(project);
    Json j = Json::object();
    j["valid"] = true;
    j["activities"] = p.network.size();
    j["precedence_edges"] = p.network.edge_count();
    print_json(j);
    return kOk;
  } catch (const pmfuzz::ValidationError& e) {
    print_json(pmfuzz::io::to_json(e));
    return kValidation;
  }
}

// --- cpm -------------------------------------------------------------------

int cmd_cpm(const std::string& project, const std::string& mode, const std::string& format) {
  const auto p = load_project(project);
  const pmfuzz::Durations d = mode == "crash" ? p.network.crash_durations() : p.network.normal_durations();
  const auto a = pmfuzz::analyze_cpm(p.network, d);
  if (is_machine(format)) {
    Json j = Json::object();
    j["mode"] = mode;
    j["durations"] = pmfuzz::io::durations_json(p.network, a.schedule.durations);
    j["starts"] = pmfuzz::io::durations_json(p.network, a.schedule.starts);
    j["latest_starts"] = pmfuzz::io::durations_json(p.network, a.latest_starts);
    j["slack"] = pmfuzz::io::durations_json(p.network, a.slack);
    j["makespan"] = pmfuzz::io::number(a.schedule.makespan);
    j["critical"] = pmfuzz::critical_activities(p.network, d);
    print_json(j);
  } else {
    std::cout << pmfuzz::report::cpm(p.network, a, mode);
  }
  return kOk;
}

// --- payoff ----------------------------------------------------------------

int cmd_payoff(const std::string& project, const std::string& format) {
  const auto p = load_project(project);
  const auto pm = pmfuzz::payoff_matrix(p.network, p.coefficient_set, true);
  spdlog::debug("payoff: {} MILP solves, {} nodes", pm.counters.milp_solves, pm.counters.milp_nodes);
  if (is_machine(format)) print_json(pmfuzz::io::to_json(pm, p));
  else std::cout << pmfuzz::report::payoff(pm, p);
  return kOk;
}

// --- solve -----------------------------------------------------------------

bool agrees(const pmfuzz::SolveResult& a, const pmfuzz::SolveResult& b) {
  if (std::abs(a.lambda - b.lambda) > 1e-6) return false;
  for (pmfuzz::Criterion c : pmfuzz::kCriteria) {
    const double x = a.criteria[pmfuzz::index(c)];
    const double y = b.criteria[pmfuzz::index(c)];
    if (std::abs(x - y) > 1e-9 * std::max(1.0, std::abs(y))) return false;
  }
  return true;
}

int cmd_solve(const std::string& project, const std::optional<std::string>& scenario, bool with_oracle,
              const std::string& format, unsigned workers) {
  const auto p = load_project(project);
  const auto s = load_scenario(scenario);
  pmfuzz::validate_scenario(p.network, s);
  const auto bounds = pmfuzz::resolve_bounds(p.network, s, p.coefficient_set);
  const auto r = pmfuzz::solve_max_lambda(p.network, bounds, s, p.coefficient_set);
  spdlog::info("solved: lambda {:.7f}, {} MILP solves", r.lambda, r.stats.milp_solves);
  if (is_machine(format)) print_json(pmfuzz::io::to_json(r));
  else std::cout << pmfuzz::report::solve(r, p.network);
  if (!with_oracle) return kOk;

  pmfuzz::oracle::Options opt;
  opt.workers = workers;
  const auto o = pmfuzz::oracle::enumerate_optimal(p.network, bounds, s, p.coefficient_set, opt);
  const bool ok = agrees(r, o.result);
  std::ostringstream verdict;
  verdict << "oracle: " << (ok ? "agree" : "DISAGREE") << " (lambda " << pmfuzz::report::fmt_degree(o.result.lambda)
          << ", time " << pmfuzz::report::fmt(o.result.time()) << ", cost "
          << pmfuzz::report::fmt_money(o.result.cost()) << ", quality_loss "
          << pmfuzz::report::fmt(o.result.quality_loss()) << "; " << o.stats.enumerated << " vectors, "
          << o.stats.feasible << " admissible)";
  // machine output stays pure SolveResult
  (is_machine(format) ? std::cerr : std::cout) << verdict.str() << '\n';
  return ok ? kOk : kDisagree;
}

// --- sweep -----------------------------------------------------------------

struct Grid {
  std::string column;
  std::string activity;  // set for quality-floor sweeps
  std::vector<double> values;
};

// "lo..hi" or "lo..hi:step"
std::vector<double> parse_range(const std::string& text, double default_step) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw CLI::ValidationError("range", "expected lo..hi[:step], got '" + text + "'");
  const auto colon = text.find(':', dots);
  double lo, hi, step = default_step;
  try {
    lo = std::stod(text.substr(0, dots));
    hi = std::stod(text.substr(dots + 2, colon == std::string::npos ? std::string::npos : colon - dots - 2));
    if (colon != std::string::npos) step = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("range", "expected lo..hi[:step], got '" + text + "'");
  }
  if (!(step > 0)) throw CLI::ValidationError("range", "step must be positive");
  std::vector<double> out;
  // index-based grid so rounding never adds or drops the last point
  for (long k = 0;; ++k) {
    const double v = lo + static_cast<double>(k) * step;
    if (v > hi + 1e-9 * std::max(1.0, std::abs(hi))) break;
    out.push_back(std::round(v * 1e9) / 1e9);
  }
  return out;
}

int cmd_sweep(const std::string& project, const std::optional<std::string>& scenario,
              const std::optional<std::string>& deadline, const std::optional<std::string>& floor,
              const std::string& format, unsigned jobs) {
  const auto p = load_project(project);
  const auto base = load_scenario(scenario);
  pmfuzz::validate_scenario(p.network, base);

  Grid grid;
  if (deadline) {
    grid.column = "deadline";
    grid.values = parse_range(*deadline, 1.0);
  } else {
    const auto eq = floor->find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--quality-floor", "expected id=lo..hi:step");
    grid.activity = floor->substr(0, eq);
    grid.column = "floor_" + grid.activity;
    grid.values = parse_range(floor->substr(eq + 1), 0.01);
    if (!p.network.index_of(grid.activity)) {
      throw pmfuzz::ValidationError({{pmfuzz::ViolationKind::kUnknownActivityInScenario, grid.activity,
                                      "quality_floors", "sweep names unknown activity " + grid.activity}});
    }
  }

  // Bounds do not depend on the swept constraint, so resolve them once.
  const auto bounds = pmfuzz::resolve_bounds(p.network, base, p.coefficient_set);
  auto solve_point = [&](double v) -> pmfuzz::report::SweepRow {
    pmfuzz::Scenario s = base;
    if (grid.activity.empty()) s.deadline = v;
    else s.quality_floors[grid.activity] = v;
    try {
      return {v, pmfuzz::solve_max_lambda(p.network, bounds, s, p.coefficient_set)};
    } catch (const pmfuzz::InfeasibleScenario& e) {
      spdlog::info("{} = {}: {}", grid.column, v, e.what());
      return {v, std::nullopt};
    }
  };
  std::vector<pmfuzz::report::SweepRow> rows;
  for (std::size_t k = 0; k < grid.values.size(); k += jobs) {
    std::vector<std::future<pmfuzz::report::SweepRow>> batch;
    for (std::size_t i = k; i < std::min(grid.values.size(), k + jobs); ++i) {
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, solve_point, grid.values[i]));
    }
    for (auto& f : batch) rows.push_back(f.get());
  }

  if (is_machine(format)) {
    Json out = Json::array();
    for (const auto& row : rows) {
      Json j = Json::object();
      j[grid.column] = pmfuzz::io::number(row.value);
      j["result"] = row.result ? pmfuzz::io::to_json(*row.result) : Json(nullptr);
      out.push_back(std::move(j));
    }
    print_json(out);
  } else {
    std::cout << pmfuzz::report::sweep(grid.column, rows);
  }
  return kOk;
}

// --- serve -----------------------------------------------------------------

int cmd_serve(const std::string& host, int port, const std::optional<std::string>& project_dir) {
  pmfuzz::ProjectStore store;
  if (project_dir) {
    try {
      pmfuzz::preload_projects(store, *project_dir);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kValidation;
    }
  }
  httplib::Server server;
  pmfuzz::ScenarioService service(store);
  service.install(server);
  if (!server.bind_to_port(host, port)) {
    std::cerr << "error: cannot listen on " << host << ":" << port << '\n';
    return kValidation;
  }
  std::cout << "listening on http://" << host << ":" << port << " (" << store.size() << " projects loaded)"
            << std::endl;
  server.listen_after_bind();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Fuzzy time-cost-quality crashing workbench"};
  app.set_version_flag("--version", std::string("pmfuzz ") + pmfuzz::kVersion);
  app.require_subcommand(1);

  std::string project;
  std::string format = "table";
  std::optional<std::string> scenario;
  const std::vector<std::string> formats{"table", "machine"};

  auto* validate = app.add_subcommand("validate", "Check a project file");
  validate->add_option("project", project, "Project file or bundled fixture name")->required();
  validate->add_option("--format", format)->check(CLI::IsMember(formats));

  std::string mode = "normal";
  auto* cpm = app.add_subcommand("cpm", "Earliest-start schedule at normal or crash durations");
  cpm->add_option("project", project, "Project file or bundled fixture name")->required();
  cpm->add_option("--mode", mode, "normal or crash")->check(CLI::IsMember({"normal", "crash"}));
  cpm->add_option("--format", format)->check(CLI::IsMember(formats));

  auto* payoff = app.add_subcommand("payoff", "Payoff matrix and criterion bounds");
  payoff->add_option("project", project, "Project file or bundled fixture name")->required();
  payoff->add_option("--format", format)->check(CLI::IsMember(formats));

  bool with_oracle = false;
  unsigned workers = 1;
  auto* solve = app.add_subcommand("solve", "Max-lambda fuzzy solve");
  solve->add_option("project", project, "Project file or bundled fixture name")->required();
  solve->add_option("--scenario", scenario, "Scenario file or bundled fixture name");
  solve->add_flag("--oracle", with_oracle, "Cross-check against exhaustive enumeration");
  solve->add_option("--workers", workers, "Oracle worker threads")->check(CLI::Range(1u, 64u));
  solve->add_option("--format", format)->check(CLI::IsMember(formats));

  std::optional<std::string> deadline_range;
  std::optional<std::string> floor_range;
  unsigned jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Solve over a grid of deadlines or quality floors");
  sweep->add_option("project", project, "Project file or bundled fixture name")->required();
  sweep->add_option("--scenario", scenario, "Base scenario");
  auto* d_opt = sweep->add_option("--deadline", deadline_range, "lo..hi[:step], default step 1");
  auto* q_opt = sweep->add_option("--quality-floor", floor_range, "id=lo..hi[:step], default step 0.01");
  d_opt->excludes(q_opt);
  sweep->add_option("--jobs", jobs, "Concurrent solves")->check(CLI::Range(1u, 64u));
  sweep->add_option("--format", format)->check(CLI::IsMember(formats));

  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::string> project_dir;
  auto* serve = app.add_subcommand("serve", "Run the HTTP scenario service");
  serve->add_option("--host", host);
  serve->add_option("--port", port)->check(CLI::Range(0, 65535));
  serve->add_option("--project-dir", project_dir, "Preload every project file in this directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(project, format);
    if (*cpm) return cmd_cpm(project, mode, format);
    if (*payoff) return cmd_payoff(project, format);
    if (*solve) return cmd_solve(project, scenario, with_oracle, format, workers);
    if (*sweep) {
      if (!deadline_range && !floor_range) {
        std::cerr << "error: sweep needs --deadline or --quality-floor\n";
        return kValidation;
      }
      return cmd_sweep(project, scenario, deadline_range, floor_range, format, jobs);
    }
    if (*serve) return cmd_serve(host, port, project_dir);
  } catch (const pmfuzz::ValidationError& e) {
    std::cerr << pmfuzz::report::violations(e);
    return kValidation;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const pmfuzz::InfeasibleScenario& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const pmfuzz::SearchSpaceTooLarge& e) {
    std::cerr << "limit: " << e.what() << '\n';
    return kLimit;
  } catch (const pmfuzz::LimitExceeded& e) {
    std::cerr << "limit: " << e.what() << '\n';
    return kLimit;
  } catch (const pmfuzz::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}
