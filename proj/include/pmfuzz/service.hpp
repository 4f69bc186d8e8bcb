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

// HTTP facade over the solver. Projects live in memory; every request works on
// an immutable snapshot, so solves on different projects run side by side and
// only the store lookup is serialized.
//
//   POST /api/projects                 ProjectFile -> 201 {"id": ...} | 422
//   GET  /api/projects/{id}            stored ProjectFile | 404
//   GET  /api/projects/{id}/payoff     payoff matrix | 404
//   POST /api/projects/{id}/solve      ScenarioFile -> SolveResult | 404 | 409 | 422
//   GET  /healthz                      "ok"

#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "httplib.h"
#include "json.hpp"
#include "pmfuzz/errors.hpp"
#include "pmfuzz/fuzzy_solver.hpp"
#include "pmfuzz/io.hpp"
#include "pmfuzz/objectives.hpp"

namespace pmfuzz {

struct ProjectHandle {
  std::string id;
  io::ProjectFile project;
  std::chrono::system_clock::time_point created;
};

class ProjectStore {
 public:
  std::string add(io::ProjectFile project, std::string preferred_id = "") {
    std::lock_guard lock(mu_);
    std::string id = std::move(preferred_id);
    while (id.empty() || projects_.contains(id)) id = "p" + std::to_string(++counter_);
    projects_.emplace(id, std::make_shared<const ProjectHandle>(
                              ProjectHandle{id, std::move(project), std::chrono::system_clock::now()}));
    return id;
  }

  std::shared_ptr<const ProjectHandle> find(const std::string& id) const {
    std::lock_guard lock(mu_);
    auto it = projects_.find(id);
    return it == projects_.end() ? nullptr : it->second;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return projects_.size();
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const ProjectHandle>> projects_;
  std::size_t counter_ = 0;
};

/// Loads every project file (a JSON object with "activities") in `dir`,
/// keyed by file stem. Throws Error when the directory is missing or a
/// project file in it does not validate.
inline void preload_projects(ProjectStore& store, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error("project directory " + dir.string() + " does not exist");
  std::map<std::string, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files[entry.path().stem().string()] = entry.path();
  }
  for (const auto& [stem, path] : files) {
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    io::Json doc = io::Json::parse(text.str(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("activities")) continue;  // not a project
    try {
      store.add(io::parse_project(doc), stem);
    } catch (const ValidationError& e) {
      throw Error("project file " + path.string() + " is invalid: " + e.what());
    }
  }
}

class ScenarioService {
 public:
  explicit ScenarioService(ProjectStore& store) : store_(store) {}

  /// Registers the routes and permissive CORS headers on `server`.
  void install(httplib::Server& server) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });
    server.Post("/api/projects", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        io::ProjectFile p = io::parse_project_text(req.body);
        io::Json body = io::Json::object();
        body["id"] = store_.add(std::move(p));
        reply(res, 201, body);
      });
    });
    server.Get("/api/projects/:id", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        if (auto h = lookup(req, res)) reply(res, 200, io::to_json(h->project));
      });
    });
    server.Get("/api/projects/:id/payoff", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto h = lookup(req, res);
        if (!h) return;
        const PayoffMatrix pm = payoff_matrix(h->project.network, h->project.coefficient_set, true);
        reply(res, 200, io::to_json(pm, h->project));
      });
    });
    server.Post("/api/projects/:id/solve", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        auto h = lookup(req, res);
        if (!h) return;
        const Scenario s = req.body.empty() ? Scenario{} : io::parse_scenario_text(req.body);
        const SolveResult r = solve_scenario(h->project.network, s, h->project.coefficient_set);
        reply(res, 200, io::to_json(r));
      });
    });
  }

 private:
  static void reply(httplib::Response& res, int status, const io::Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static io::Json error_body(const std::string& kind, const std::string& message) {
    io::Json j = io::Json::object();
    j["error"] = kind;
    j["message"] = message;
    return j;
  }

  std::shared_ptr<const ProjectHandle> lookup(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.path_params.at("id");
    auto h = store_.find(id);
    if (!h) reply(res, 404, error_body("NotFound", "no project with id " + id));
    return h;
  }

  template <class Fn>
  static void guarded(httplib::Response& res, Fn fn) {
    try {
      fn();
    } catch (const ValidationError& e) {
      reply(res, 422, io::to_json(e));
    } catch (const InfeasibleScenario& e) {
      reply(res, 409, error_body("InfeasibleScenario", e.what()));
    } catch (const SearchSpaceTooLarge& e) {
      reply(res, 422, error_body("SearchSpaceTooLarge", e.what()));
    } catch (const LimitExceeded& e) {
      reply(res, 503, error_body("LimitExceeded", e.what()));
    } catch (const std::exception& e) {
      reply(res, 500, error_body("InternalError", e.what()));
    }
  }

  ProjectStore& store_;
};

}  // namespace pmfuzz
