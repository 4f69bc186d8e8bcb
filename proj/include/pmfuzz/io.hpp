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

// JSON project files, scenario files, and the machine output format shared by
// the CLI and the HTTP service.

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pmfuzz/errors.hpp"
#include "pmfuzz/fuzzy_solver.hpp"
#include "pmfuzz/objectives.hpp"
#include "pmfuzz/project_model.hpp"
#include "pmfuzz/scenario.hpp"

namespace pmfuzz::io {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

struct ProjectFile {
  int format_version = kFormatVersion;
  std::string name;
  std::string time_unit = "weeks";
  std::string currency;
  CoefficientSet coefficient_set = CoefficientSet::kTable1;
  std::map<Criterion, CriterionBounds> reference_bounds;
  ProjectNetwork network;
};

/// Integral values become JSON integers so money and whole durations print
/// without a fractional part.
inline Json number(double x) {
  if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) {
    return static_cast<std::int64_t>(x);
  }
  return x;
}

namespace detail {

class FieldReader {
 public:
  FieldReader(const Json& obj, std::string context, std::vector<Violation>& out)
      : obj_(obj), context_(std::move(context)), out_(out) {}

  bool ok() const { return obj_.is_object(); }

  void fail(std::string_view field, std::string message) {
    out_.push_back({ViolationKind::kParse, activity_, std::string(field), context_ + ": " + message});
  }

  void set_activity(std::string id) { activity_ = std::move(id); }

  const Json* find(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = obj_.find(std::string(key));
    return it == obj_.end() ? nullptr : &*it;
  }

  std::optional<double> number(std::string_view key, bool required) {
    const Json* v = find(key);
    if (!v) {
      if (required) fail(key, "missing field '" + std::string(key) + "'");
      return std::nullopt;
    }
    if (!v->is_number()) {
      fail(key, "field '" + std::string(key) + "' must be a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<std::int64_t> integer(std::string_view key, bool required) {
    auto d = number(key, required);
    if (!d) return std::nullopt;
    if (*d != std::floor(*d) || std::abs(*d) > 9e15) {
      fail(key, "field '" + std::string(key) + "' must be a whole number");
      return std::nullopt;
    }
    return static_cast<std::int64_t>(*d);
  }

  std::optional<std::string> string(std::string_view key, bool required) {
    const Json* v = find(key);
    if (!v) {
      if (required) fail(key, "missing field '" + std::string(key) + "'");
      return std::nullopt;
    }
    if (!v->is_string()) {
      fail(key, "field '" + std::string(key) + "' must be a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<bool> boolean(std::string_view key) {
    const Json* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) {
      fail(key, "field '" + std::string(key) + "' must be true or false");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  void reject_unknown() {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.contains(it.key())) fail(it.key(), "unknown field '" + it.key() + "'");
    }
  }

 private:
  const Json& obj_;
  std::string context_;
  std::vector<Violation>& out_;
  std::string activity_;
  std::set<std::string> seen_;
};

inline std::map<Criterion, CriterionBounds> parse_bounds_map(const Json& j, FieldReader& parent,
                                                             std::string_view field) {
  std::map<Criterion, CriterionBounds> out;
  if (!j.is_object()) {
    parent.fail(field, "field '" + std::string(field) + "' must be an object");
    return out;
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto c = parse_criterion(it.key());
    if (!c) {
      parent.fail(field, "unknown criterion '" + it.key() + "'");
      continue;
    }
    const Json& b = it.value();
    if (b.is_array() && b.size() == 2 && b[0].is_number() && b[1].is_number()) {
      out[*c] = {b[0].get<double>(), b[1].get<double>()};
    } else if (b.is_object() && b.contains("lower") && b.contains("upper") && b["lower"].is_number() &&
               b["upper"].is_number() && b.size() == 2) {
      out[*c] = {b["lower"].get<double>(), b["upper"].get<double>()};
    } else {
      parent.fail(field, "bounds for '" + it.key() + "' must be [lower, upper] or {lower, upper}");
    }
  }
  return out;
}

inline std::map<std::string, double> parse_id_map(const Json& j, FieldReader& parent,
                                                  std::string_view field) {
  std::map<std::string, double> out;
  if (!j.is_object()) {
    parent.fail(field, "field '" + std::string(field) + "' must be an object");
    return out;
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number()) {
      parent.fail(field, std::string(field) + "." + it.key() + " must be a number");
      continue;
    }
    out[it.key()] = it.value().get<double>();
  }
  return out;
}

inline Json bounds_json(const CriterionBounds& b) {
  Json j = Json::object();
  j["lower"] = number(b.lower);
  j["upper"] = number(b.upper);
  return j;
}

}  // namespace detail

/// Parses and validates a project document. Throws ValidationError listing
/// every parse problem, or every network violation when parsing succeeded.
inline ProjectFile parse_project(const Json& doc) {
  std::vector<Violation> problems;
  detail::FieldReader root(doc, "project", problems);
  if (!root.ok()) {
    problems.push_back({ViolationKind::kParse, "", "", "project document must be a JSON object"});
    throw ValidationError(std::move(problems));
  }
  auto version = root.integer("format_version", false);
  if (version && *version != kFormatVersion) {
    root.fail("format_version", "unsupported format_version " + std::to_string(*version));
  }
  auto name = root.string("project", false);
  auto time_unit = root.string("time_unit", false);
  auto currency = root.string("currency", false);
  auto set_name = root.string("coefficient_set", false);
  std::optional<CoefficientSet> set = CoefficientSet::kTable1;
  if (set_name) {
    set = parse_coefficient_set(*set_name);
    if (!set) root.fail("coefficient_set", "coefficient_set must be 'table1' or 'appendix'");
  }
  std::map<Criterion, CriterionBounds> reference;
  if (const Json* rb = root.find("reference_bounds")) reference = detail::parse_bounds_map(*rb, root, "reference_bounds");

  std::vector<Activity> activities;
  const Json* acts = root.find("activities");
  if (!acts) {
    root.fail("activities", "missing field 'activities'");
  } else if (!acts->is_array()) {
    root.fail("activities", "field 'activities' must be an array");
  } else {
    for (std::size_t k = 0; k < acts->size(); ++k) {
      const Json& aj = (*acts)[k];
      detail::FieldReader r(aj, "activities[" + std::to_string(k) + "]", problems);
      if (!r.ok()) {
        r.fail("", "activity must be a JSON object");
        continue;
      }
      Activity a;
      if (auto id = r.string("id", true)) {
        a.id = *id;
        r.set_activity(a.id);
      }
      if (const Json* deps = r.find("depends_on")) {
        if (!deps->is_array()) {
          r.fail("depends_on", "field 'depends_on' must be an array of ids");
        } else {
          for (const Json& d : *deps) {
            if (d.is_string()) a.predecessors.push_back(d.get<std::string>());
            else r.fail("depends_on", "field 'depends_on' must be an array of ids");
          }
        }
      }
      a.normal_time = r.number("normal_time", true).value_or(0);
      a.crash_time = r.number("crash_time", true).value_or(0);
      a.normal_cost = r.integer("normal_cost", true).value_or(0);
      a.crash_cost = r.integer("crash_cost", true).value_or(0);
      a.crash_quality = r.number("crash_quality", true).value_or(1);
      a.normal_quality = r.number("normal_quality", false).value_or(1.0);
      a.appendix_cost_slope = r.number("appendix_cost_slope", false);
      r.reject_unknown();
      activities.push_back(std::move(a));
    }
  }
  root.reject_unknown();
  if (!problems.empty()) throw ValidationError(std::move(problems));

  return ProjectFile{kFormatVersion,
                     name.value_or(""),
                     time_unit.value_or("weeks"),
                     currency.value_or(""),
                     *set,
                     std::move(reference),
                     validate_network(std::move(activities))};
}

inline ProjectFile parse_project_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError({{ViolationKind::kParse, "", "", std::string("invalid JSON: ") + e.what()}});
  }
  return parse_project(doc);
}

inline Json to_json(const ProjectFile& p) {
  Json j = Json::object();
  j["format_version"] = p.format_version;
  j["project"] = p.name;
  j["time_unit"] = p.time_unit;
  j["currency"] = p.currency;
  j["coefficient_set"] = std::string(to_string(p.coefficient_set));
  if (!p.reference_bounds.empty()) {
    Json rb = Json::object();
    for (const auto& [c, b] : p.reference_bounds) rb[std::string(to_string(c))] = detail::bounds_json(b);
    j["reference_bounds"] = rb;
  }
  Json acts = Json::array();
  for (const Activity& a : p.network.activities()) {
    Json aj = Json::object();
    aj["id"] = a.id;
    aj["depends_on"] = a.predecessors;
    aj["normal_time"] = number(a.normal_time);
    aj["crash_time"] = number(a.crash_time);
    aj["normal_cost"] = a.normal_cost;
    aj["crash_cost"] = a.crash_cost;
    aj["normal_quality"] = number(a.normal_quality);
    aj["crash_quality"] = number(a.crash_quality);
    if (a.appendix_cost_slope) aj["appendix_cost_slope"] = number(*a.appendix_cost_slope);
    acts.push_back(std::move(aj));
  }
  j["activities"] = std::move(acts);
  return j;
}

/// Parses a scenario document (structure only; check it against a network
/// with validate_scenario).
inline Scenario parse_scenario(const Json& doc) {
  std::vector<Violation> problems;
  detail::FieldReader r(doc, "scenario", problems);
  if (!r.ok()) {
    throw ValidationError({{ViolationKind::kParse, "", "", "scenario document must be a JSON object"}});
  }
  Scenario s;
  auto version = r.integer("format_version", false);
  if (version && *version != kFormatVersion) {
    r.fail("format_version", "unsupported format_version " + std::to_string(*version));
  }
  r.string("name", false);
  if (const Json* q = r.find("quality_floors")) s.quality_floors = detail::parse_id_map(*q, r, "quality_floors");
  if (const Json* l = r.find("duration_locks")) s.duration_locks = detail::parse_id_map(*l, r, "duration_locks");
  if (const Json* d = r.find("deadline"); d && !d->is_null()) s.deadline = r.number("deadline", false);
  if (const Json* b = r.find("budget_cap"); b && !b->is_null()) s.budget_cap = r.number("budget_cap", false);
  if (const Json* bo = r.find("bound_overrides")) s.bound_overrides = detail::parse_bounds_map(*bo, r, "bound_overrides");
  if (auto im = r.boolean("integer_mode")) s.integer_mode = *im;
  if (auto tol = r.number("lambda_tolerance", false)) s.lambda_tolerance = *tol;
  if (auto cs = r.string("coefficient_set", false)) {
    s.coefficient_set = parse_coefficient_set(*cs);
    if (!s.coefficient_set) r.fail("coefficient_set", "coefficient_set must be 'table1' or 'appendix'");
  }
  r.reject_unknown();
  if (!problems.empty()) throw ValidationError(std::move(problems));
  return s;
}

inline Scenario parse_scenario_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError({{ViolationKind::kParse, "", "", std::string("invalid JSON: ") + e.what()}});
  }
  return parse_scenario(doc);
}

inline Json to_json(const Scenario& s) {
  Json j = Json::object();
  j["format_version"] = kFormatVersion;
  Json floors = Json::object();
  for (const auto& [id, v] : s.quality_floors) floors[id] = number(v);
  j["quality_floors"] = floors;
  j["deadline"] = s.deadline ? number(*s.deadline) : Json(nullptr);
  j["budget_cap"] = s.budget_cap ? number(*s.budget_cap) : Json(nullptr);
  Json locks = Json::object();
  for (const auto& [id, v] : s.duration_locks) locks[id] = number(v);
  j["duration_locks"] = locks;
  Json overrides = Json::object();
  for (const auto& [c, b] : s.bound_overrides) overrides[std::string(to_string(c))] = detail::bounds_json(b);
  j["bound_overrides"] = overrides;
  j["integer_mode"] = s.integer_mode;
  j["lambda_tolerance"] = s.lambda_tolerance;
  if (s.coefficient_set) j["coefficient_set"] = std::string(to_string(*s.coefficient_set));
  return j;
}

/// Machine format of a solve. Field order is fixed; timing is excluded so
/// identical inputs give identical bytes.
inline Json to_json(const SolveResult& r) {
  Json j = Json::object();
  j["lambda"] = number(r.lambda);
  Json durations = Json::object();
  Json starts = Json::object();
  for (std::size_t k = 0; k < r.activity_ids.size(); ++k) {
    durations[r.activity_ids[k]] = number(r.schedule.durations[k]);
    starts[r.activity_ids[k]] = number(r.schedule.starts[k]);
  }
  j["durations"] = durations;
  j["starts"] = starts;
  j["z_cost"] = number(r.cost());
  j["z_time"] = number(r.time());
  j["z_quality_loss"] = number(r.quality_loss());
  Json mu = Json::object();
  for (Criterion c : kCriteria) mu[std::string(to_string(c))] = number(r.memberships[index(c)]);
  j["memberships"] = mu;
  j["aggregate_quality"] = number(r.aggregate_quality);
  Json binding = Json::array();
  for (Criterion c : r.binding) binding.push_back(std::string(to_string(c)));
  j["binding"] = binding;
  Json stats = Json::object();
  stats["bisection_iterations"] = r.stats.bisection_iterations;
  stats["milp_solves"] = r.stats.milp_solves;
  stats["milp_nodes"] = r.stats.milp_nodes;
  j["stats"] = stats;
  return j;
}

/// Inverse of to_json(SolveResult).
inline SolveResult solve_result_from_json(const Json& j) {
  SolveResult r;
  r.lambda = j.at("lambda").get<double>();
  for (auto it = j.at("durations").begin(); it != j.at("durations").end(); ++it) {
    r.activity_ids.push_back(it.key());
    r.schedule.durations.push_back(it.value().get<double>());
    r.schedule.starts.push_back(j.at("starts").at(it.key()).get<double>());
  }
  r.criteria[index(Criterion::kCost)] = j.at("z_cost").get<double>();
  r.criteria[index(Criterion::kTime)] = j.at("z_time").get<double>();
  r.criteria[index(Criterion::kQualityLoss)] = j.at("z_quality_loss").get<double>();
  r.schedule.makespan = r.time();
  for (Criterion c : kCriteria) r.memberships[index(c)] = j.at("memberships").at(std::string(to_string(c))).get<double>();
  r.aggregate_quality = j.at("aggregate_quality").get<double>();
  for (const Json& b : j.at("binding")) {
    auto c = parse_criterion(b.get<std::string>());
    if (!c) throw Error("unknown criterion in binding list");
    r.binding.push_back(*c);
  }
  const Json& st = j.at("stats");
  r.stats.bisection_iterations = st.at("bisection_iterations").get<std::size_t>();
  r.stats.milp_solves = st.at("milp_solves").get<std::size_t>();
  r.stats.milp_nodes = st.at("milp_nodes").get<std::size_t>();
  return r;
}

/// One computed bound that differs from the project's reference bounds.
struct BoundDivergence {
  Criterion criterion;
  bool upper;
  double computed;
  double reference;
};

inline std::vector<BoundDivergence> bound_divergences(const PayoffMatrix& pm, const ProjectFile& p) {
  std::vector<BoundDivergence> out;
  for (const auto& [c, ref] : p.reference_bounds) {
    const auto& got = pm.bounds[index(c)];
    auto differs = [](double a, double b) { return std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b)); };
    if (differs(got.lower, ref.lower)) out.push_back({c, false, got.lower, ref.lower});
    if (differs(got.upper, ref.upper)) out.push_back({c, true, got.upper, ref.upper});
  }
  return out;
}

inline Json durations_json(const ProjectNetwork& net, std::span<const double> d) {
  Json j = Json::object();
  for (std::size_t k = 0; k < net.size(); ++k) j[net.activity(k).id] = number(d[k]);
  return j;
}

inline Json to_json(const PayoffMatrix& pm, const ProjectFile& p) {
  Json j = Json::object();
  Json rows = Json::array();
  for (Criterion row : kCriteria) {
    Json rj = Json::object();
    rj["optimizes"] = std::string(to_string(row));
    rj["durations"] = durations_json(p.network, pm.solutions[index(row)]);
    Json values = Json::object();
    for (Criterion col : kCriteria) values[std::string(to_string(col))] = number(pm.entries[index(row)][index(col)]);
    rj["values"] = values;
    rows.push_back(std::move(rj));
  }
  j["rows"] = rows;
  Json bounds = Json::object();
  for (Criterion c : kCriteria) bounds[std::string(to_string(c))] = detail::bounds_json(pm.bounds[index(c)]);
  j["bounds"] = bounds;
  Json div = Json::array();
  for (const auto& d : bound_divergences(pm, p)) {
    Json dj = Json::object();
    dj["criterion"] = std::string(to_string(d.criterion));
    dj["bound"] = d.upper ? "upper" : "lower";
    dj["computed"] = number(d.computed);
    dj["reference"] = number(d.reference);
    div.push_back(std::move(dj));
  }
  j["reference_divergence"] = div;
  return j;
}

inline Json to_json(const ValidationError& e) {
  Json list = Json::array();
  for (const auto& v : e.violations()) {
    Json vj = Json::object();
    vj["kind"] = std::string(to_string(v.kind));
    if (!v.activity.empty()) vj["activity"] = v.activity;
    if (!v.field.empty()) vj["field"] = v.field;
    vj["message"] = v.message;
    list.push_back(std::move(vj));
  }
  Json j = Json::object();
  j["error"] = "ValidationError";
  j["violations"] = list;
  return j;
}

}  // namespace pmfuzz::io
