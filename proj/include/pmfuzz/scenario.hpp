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

#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmfuzz/errors.hpp"
#include "pmfuzz/lp_core.hpp"
#include "pmfuzz/objectives.hpp"
#include "pmfuzz/project_model.hpp"

namespace pmfuzz {

/// Decision-maker constraints layered on top of the schedule model.
struct Scenario {
  std::map<std::string, double> quality_floors;  // activity id -> minimum quality
  std::optional<double> deadline;                // cap on the makespan
  std::optional<double> budget_cap;              // cap on total cost
  std::map<std::string, double> duration_locks;  // activity id -> fixed duration
  std::map<Criterion, CriterionBounds> bound_overrides;
  bool integer_mode = true;
  double lambda_tolerance = 1e-7;
  std::optional<CoefficientSet> coefficient_set;  // overrides the project's set

  CoefficientSet coefficients_or(CoefficientSet fallback) const {
    return coefficient_set.value_or(fallback);
  }
};

inline bool is_whole(double x) { return std::isfinite(x) && x == std::floor(x); }

/// Throws ValidationError listing every way `s` does not fit `net`.
inline void validate_scenario(const ProjectNetwork& net, const Scenario& s) {
  std::vector<Violation> out;
  auto unknown = [&](const std::string& id, const char* field) {
    out.push_back({ViolationKind::kUnknownActivityInScenario, id, field,
                   std::string(field) + " names unknown activity " + id});
  };
  auto bad = [&](std::string id, std::string field, std::string message) {
    out.push_back({ViolationKind::kBoundViolation, std::move(id), std::move(field), std::move(message)});
  };

  for (const auto& [id, floor] : s.quality_floors) {
    auto j = net.index_of(id);
    if (!j) { unknown(id, "quality_floors"); continue; }
    const Activity& a = net.activity(*j);
    if (!(floor >= a.crash_quality && floor <= a.normal_quality)) {
      bad(id, "quality_floors", "quality floor " + std::to_string(floor) + " for " + id +
                                    " outside [crash_quality, normal_quality]");
    }
  }
  for (const auto& [id, lock] : s.duration_locks) {
    auto j = net.index_of(id);
    if (!j) { unknown(id, "duration_locks"); continue; }
    const Activity& a = net.activity(*j);
    if (!(lock >= a.crash_time && lock <= a.normal_time)) {
      bad(id, "duration_locks", "locked duration for " + id + " outside [crash_time, normal_time]");
    } else if (s.integer_mode && !is_whole(lock)) {
      bad(id, "duration_locks", "locked duration for " + id + " is not whole in integer mode");
    }
  }
  if (s.deadline && !(std::isfinite(*s.deadline) && *s.deadline >= 0)) {
    bad("", "deadline", "deadline must be finite and non-negative");
  }
  if (s.budget_cap && !std::isfinite(*s.budget_cap)) {
    bad("", "budget_cap", "budget_cap must be finite");
  }
  for (const auto& [c, b] : s.bound_overrides) {
    if (!(std::isfinite(b.lower) && std::isfinite(b.upper) && b.lower <= b.upper)) {
      bad("", "bound_overrides", "bounds for " + std::string(to_string(c)) + " must satisfy lower <= upper");
    }
  }
  if (!(s.lambda_tolerance > 0 && s.lambda_tolerance < 1)) {
    bad("", "lambda_tolerance", "lambda_tolerance must lie in (0, 1)");
  }
  if (s.integer_mode) {
    for (const Activity& a : net.activities()) {
      if (!is_whole(a.normal_time) || !is_whole(a.crash_time)) {
        bad(a.id, "normal_time", "activity " + a.id + " has fractional times in integer mode");
      }
    }
  }
  if (!out.empty()) throw ValidationError(std::move(out));
}

/// Appends the scenario's quality-floor, deadline, budget, and lock rows.
inline void apply_scenario(lp::LinearModel& model, const ProjectNetwork& net, const Scenario& s,
                           CoefficientSet set = CoefficientSet::kTable1) {
  validate_scenario(net, s);
  const ModelLayout layout{net.size()};
  for (const auto& [id, floor] : s.quality_floors) {
    const std::size_t j = *net.index_of(id);
    const Activity& a = net.activity(j);
    const double slope = a.quality_slope();
    if (slope == 0.0) continue;  // quality cannot drop
    // slope * (t_j - T_j) <= q_j - floor
    model.add_constraint({{layout.duration(j), -slope}}, lp::Relation::kLessEqual,
                         a.normal_quality - floor - slope * a.normal_time, "floor_" + id);
  }
  if (s.deadline) {
    model.add_constraint({{layout.makespan(), 1.0}}, lp::Relation::kLessEqual, *s.deadline, "deadline");
  }
  if (s.budget_cap) {
    add_upper_cap(model, criterion_expression(net, Criterion::kCost, set), *s.budget_cap, "budget");
  }
  for (const auto& [id, lock] : s.duration_locks) {
    const std::size_t j = *net.index_of(id);
    model.add_constraint({{layout.duration(j), 1.0}}, lp::Relation::kEqual, lock, "lock_" + id);
  }
}

}  // namespace pmfuzz
