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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pmfuzz/errors.hpp"
#include "pmfuzz/lp_core.hpp"
#include "pmfuzz/project_model.hpp"

namespace pmfuzz {

/// The three minimized criteria, in canonical order.
enum class Criterion : std::size_t { kCost = 0, kTime = 1, kQualityLoss = 2 };

inline constexpr std::array<Criterion, 3> kCriteria{Criterion::kCost, Criterion::kTime,
                                                    Criterion::kQualityLoss};

inline constexpr std::size_t index(Criterion c) { return static_cast<std::size_t>(c); }

inline std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::kCost: return "cost";
    case Criterion::kTime: return "time";
    case Criterion::kQualityLoss: return "quality_loss";
  }
  return "";
}

inline std::optional<Criterion> parse_criterion(std::string_view s) {
  for (Criterion c : kCriteria) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

using CriterionValues = std::array<double, 3>;

struct CriterionBounds {
  double lower = 0;
  double upper = 0;

  bool degenerate() const { return !(upper > lower); }
  friend bool operator==(const CriterionBounds&, const CriterionBounds&) = default;
};

using BoundsSet = std::array<CriterionBounds, 3>;

/// Variable indices of the crashing model: T_j, then Y_j, then Y_End.
struct ModelLayout {
  std::size_t activities = 0;

  std::size_t duration(std::size_t j) const { return j; }
  std::size_t start(std::size_t j) const { return activities + j; }
  std::size_t makespan() const { return 2 * activities; }
};

/// constant + sum(terms), over crashing-model variables.
struct LinearExpression {
  std::vector<lp::Term> terms;
  double constant = 0;
};

inline LinearExpression criterion_expression(const ProjectNetwork& net, Criterion c,
                                             CoefficientSet set = CoefficientSet::kTable1) {
  const ModelLayout layout{net.size()};
  LinearExpression e;
  switch (c) {
    case Criterion::kTime:
      e.terms.push_back({layout.makespan(), 1.0});
      break;
    case Criterion::kCost:
      for (std::size_t j = 0; j < net.size(); ++j) {
        const Activity& a = net.activity(j);
        const double slope = a.cost_slope(set);
        e.constant += static_cast<double>(a.normal_cost) + slope * a.normal_time;
        if (slope != 0.0) e.terms.push_back({layout.duration(j), -slope});
      }
      break;
    case Criterion::kQualityLoss:
      for (std::size_t j = 0; j < net.size(); ++j) {
        const Activity& a = net.activity(j);
        const double slope = a.quality_slope();
        e.constant += slope * a.normal_time;
        if (slope != 0.0) e.terms.push_back({layout.duration(j), -slope});
      }
      break;
  }
  return e;
}

inline LinearExpression total_duration_expression(const ProjectNetwork& net) {
  LinearExpression e;
  for (std::size_t j = 0; j < net.size(); ++j) e.terms.push_back({j, 1.0});
  return e;
}

/// Duration bounds, precedence rows, and sink rows; no objective.
inline lp::LinearModel build_schedule_model(const ProjectNetwork& net, bool integer_mode = true) {
  const ModelLayout layout{net.size()};
  lp::LinearModel m;
  for (const Activity& a : net.activities()) {
    m.add_variable("T_" + a.id, a.crash_time, a.normal_time, integer_mode);
  }
  for (const Activity& a : net.activities()) m.add_variable("Y_" + a.id, 0.0, lp::kInfinity);
  m.add_variable("Y_End", 0.0, lp::kInfinity);

  for (std::size_t j = 0; j < net.size(); ++j) {
    for (std::size_t i : net.predecessors(j)) {
      m.add_constraint({{layout.start(i), 1.0}, {layout.duration(i), 1.0}, {layout.start(j), -1.0}},
                       lp::Relation::kLessEqual, 0.0,
                       "prec_" + net.activity(i).id + "_" + net.activity(j).id);
    }
  }
  for (std::size_t j : net.sinks()) {
    m.add_constraint({{layout.start(j), 1.0}, {layout.duration(j), 1.0}, {layout.makespan(), -1.0}},
                     lp::Relation::kLessEqual, 0.0, "end_" + net.activity(j).id);
  }
  return m;
}

inline void set_objective(lp::LinearModel& m, const LinearExpression& e, lp::Sense sense) {
  m.set_objective(e.terms, sense, e.constant);
}

/// Appends `expression <= cap`.
inline void add_upper_cap(lp::LinearModel& m, const LinearExpression& e, double cap,
                          std::string name = {}) {
  m.add_constraint(e.terms, lp::Relation::kLessEqual, cap - e.constant, std::move(name));
}

inline void add_lower_cap(lp::LinearModel& m, const LinearExpression& e, double floor,
                          std::string name = {}) {
  m.add_constraint(e.terms, lp::Relation::kGreaterEqual, floor - e.constant, std::move(name));
}

inline lp::LinearModel build_min_time_model(const ProjectNetwork& net, bool integer_mode = true) {
  lp::LinearModel m = build_schedule_model(net, integer_mode);
  set_objective(m, criterion_expression(net, Criterion::kTime), lp::Sense::kMinimize);
  return m;
}

/// Objective carries the constant sum of normal costs, so optima are absolute
/// project costs.
inline lp::LinearModel build_min_cost_model(const ProjectNetwork& net,
                                            CoefficientSet set = CoefficientSet::kTable1,
                                            bool integer_mode = true) {
  lp::LinearModel m = build_schedule_model(net, integer_mode);
  set_objective(m, criterion_expression(net, Criterion::kCost, set), lp::Sense::kMinimize);
  return m;
}

inline lp::LinearModel build_min_quality_loss_model(const ProjectNetwork& net,
                                                    bool integer_mode = true) {
  lp::LinearModel m = build_schedule_model(net, integer_mode);
  set_objective(m, criterion_expression(net, Criterion::kQualityLoss), lp::Sense::kMinimize);
  return m;
}

inline CriterionValues evaluate_criteria(const ProjectNetwork& net, std::span<const double> durations,
                                         CoefficientSet set = CoefficientSet::kTable1) {
  CriterionValues v{};
  v[index(Criterion::kCost)] = total_cost(net, durations, set);
  v[index(Criterion::kTime)] = earliest_start_schedule(net, durations).makespan;
  v[index(Criterion::kQualityLoss)] = total_quality_loss(net, durations);
  return v;
}

/// Reads T_j out of a crashing-model solution, clamped into [t'_j, t_j].
inline Durations extract_durations(const ProjectNetwork& net, std::span<const double> values) {
  Durations d(net.size());
  for (std::size_t j = 0; j < net.size(); ++j) {
    const Activity& a = net.activity(j);
    d[j] = std::clamp(values[j], a.crash_time, a.normal_time);
  }
  return d;
}

struct SolveCounters {
  std::size_t milp_solves = 0;
  std::size_t milp_nodes = 0;
};

/// One stage of a lexicographic solve.
struct LexStep {
  LinearExpression expression;
  lp::Sense sense = lp::Sense::kMinimize;
};

/// Optimizes each step in turn, freezing every earlier optimum (with a
/// relative slack of 1e-9) before the next. Returns nullopt when the model is
/// infeasible.
inline std::optional<lp::SolveOutcome> lexicographic_solve(lp::LinearModel model,
                                                           std::span<const LexStep> steps,
                                                           SolveCounters* counters = nullptr) {
  std::optional<lp::SolveOutcome> last;
  for (const LexStep& step : steps) {
    model.set_objective(step.expression.terms, step.sense, step.expression.constant);
    lp::SolveOutcome r = lp::solve_milp(model);
    if (counters) {
      ++counters->milp_solves;
      counters->milp_nodes += r.stats.nodes;
    }
    if (r.status == lp::Status::kUnbounded) throw ModelMalformed("criterion model is unbounded");
    if (!r.optimal()) return std::nullopt;
    const double slack = 1e-9 * std::max(1.0, std::abs(r.objective));
    if (step.sense == lp::Sense::kMinimize) {
      add_upper_cap(model, step.expression, r.objective + slack);
    } else {
      add_lower_cap(model, step.expression, r.objective - slack);
    }
    last = std::move(r);
  }
  return last;
}

/// Criterion values of each single-criterion optimum (rows) under every
/// criterion (columns), with per-column bounds.
struct PayoffMatrix {
  std::array<Durations, 3> solutions;
  std::array<CriterionValues, 3> entries{};
  BoundsSet bounds{};
  SolveCounters counters;
};

/// Solves the three single-criterion models. Each row first optimizes its own
/// criterion, then pushes the remaining freedom toward the duration extreme
/// that criterion favours (shortest for time, longest for cost and quality
/// loss), then settles any tie by the other criteria in canonical order.
inline PayoffMatrix payoff_matrix(const ProjectNetwork& net,
                                  CoefficientSet set = CoefficientSet::kTable1,
                                  bool integer_mode = true) {
  PayoffMatrix pm;
  const lp::LinearModel skeleton = build_schedule_model(net, integer_mode);
  for (Criterion row : kCriteria) {
    std::vector<LexStep> steps;
    steps.push_back({criterion_expression(net, row, set), lp::Sense::kMinimize});
    steps.push_back({total_duration_expression(net),
                     row == Criterion::kTime ? lp::Sense::kMinimize : lp::Sense::kMaximize});
    for (Criterion other : kCriteria) {
      if (other != row) steps.push_back({criterion_expression(net, other, set), lp::Sense::kMinimize});
    }
    auto r = lexicographic_solve(skeleton, steps, &pm.counters);
    if (!r) throw ModelMalformed("criterion model has no feasible schedule");
    pm.solutions[index(row)] = extract_durations(net, r->values);
    pm.entries[index(row)] = evaluate_criteria(net, pm.solutions[index(row)], set);
  }
  for (Criterion col : kCriteria) {
    double lo = pm.entries[0][index(col)];
    double hi = lo;
    for (const auto& e : pm.entries) {
      lo = std::min(lo, e[index(col)]);
      hi = std::max(hi, e[index(col)]);
    }
    pm.bounds[index(col)] = {lo, hi};
  }
  return pm;
}

}  // namespace pmfuzz
