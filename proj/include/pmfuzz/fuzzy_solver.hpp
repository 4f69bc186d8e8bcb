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

// Max-lambda solver: finds the schedule whose weakest criterion membership is
// as high as possible.
//
// For a trial degree lambda every membership constraint mu_k(Z_k) >= lambda
// turns into a linear cap Z_k <= cap_k(lambda), so each trial is one integer
// feasibility check. Feasibility only shrinks as lambda grows, which makes
// bisection valid. In integer mode the bracket is then closed exactly: the
// lower end is raised to the realized lambda of each witness until no strictly
// better schedule exists. The returned plan is the lexicographic optimum
// (time, then cost, then quality loss) among schedules at that lambda.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "pmfuzz/errors.hpp"
#include "pmfuzz/lp_core.hpp"
#include "pmfuzz/membership.hpp"
#include "pmfuzz/objectives.hpp"
#include "pmfuzz/project_model.hpp"
#include "pmfuzz/scenario.hpp"

namespace pmfuzz {

struct SolverStatistics {
  std::size_t bisection_iterations = 0;
  std::size_t milp_solves = 0;
  std::size_t milp_nodes = 0;
};

struct SolveResult {
  double lambda = 0;
  std::vector<std::string> activity_ids;
  Schedule schedule;
  CriterionValues criteria{};
  CriterionValues memberships{};
  double aggregate_quality = 1;
  std::vector<Criterion> binding;
  SolverStatistics stats;

  double cost() const { return criteria[index(Criterion::kCost)]; }
  double time() const { return criteria[index(Criterion::kTime)]; }
  double quality_loss() const { return criteria[index(Criterion::kQualityLoss)]; }
};

inline std::array<MembershipSpec, 3> membership_specs(const BoundsSet& bounds) {
  std::array<MembershipSpec, 3> specs;
  for (Criterion c : kCriteria) specs[index(c)] = MembershipSpec(c, bounds[index(c)]);
  return specs;
}

namespace detail {

inline constexpr double kDegenerateTolerance = 1e-9;

inline double criterion_tolerance(double z) { return 1e-9 * std::max(1.0, std::abs(z)); }

}  // namespace detail

/// Evaluates a duration vector into a full SolveResult (stats left empty).
/// `value_of(spec, z)` supplies membership degrees of non-degenerate criteria.
template <class ValueFn>
SolveResult evaluate_plan(const ProjectNetwork& net, std::span<const double> durations,
                          const BoundsSet& bounds, CoefficientSet set, ValueFn value_of) {
  SolveResult r;
  for (const Activity& a : net.activities()) r.activity_ids.push_back(a.id);
  r.schedule = earliest_start_schedule(net, durations);
  r.criteria = evaluate_criteria(net, durations, set);
  const auto specs = membership_specs(bounds);
  double lambda = 1.0;
  for (Criterion c : kCriteria) {
    const auto& spec = specs[index(c)];
    const double z = r.criteria[index(c)];
    double mu;
    if (spec.degenerate()) {
      mu = z <= spec.lower + detail::criterion_tolerance(spec.lower) ? 1.0 : 0.0;
    } else {
      mu = value_of(spec, z);
      lambda = std::min(lambda, mu);
    }
    r.memberships[index(c)] = mu;
  }
  r.lambda = std::clamp(lambda, 0.0, 1.0);
  for (Criterion c : kCriteria) {
    if (!specs[index(c)].degenerate() && std::abs(r.memberships[index(c)] - r.lambda) <= 1e-9) {
      r.binding.push_back(c);
    }
  }
  r.aggregate_quality = aggregate_quality(net, r.criteria[index(Criterion::kQualityLoss)]);
  return r;
}

/// Human-readable reason a scenario admits no schedule.
inline std::string explain_infeasibility(const ProjectNetwork& net, const Scenario& s,
                                         CoefficientSet set) {
  // Shortest and longest durations each activity may still take.
  Durations shortest(net.size());
  Durations longest(net.size());
  for (std::size_t j = 0; j < net.size(); ++j) {
    const Activity& a = net.activity(j);
    shortest[j] = a.crash_time;
    longest[j] = a.normal_time;
    if (auto it = s.quality_floors.find(a.id); it != s.quality_floors.end() && a.quality_slope() > 0) {
      double t_min = a.normal_time - (a.normal_quality - it->second) / a.quality_slope();
      if (s.integer_mode) t_min = std::ceil(t_min - 1e-9);
      shortest[j] = std::clamp(t_min, a.crash_time, a.normal_time);
    }
    if (auto it = s.duration_locks.find(a.id); it != s.duration_locks.end()) {
      shortest[j] = longest[j] = it->second;
    }
  }
  std::ostringstream os;
  const double min_makespan = earliest_start_schedule(net, shortest).makespan;
  if (s.deadline && *s.deadline < min_makespan - 1e-9) {
    os << "deadline " << *s.deadline << " is below the shortest achievable makespan "
       << min_makespan;
    return os.str();
  }
  const double min_cost = total_cost(net, longest, set);
  if (s.budget_cap && *s.budget_cap < min_cost - 1e-6) {
    os.precision(15);
    os << "budget cap " << *s.budget_cap << " is below the cheapest admissible plan cost "
       << min_cost;
    return os.str();
  }
  for (const auto& [c, b] : s.bound_overrides) {
    if (b.degenerate()) {
      os << "degenerate " << to_string(c) << " bounds force " << to_string(c) << " <= " << b.lower
         << ", which no admissible schedule meets together with the other constraints";
      return os.str();
    }
  }
  return "no schedule satisfies the combined scenario constraints";
}

/// Payoff-derived bounds with the scenario's overrides applied. The payoff
/// matrix is only computed when some criterion lacks an override.
inline BoundsSet resolve_bounds(const ProjectNetwork& net, const Scenario& s,
                                CoefficientSet project_set = CoefficientSet::kTable1) {
  BoundsSet bounds{};
  bool need_payoff = false;
  for (Criterion c : kCriteria) {
    if (!s.bound_overrides.contains(c)) need_payoff = true;
  }
  if (need_payoff) bounds = payoff_matrix(net, s.coefficients_or(project_set), s.integer_mode).bounds;
  for (const auto& [c, b] : s.bound_overrides) bounds[index(c)] = b;
  return bounds;
}

template <MembershipFamily Family = HyperbolicMembership>
SolveResult solve_max_lambda(const ProjectNetwork& net, const BoundsSet& bounds, const Scenario& s,
                             CoefficientSet project_set = CoefficientSet::kTable1,
                             Family family = {}) {
  validate_scenario(net, s);
  const CoefficientSet set = s.coefficients_or(project_set);
  const auto specs = membership_specs(bounds);
  std::array<LinearExpression, 3> expressions;
  for (Criterion c : kCriteria) expressions[index(c)] = criterion_expression(net, c, set);

  lp::LinearModel base = build_schedule_model(net, s.integer_mode);
  apply_scenario(base, net, s, set);
  bool any_active = false;
  for (Criterion c : kCriteria) {
    const auto& spec = specs[index(c)];
    if (spec.degenerate()) {
      add_upper_cap(base, expressions[index(c)],
                    spec.lower + detail::criterion_tolerance(spec.lower),
                    "degenerate_" + std::string(to_string(c)));
    } else {
      any_active = true;
    }
  }

  SolverStatistics stats;
  auto value_of = [&](const MembershipSpec& spec, double z) { return family.value(spec, z); };
  auto lambda_of = [&](std::span<const double> values) {
    const Durations d = extract_durations(net, values);
    return evaluate_plan(net, d, bounds, set, value_of).lambda;
  };
  // Model with every active membership capped at degree `lambda`.
  auto capped = [&](double lambda, bool with_slack) {
    lp::LinearModel m = base;
    for (Criterion c : kCriteria) {
      const auto& spec = specs[index(c)];
      if (spec.degenerate()) continue;
      double cap = family.cap(spec, lambda);
      if (with_slack) cap += detail::criterion_tolerance(cap);
      add_upper_cap(m, expressions[index(c)], cap, "membership_" + std::string(to_string(c)));
    }
    return m;
  };
  auto feasible = [&](const lp::LinearModel& m) {
    lp::FeasibilityResult r = lp::check_feasible(m);
    ++stats.milp_solves;
    stats.milp_nodes += r.stats.nodes;
    return r;
  };

  const lp::FeasibilityResult start = feasible(base);
  if (!start.feasible) throw InfeasibleScenario(explain_infeasibility(net, s, set));

  double lo = lambda_of(start.witness);
  double hi = 1.0;
  if (!any_active) {
    lo = 1.0;
  } else {
    while (hi - lo > s.lambda_tolerance) {
      const double mid = 0.5 * (lo + hi);
      ++stats.bisection_iterations;
      const lp::FeasibilityResult r = feasible(capped(mid, false));
      if (r.feasible) {
        lo = std::max(mid, lambda_of(r.witness));
        hi = std::max(hi, lo);
      } else {
        hi = mid;
      }
    }
    if (s.integer_mode) {
      // Criterion values live on a lattice, so strict improvement terminates.
      for (int guard = 0; guard < 100000; ++guard) {
        const double trial = lo + 1e-9;
        if (trial >= 1.0) break;
        const lp::FeasibilityResult r = feasible(capped(trial, false));
        if (!r.feasible) break;
        const double achieved = lambda_of(r.witness);
        if (achieved <= lo + 1e-12) break;
        lo = achieved;
      }
    }
  }

  lp::LinearModel polish = lo > 0.0 && lo < 1.0 ? capped(lo, true) : base;
  const std::array<LexStep, 3> steps{
      LexStep{expressions[index(Criterion::kTime)], lp::Sense::kMinimize},
      LexStep{expressions[index(Criterion::kCost)], lp::Sense::kMinimize},
      LexStep{expressions[index(Criterion::kQualityLoss)], lp::Sense::kMinimize}};
  SolveCounters counters;
  auto best = lexicographic_solve(std::move(polish), steps, &counters);
  stats.milp_solves += counters.milp_solves;
  stats.milp_nodes += counters.milp_nodes;
  if (!best) throw InfeasibleScenario(explain_infeasibility(net, s, set));

  const Durations durations = extract_durations(net, best->values);
  SolveResult result = evaluate_plan(net, durations, bounds, set, value_of);
  result.stats = stats;
  return result;
}

/// Resolves bounds from the payoff matrix and overrides, then solves.
inline SolveResult solve_scenario(const ProjectNetwork& net, const Scenario& s,
                                  CoefficientSet project_set = CoefficientSet::kTable1) {
  validate_scenario(net, s);
  return solve_max_lambda(net, resolve_bounds(net, s, project_set), s, project_set);
}

}  // namespace pmfuzz
