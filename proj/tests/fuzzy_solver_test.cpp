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

#include <random>

#include "catch_amalgamated.hpp"
#include "pmfuzz/bundled_fixtures.hpp"
#include "pmfuzz/fuzzy_solver.hpp"
#include "pmfuzz/io.hpp"
#include "support/random_instances.hpp"

using namespace pmfuzz;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

io::ProjectFile table1() { return io::parse_project_text(*fixtures::find("table1")); }
Scenario scenario(const char* name) { return io::parse_scenario_text(*fixtures::find(name)); }

Durations durations(const SolveResult& r) { return r.schedule.durations; }

// Every scenario rule holds for the returned plan.
void check_admissible(const ProjectNetwork& net, const Scenario& s, const SolveResult& r) {
  CHECK(satisfies_schedule_invariants(net, r.schedule, 1e-9));
  for (const auto& [id, floor] : s.quality_floors) {
    const std::size_t j = *net.index_of(id);
    CHECK(interpolate_quality(net.activity(j), r.schedule.durations[j]) >= floor - 1e-9);
  }
  for (const auto& [id, lock] : s.duration_locks) CHECK(r.schedule.durations[*net.index_of(id)] == lock);
  if (s.deadline) CHECK(r.time() <= *s.deadline + 1e-9);
  if (s.budget_cap) CHECK(r.cost() <= *s.budget_cap + 1e-6);
}

}  // namespace

TEST_CASE("unconstrained solve with published bounds", "[fuzzy_solver]") {
  const auto p = table1();
  const auto s = scenario("paper-bounds");
  const SolveResult r = solve_scenario(p.network, s, p.coefficient_set);
  CHECK(std::abs(r.lambda - 0.7997312) <= 1e-4);
  CHECK(r.time() == 34);
  CHECK(r.binding == std::vector{Criterion::kTime});
  // lexicographic polish (time, cost, quality loss) picks the cheapest plan at lambda*
  CHECK(r.cost() == 3430000);
  CHECK(r.quality_loss() == Approx(0.38).margin(1e-9));
  CHECK(durations(r) == Durations{6, 8, 4, 5, 3, 5, 5, 6, 10});
  check_admissible(p.network, s, r);
}

TEST_CASE("quality floors lower lambda", "[fuzzy_solver]") {
  const auto p = table1();
  const auto s = scenario("paper-quality-floors");
  const SolveResult r = solve_scenario(p.network, s, p.coefficient_set);
  CHECK(std::abs(r.lambda - 0.6133791) <= 1e-4);
  CHECK(r.time() == 35);
  CHECK(r.cost() == 3390000);
  CHECK(r.quality_loss() == Approx(0.41).margin(1e-9));
  CHECK(durations(r) == Durations{6, 8, 4, 4, 3, 7, 5, 6, 10});
  check_admissible(p.network, s, r);
}

TEST_CASE("deadline-38 scenario matches the frozen oracle answer", "[fuzzy_solver]") {
  const auto p = table1();
  const SolveResult r = solve_scenario(p.network, scenario("deadline-38"), p.coefficient_set);
  CHECK(r.lambda == Approx(0.8370395292976784).margin(1e-12));
  CHECK(durations(r) == Durations{6, 8, 4, 4, 3, 5, 5, 6, 10});
  CHECK(r.cost() == 3495000);
  CHECK(r.time() == 33);
  CHECK(r.binding == std::vector{Criterion::kQualityLoss});
}

TEST_CASE("infeasible deadline is explained", "[fuzzy_solver]") {
  const auto p = table1();
  try {
    solve_scenario(p.network, scenario("deadline-28"), p.coefficient_set);
    FAIL("expected InfeasibleScenario");
  } catch (const InfeasibleScenario& e) {
    CHECK_THAT(e.what(), ContainsSubstring("deadline 28"));
    CHECK_THAT(e.what(), ContainsSubstring("29"));
  }
}

TEST_CASE("infeasible budget is explained", "[fuzzy_solver]") {
  const auto p = table1();
  Scenario s;
  s.budget_cap = 3000000;
  CHECK_THROWS_WITH(solve_scenario(p.network, s), ContainsSubstring("budget cap"));
}

TEST_CASE("floors that clash with a deadline", "[fuzzy_solver]") {
  const auto p = table1();
  Scenario s;
  s.quality_floors = {{"A", 1.0}, {"B", 1.0}, {"D", 1.0}, {"F", 1.0}, {"I", 1.0}};
  s.deadline = 41;
  CHECK_THROWS_AS(solve_scenario(p.network, s), InfeasibleScenario);
}

TEST_CASE("scenario validation", "[fuzzy_solver]") {
  const auto p = table1();
  Scenario s;
  s.quality_floors["Z"] = 0.9;
  s.duration_locks["A"] = 11;
  s.lambda_tolerance = 0;
  try {
    solve_scenario(p.network, s);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    REQUIRE(e.violations().size() == 3);
    CHECK(e.violations()[0].kind == ViolationKind::kUnknownActivityInScenario);
    CHECK(e.violations()[1].kind == ViolationKind::kBoundViolation);
  }
  Scenario frac;
  frac.duration_locks["A"] = 7.5;
  CHECK_THROWS_AS(solve_scenario(p.network, frac), ValidationError);
  frac.integer_mode = false;
  CHECK_NOTHROW(solve_scenario(p.network, frac));
}

TEST_CASE("locks are honoured", "[fuzzy_solver]") {
  const auto p = table1();
  Scenario s = scenario("paper-bounds");
  s.duration_locks = {{"A", 10}, {"I", 7}};
  const SolveResult r = solve_scenario(p.network, s, p.coefficient_set);
  check_admissible(p.network, s, r);
}

TEST_CASE("degenerate bounds give lambda one", "[fuzzy_solver]") {
  const auto p = io::parse_project_text(*fixtures::find("fixed-activity"));
  const SolveResult r = solve_scenario(p.network, {});
  CHECK(r.lambda == 1);
  for (double mu : r.memberships) CHECK(mu == 1);
  CHECK(r.binding.empty());
  CHECK(r.time() == 4);
}

TEST_CASE("single crashable activity", "[fuzzy_solver]") {
  const auto p = io::parse_project_text(*fixtures::find("single-activity"));
  const SolveResult r = solve_scenario(p.network, {});
  // every plan trades one criterion against the others symmetrically; the
  // optimum sits at an interior duration
  CHECK(r.lambda > 0);
  CHECK(r.lambda < 1);
  CHECK(r.time() >= 3);
  CHECK(r.time() <= 5);
}

TEST_CASE("many identical parallel activities stay cheap", "[fuzzy_solver]") {
  // symmetric instances used to blow up the strict-improvement proof
  std::vector<Activity> acts;
  for (int k = 0; k < 12; ++k) {
    Activity a;
    a.id = "T" + std::to_string(k);
    a.normal_time = 10;
    a.crash_time = 1;
    a.normal_cost = 1000;
    a.crash_cost = 2000;
    a.crash_quality = 0.5;
    acts.push_back(a);
  }
  const auto net = validate_network(acts);
  const SolveResult r = solve_scenario(net, {});
  CHECK(r.stats.milp_nodes < 5000);
  // every criterion scales with the count, so lambda matches the six-activity
  // instance, which the oracle enumerates (10^6 vectors) to 0.339243631
  CHECK(r.lambda == Approx(0.339243631).margin(1e-9));
  CHECK(r.time() == 5);
}

TEST_CASE("evaluate_plan computes lambda as the minimum degree", "[fuzzy_solver]") {
  const auto p = table1();
  const BoundsSet bounds{CriterionBounds{3060000, 4250000}, CriterionBounds{29, 42}, CriterionBounds{0, 1}};
  const Durations d{6, 7, 4, 6, 3, 5, 5, 6, 10};
  const SolveResult r = evaluate_plan(p.network, d, bounds, CoefficientSet::kAppendix,
                                      [](const MembershipSpec& s, double z) { return membership(s, z); });
  CHECK(r.cost() == 3440000);
  CHECK(r.time() == 34);
  CHECK(r.quality_loss() == Approx(0.34).margin(1e-9));
  CHECK(r.lambda == *std::min_element(r.memberships.begin(), r.memberships.end()));
  CHECK(r.aggregate_quality == Approx(1 - 0.34 / 9));
}

TEST_CASE("feasibility is monotone in lambda", "[fuzzy_solver][property]") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto net = testing::random_network(rng, {2, 6, 4, 0.35});
    const Scenario s = testing::random_scenario(rng, net, trial % 3);
    BoundsSet bounds;
    try {
      bounds = resolve_bounds(net, s);
    } catch (const Error&) {
      continue;
    }
    const auto specs = membership_specs(bounds);
    bool was_feasible = true;
    for (int k = 1; k < 40; ++k) {
      const double lambda = k / 40.0;
      lp::LinearModel m = build_schedule_model(net, true);
      apply_scenario(m, net, s);
      for (Criterion c : kCriteria) {
        const auto& spec = specs[index(c)];
        const auto e = criterion_expression(net, c);
        if (spec.degenerate()) add_upper_cap(m, e, spec.lower + 1e-9 * std::max(1.0, spec.lower));
        else add_upper_cap(m, e, invert_membership(spec, lambda));
      }
      const bool feasible = lp::check_feasible(m).feasible;
      if (!was_feasible) CHECK_FALSE(feasible);
      was_feasible = feasible;
    }
  }
}

TEST_CASE("adding a constraint never raises lambda", "[fuzzy_solver][property]") {
  std::mt19937_64 rng(31);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto net = testing::random_network(rng, {2, 7, 4, 0.35});
    Scenario loose = testing::random_scenario(rng, net, trial % 2);
    // fixed bounds so only the feasible set changes
    loose.bound_overrides = {};
    const BoundsSet bounds = resolve_bounds(net, Scenario{});
    for (Criterion c : kCriteria) loose.bound_overrides[c] = bounds[index(c)];
    Scenario tight = loose;
    testing::tighten(rng, net, tight);
    double lambda_loose;
    try {
      lambda_loose = solve_scenario(net, loose).lambda;
    } catch (const InfeasibleScenario&) {
      continue;
    }
    try {
      const double lambda_tight = solve_scenario(net, tight).lambda;
      CHECK(lambda_tight <= lambda_loose + 1e-6);
      ++compared;
    } catch (const InfeasibleScenario&) {
      // an empty feasible set is the extreme case of tightening
    }
  }
  CHECK(compared >= 30);
}

TEST_CASE("continuous durations relax the integer solve", "[fuzzy_solver][property]") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    const auto net = testing::random_network(rng, {2, 6, 4, 0.35});
    Scenario integer;
    const BoundsSet bounds = resolve_bounds(net, integer);
    Scenario relaxed = integer;
    relaxed.integer_mode = false;
    const double li = solve_max_lambda(net, bounds, integer).lambda;
    const double lr = solve_max_lambda(net, bounds, relaxed).lambda;
    CHECK(lr >= li - 1e-6);
  }
}

TEST_CASE("solves are deterministic", "[fuzzy_solver][property]") {
  const auto p = table1();
  const auto s = scenario("paper-quality-floors");
  const auto a = io::to_json(solve_scenario(p.network, s, p.coefficient_set)).dump();
  const auto b = io::to_json(solve_scenario(p.network, s, p.coefficient_set)).dump();
  CHECK(a == b);
}
