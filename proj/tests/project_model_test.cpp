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

#include <algorithm>
#include <functional>
#include <random>

#include "catch_amalgamated.hpp"
#include "pmfuzz/bundled_fixtures.hpp"
#include "pmfuzz/io.hpp"
#include "pmfuzz/project_model.hpp"
#include "support/random_instances.hpp"

using namespace pmfuzz;
using Catch::Matchers::ContainsSubstring;

namespace {

ProjectNetwork table1() { return io::parse_project_text(*fixtures::find("table1")).network; }

Activity act(std::string id, std::vector<std::string> preds, double t, double tc, Money c, Money cc,
             double qc = 0.9) {
  Activity a;
  a.id = std::move(id);
  a.predecessors = std::move(preds);
  a.normal_time = t;
  a.crash_time = tc;
  a.normal_cost = c;
  a.crash_cost = cc;
  a.crash_quality = qc;
  return a;
}

std::vector<ViolationKind> kinds(const ValidationError& e) {
  std::vector<ViolationKind> out;
  for (const auto& v : e.violations()) out.push_back(v.kind);
  return out;
}

ValidationError catch_validation(std::vector<Activity> acts) {
  try {
    validate_network(std::move(acts));
  } catch (const ValidationError& e) {
    return e;
  }
  FAIL("expected ValidationError");
  throw;
}

// Longest source-to-sink path by explicit path enumeration.
double longest_path(const ProjectNetwork& net, const Durations& d) {
  std::function<double(std::size_t)> from = [&](std::size_t j) {
    double best = 0;
    for (std::size_t s : net.successors(j)) best = std::max(best, from(s));
    return d[j] + best;
  };
  double best = 0;
  for (std::size_t j = 0; j < net.size(); ++j) {
    if (net.predecessors(j).empty()) best = std::max(best, from(j));
  }
  return best;
}

}  // namespace

TEST_CASE("table1 network structure", "[project_model]") {
  const auto net = table1();
  CHECK(net.size() == 9);
  CHECK(net.edge_count() == 12);
  REQUIRE(net.sinks().size() == 1);
  CHECK(net.activity(net.sinks()[0]).id == "I");
  const auto& topo = net.topological_order();
  std::vector<std::size_t> pos(net.size());
  for (std::size_t k = 0; k < topo.size(); ++k) pos[topo[k]] = k;
  for (std::size_t j = 0; j < net.size(); ++j) {
    for (std::size_t p : net.predecessors(j)) CHECK(pos[p] < pos[j]);
  }
}

TEST_CASE("cpm golden makespans", "[project_model]") {
  const auto net = table1();
  const auto normal = analyze_cpm(net, net.normal_durations());
  const auto crash = analyze_cpm(net, net.crash_durations());
  CHECK(normal.schedule.makespan == 42);
  CHECK(crash.schedule.makespan == 29);
  const std::vector<std::string> critical{"A", "B", "D", "F", "I"};
  CHECK(critical_activities(net, net.normal_durations()) == critical);
  CHECK(critical_activities(net, net.crash_durations()) == critical);
  for (std::size_t j = 0; j < net.size(); ++j) {
    CHECK(normal.slack[j] >= 0);
    CHECK(normal.latest_starts[j] == normal.schedule.starts[j] + normal.slack[j]);
  }
}

TEST_CASE("single activity schedule", "[project_model]") {
  const auto net = validate_network({act("X", {}, 5, 3, 1000, 1600)});
  CHECK(earliest_start_schedule(net, std::vector<double>{4}).makespan == 4);
  CHECK(earliest_start_schedule(net, net.normal_durations()).makespan == 5);
  CHECK(critical_activities(net, net.crash_durations()) == std::vector<std::string>{"X"});
}

TEST_CASE("interpolation is exact at the endpoints", "[project_model]") {
  const auto net = table1();
  for (const Activity& a : net.activities()) {
    for (auto set : {CoefficientSet::kTable1, CoefficientSet::kAppendix}) {
      CHECK(interpolate_cost(a, a.normal_time, set) == a.normal_cost);
    }
    CHECK(interpolate_cost(a, a.crash_time, CoefficientSet::kTable1) == a.crash_cost);
    CHECK(interpolate_quality(a, a.normal_time) == a.normal_quality);
    CHECK(interpolate_quality(a, a.crash_time) == Catch::Approx(a.crash_quality).margin(1e-12));
  }
  CHECK(total_cost(net, net.normal_durations()) == 3060000);
  CHECK(total_cost(net, net.crash_durations()) == 4300000);
  CHECK(total_quality_loss(net, net.crash_durations()) == Catch::Approx(1.32).margin(1e-12));
  CHECK(total_quality_loss(net, net.normal_durations()) == 0);
}

TEST_CASE("appendix coefficients change only the listed activities", "[project_model]") {
  const auto net = table1();
  for (const Activity& a : net.activities()) {
    if (a.id == "B") CHECK(a.cost_slope(CoefficientSet::kAppendix) == 50000);
    else if (a.id == "E") CHECK(a.cost_slope(CoefficientSet::kAppendix) == 10000);
    else if (a.id == "H") CHECK(a.cost_slope(CoefficientSet::kAppendix) == 90000);
    else CHECK(a.cost_slope(CoefficientSet::kAppendix) == a.cost_slope(CoefficientSet::kTable1));
  }
  // crash totals: table1 4300000; appendix B 2*50000, E 10000, H 3*90000
  CHECK(total_cost(net, net.crash_durations(), CoefficientSet::kAppendix) == 4300000 - 150000 - 100000 - 180000 +
                                                                              100000 + 10000 + 270000);
}

TEST_CASE("interpolation is monotone in duration", "[project_model][property]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto net = testing::random_network(rng);
    for (const Activity& a : net.activities()) {
      if (a.fixed_duration()) continue;
      const double t1 = a.crash_time + std::uniform_real_distribution<double>(0, a.time_range())(rng);
      const double t2 = a.crash_time + std::uniform_real_distribution<double>(0, a.time_range())(rng);
      const double lo = std::min(t1, t2), hi = std::max(t1, t2);
      CHECK(interpolate_cost(a, lo) >= interpolate_cost(a, hi));
      CHECK(interpolate_quality(a, lo) <= interpolate_quality(a, hi));
    }
  }
}

TEST_CASE("duration outside the crash range throws", "[project_model]") {
  const Activity a = act("X", {}, 5, 3, 1000, 1600);
  CHECK_THROWS_AS(interpolate_cost(a, 2.5), DurationOutOfRange);
  CHECK_THROWS_AS(interpolate_quality(a, 5.5), DurationOutOfRange);
  CHECK_NOTHROW(interpolate_cost(a, 5 + 1e-12));
  const auto net = validate_network({a});
  CHECK_THROWS_AS(earliest_start_schedule(net, std::vector<double>{6}), DurationOutOfRange);
}

TEST_CASE("makespan equals the longest path", "[project_model][property]") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto net = testing::random_network(rng, {1, 10, 4, 0.3});
    Durations d(net.size());
    for (std::size_t j = 0; j < net.size(); ++j) {
      const Activity& a = net.activity(j);
      d[j] = a.crash_time + std::uniform_int_distribution<int>(0, static_cast<int>(a.time_range()))(rng);
    }
    const Schedule s = earliest_start_schedule(net, d);
    CHECK(s.makespan == longest_path(net, d));
    CHECK(satisfies_schedule_invariants(net, s, 1e-9));
    // at least one activity of every critical chain has zero slack
    CHECK_FALSE(critical_activities(net, d).empty());
  }
}

TEST_CASE("validation reports every violation", "[project_model]") {
  SECTION("cycle is named") {
    const auto e = catch_validation({act("A", {"C"}, 3, 2, 10, 20), act("B", {"A"}, 3, 2, 10, 20),
                                     act("C", {"B"}, 3, 2, 10, 20)});
    REQUIRE(kinds(e) == std::vector{ViolationKind::kCycleDetected});
    CHECK_THAT(e.violations()[0].message, ContainsSubstring("B -> C -> A -> B"));
  }
  SECTION("self loop") {
    const auto e = catch_validation({act("A", {"A"}, 3, 2, 10, 20)});
    CHECK(kinds(e) == std::vector{ViolationKind::kCycleDetected});
  }
  SECTION("unknown predecessor") {
    const auto e = catch_validation({act("A", {"Z"}, 3, 2, 10, 20)});
    REQUIRE(kinds(e) == std::vector{ViolationKind::kUnknownPredecessor});
    CHECK(e.violations()[0].activity == "A");
  }
  SECTION("duplicate id") {
    const auto e = catch_validation({act("A", {}, 3, 2, 10, 20), act("A", {}, 3, 2, 10, 20)});
    CHECK(kinds(e) == std::vector{ViolationKind::kDuplicateId});
  }
  SECTION("bound violations are itemized") {
    const auto e = catch_validation({act("A", {}, 2, 3, 10, 20),      // crash > normal
                                     act("B", {}, 3, 2, 30, 20),      // crash cost < normal cost
                                     act("C", {}, 3, 2, 10, 20, 1.5),  // quality above 1
                                     act("D", {}, 3, 0, 10, 20)});    // zero crash time
    CHECK(e.violations().size() >= 4);
    for (auto k : kinds(e)) CHECK(k == ViolationKind::kBoundViolation);
  }
  SECTION("several kinds at once") {
    const auto e = catch_validation({act("A", {"Q"}, 2, 3, 10, 20), act("B", {"B"}, 3, 2, 10, 20)});
    const auto k = kinds(e);
    CHECK(std::count(k.begin(), k.end(), ViolationKind::kUnknownPredecessor) == 1);
    CHECK(std::count(k.begin(), k.end(), ViolationKind::kBoundViolation) >= 1);
    CHECK(std::count(k.begin(), k.end(), ViolationKind::kCycleDetected) == 1);
  }
  SECTION("empty project") { CHECK_THROWS_AS(validate_network({}), ValidationError); }
}

TEST_CASE("fixed-duration activities are allowed", "[project_model]") {
  const auto net = validate_network({act("A", {}, 4, 4, 100, 100, 1.0), act("B", {"A"}, 3, 1, 10, 50)});
  CHECK(net.activity(0).fixed_duration());
  CHECK(net.cost_slope(0) == 0);
  CHECK(net.quality_slope(0) == 0);
  CHECK(interpolate_cost(net.activity(0), 4) == 100);
  CHECK(earliest_start_schedule(net, net.crash_durations()).makespan == 5);
}

TEST_CASE("aggregate quality", "[project_model]") {
  const auto net = table1();
  CHECK(aggregate_quality(net, 0) == 1);
  CHECK(aggregate_quality(net, 0.34) == Catch::Approx(1 - 0.34 / 9));
}
