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

// Activity-on-node project networks: validation, CPM passes, and the linear
// cost/quality trade-off lines of each activity.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pmfuzz/errors.hpp"

namespace pmfuzz {

/// Money in integer minor units.
using Money = std::int64_t;

/// Per-activity durations in canonical (input) order.
using Durations = std::vector<double>;

/// Which per-activity cost slopes are used when pricing a duration.
///
/// kTable1 derives every slope from the two cost endpoints. kAppendix uses
/// `Activity::appendix_cost_slope` where an activity supplies one and falls
/// back to the endpoint slope otherwise.
enum class CoefficientSet { kTable1, kAppendix };

inline std::string_view to_string(CoefficientSet set) {
  return set == CoefficientSet::kTable1 ? "table1" : "appendix";
}

inline std::optional<CoefficientSet> parse_coefficient_set(std::string_view s) {
  if (s == "table1") return CoefficientSet::kTable1;
  if (s == "appendix") return CoefficientSet::kAppendix;
  return std::nullopt;
}

struct Activity {
  std::string id;
  std::vector<std::string> predecessors;
  double normal_time = 0;
  double crash_time = 0;
  Money normal_cost = 0;
  Money crash_cost = 0;
  double normal_quality = 1.0;
  double crash_quality = 1.0;
  std::optional<double> appendix_cost_slope;

  double time_range() const { return normal_time - crash_time; }
  bool fixed_duration() const { return time_range() <= 0; }

  /// Money per time unit of crashing; 0 for fixed-duration activities.
  double cost_slope(CoefficientSet set = CoefficientSet::kTable1) const {
    if (fixed_duration()) return 0.0;
    if (set == CoefficientSet::kAppendix && appendix_cost_slope) {
      return *appendix_cost_slope;
    }
    return static_cast<double>(crash_cost - normal_cost) / time_range();
  }

  /// Quality fraction lost per time unit of crashing.
  double quality_slope() const {
    if (fixed_duration()) return 0.0;
    return (normal_quality - crash_quality) / time_range();
  }
};

namespace detail {

inline constexpr double kDurationTolerance = 1e-9;

inline void check_duration(const Activity& a, double duration) {
  if (!(duration >= a.crash_time - kDurationTolerance &&
        duration <= a.normal_time + kDurationTolerance)) {
    throw DurationOutOfRange("duration " + std::to_string(duration) +
                             " of activity " + a.id + " outside [" +
                             std::to_string(a.crash_time) + ", " +
                             std::to_string(a.normal_time) + "]");
  }
}

}  // namespace detail

/// Cost of running `a` for `duration`, linear between the normal and crash
/// endpoints.
inline double interpolate_cost(const Activity& a, double duration,
                               CoefficientSet set = CoefficientSet::kTable1) {
  detail::check_duration(a, duration);
  if (a.fixed_duration()) return static_cast<double>(a.normal_cost);
  const double crashed = a.normal_time - duration;
  if (set == CoefficientSet::kAppendix && a.appendix_cost_slope) {
    return static_cast<double>(a.normal_cost) + *a.appendix_cost_slope * crashed;
  }
  // Multiply before dividing so integral results stay exact.
  return static_cast<double>(a.normal_cost) +
         static_cast<double>(a.crash_cost - a.normal_cost) * crashed / a.time_range();
}

inline double interpolate_quality(const Activity& a, double duration) {
  detail::check_duration(a, duration);
  if (a.fixed_duration()) return a.normal_quality;
  return a.normal_quality -
         (a.normal_quality - a.crash_quality) * (a.normal_time - duration) / a.time_range();
}

/// Validated, acyclic activity-on-node network. Immutable once built; obtain
/// one through validate_network().
class ProjectNetwork {
 public:
  std::size_t size() const { return activities_.size(); }
  const std::vector<Activity>& activities() const { return activities_; }
  const Activity& activity(std::size_t j) const { return activities_.at(j); }

  std::optional<std::size_t> index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<std::size_t>& predecessors(std::size_t j) const { return preds_.at(j); }
  const std::vector<std::size_t>& successors(std::size_t j) const { return succs_.at(j); }

  /// Topological order, ties broken by canonical order.
  const std::vector<std::size_t>& topological_order() const { return topo_; }

  /// Activities without successors, in canonical order.
  const std::vector<std::size_t>& sinks() const { return sinks_; }

  std::size_t edge_count() const {
    std::size_t edges = 0;
    for (const auto& p : preds_) edges += p.size();
    return edges;
  }

  double cost_slope(std::size_t j, CoefficientSet set = CoefficientSet::kTable1) const {
    return activity(j).cost_slope(set);
  }
  double quality_slope(std::size_t j) const { return activity(j).quality_slope(); }

  Durations normal_durations() const {
    Durations d;
    d.reserve(size());
    for (const auto& a : activities_) d.push_back(a.normal_time);
    return d;
  }

  Durations crash_durations() const {
    Durations d;
    d.reserve(size());
    for (const auto& a : activities_) d.push_back(a.crash_time);
    return d;
  }

 private:
  friend ProjectNetwork validate_network(std::vector<Activity> raw);
  ProjectNetwork() = default;

  std::vector<Activity> activities_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<std::size_t>> preds_;
  std::vector<std::vector<std::size_t>> succs_;
  std::vector<std::size_t> topo_;
  std::vector<std::size_t> sinks_;
};

namespace detail {

inline void check_bounds(const Activity& a, std::vector<Violation>& out) {
  auto bad = [&](std::string field, std::string message) {
    out.push_back({ViolationKind::kBoundViolation, a.id, std::move(field),
                   "activity " + a.id + ": " + std::move(message)});
  };
  if (!std::isfinite(a.normal_time) || !std::isfinite(a.crash_time)) {
    bad("normal_time", "durations must be finite");
    return;
  }
  if (!(a.crash_time > 0)) bad("crash_time", "crash_time must be positive");
  if (a.crash_time > a.normal_time) bad("crash_time", "crash_time exceeds normal_time");
  if (a.normal_cost < 0) bad("normal_cost", "normal_cost must be non-negative");
  if (a.crash_cost < a.normal_cost) bad("crash_cost", "crash_cost is below normal_cost");
  if (!(a.normal_quality >= 0 && a.normal_quality <= 1)) {
    bad("normal_quality", "normal_quality must lie in [0, 1]");
  }
  if (!(a.crash_quality >= 0 && a.crash_quality <= 1)) {
    bad("crash_quality", "crash_quality must lie in [0, 1]");
  } else if (a.crash_quality > a.normal_quality) {
    bad("crash_quality", "crash_quality exceeds normal_quality");
  }
  if (a.appendix_cost_slope &&
      !(std::isfinite(*a.appendix_cost_slope) && *a.appendix_cost_slope >= 0)) {
    bad("appendix_cost_slope", "appendix_cost_slope must be finite and non-negative");
  }
}

// Returns one cycle among `remaining` nodes as a closed id path "A -> B -> A".
inline std::string describe_cycle(const std::vector<Activity>& acts,
                                  const std::vector<std::vector<std::size_t>>& preds,
                                  const std::vector<bool>& remaining) {
  const std::size_t n = acts.size();
  std::size_t start = n;
  for (std::size_t j = 0; j < n; ++j) {
    if (remaining[j]) { start = j; break; }
  }
  if (start == n) return {};
  // Walking predecessor links inside the unsorted remainder must revisit a node.
  std::vector<std::size_t> seen_at(n, n);
  std::vector<std::size_t> walk;
  std::size_t cur = start;
  while (seen_at[cur] == n) {
    seen_at[cur] = walk.size();
    walk.push_back(cur);
    std::size_t next = n;
    for (std::size_t p : preds[cur]) {
      if (remaining[p]) { next = p; break; }
    }
    if (next == n) return {};
    cur = next;
  }
  std::vector<std::size_t> cycle(walk.begin() + static_cast<std::ptrdiff_t>(seen_at[cur]), walk.end());
  std::reverse(cycle.begin(), cycle.end());
  std::string out;
  for (std::size_t k : cycle) out += acts[k].id + " -> ";
  out += acts[cycle.front()].id;
  return out;
}

}  // namespace detail

/// Validates a raw activity list and builds the network. Every problem found
/// is reported at once through ValidationError.
inline ProjectNetwork validate_network(std::vector<Activity> raw) {
  std::vector<Violation> violations;
  ProjectNetwork net;
  const std::size_t n = raw.size();
  if (n == 0) {
    violations.push_back({ViolationKind::kBoundViolation, "", "activities",
                          "project has no activities"});
  }

  for (std::size_t j = 0; j < n; ++j) {
    const auto& a = raw[j];
    if (a.id.empty()) {
      violations.push_back({ViolationKind::kBoundViolation, "", "id",
                            "activity #" + std::to_string(j + 1) + " has an empty id"});
      continue;
    }
    if (!net.index_.emplace(a.id, j).second) {
      violations.push_back({ViolationKind::kDuplicateId, a.id, "id",
                            "duplicate activity id " + a.id});
    }
  }

  net.preds_.assign(n, {});
  net.succs_.assign(n, {});
  for (std::size_t j = 0; j < n; ++j) {
    auto& a = raw[j];
    detail::check_bounds(a, violations);
    std::vector<std::string> unique_preds;
    for (const auto& p : a.predecessors) {
      if (std::find(unique_preds.begin(), unique_preds.end(), p) != unique_preds.end()) continue;
      unique_preds.push_back(p);
      auto it = net.index_.find(p);
      if (it == net.index_.end()) {
        violations.push_back({ViolationKind::kUnknownPredecessor, a.id, "depends_on",
                              "activity " + a.id + " depends on unknown activity " + p});
        continue;
      }
      net.preds_[j].push_back(it->second);
      net.succs_[it->second].push_back(j);
    }
    a.predecessors = std::move(unique_preds);
  }

  // Kahn's algorithm, always releasing the lowest ready index first.
  std::vector<std::size_t> indegree(n);
  for (std::size_t j = 0; j < n; ++j) indegree[j] = net.preds_[j].size();
  std::vector<bool> done(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t next = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (!done[j] && indegree[j] == 0) { next = j; break; }
    }
    if (next == n) break;
    done[next] = true;
    net.topo_.push_back(next);
    for (std::size_t s : net.succs_[next]) --indegree[s];
  }
  if (net.topo_.size() != n) {
    std::vector<bool> remaining(n);
    for (std::size_t j = 0; j < n; ++j) remaining[j] = !done[j];
    std::string cycle = detail::describe_cycle(raw, net.preds_, remaining);
    violations.push_back({ViolationKind::kCycleDetected, "", "depends_on",
                          "precedence cycle " + cycle});
  }

  if (!violations.empty()) throw ValidationError(std::move(violations));

  for (std::size_t j = 0; j < n; ++j) {
    if (net.succs_[j].empty()) net.sinks_.push_back(j);
  }
  net.activities_ = std::move(raw);
  return net;
}

/// Durations, earliest starts, and completion time of one project plan.
struct Schedule {
  Durations durations;
  std::vector<double> starts;
  double makespan = 0;
};

namespace detail {

inline void check_durations(const ProjectNetwork& net, std::span<const double> durations) {
  if (durations.size() != net.size()) {
    throw DurationOutOfRange("expected " + std::to_string(net.size()) + " durations, got " +
                             std::to_string(durations.size()));
  }
  for (std::size_t j = 0; j < net.size(); ++j) check_duration(net.activity(j), durations[j]);
}

}  // namespace detail

/// CPM forward pass: every activity starts as soon as its predecessors finish.
inline Schedule earliest_start_schedule(const ProjectNetwork& net,
                                        std::span<const double> durations) {
  detail::check_durations(net, durations);
  Schedule s;
  s.durations.assign(durations.begin(), durations.end());
  s.starts.assign(net.size(), 0.0);
  for (std::size_t j : net.topological_order()) {
    double start = 0.0;
    for (std::size_t p : net.predecessors(j)) start = std::max(start, s.starts[p] + durations[p]);
    s.starts[j] = start;
    s.makespan = std::max(s.makespan, start + durations[j]);
  }
  return s;
}

/// Forward and backward CPM passes with per-activity total slack.
struct CpmAnalysis {
  Schedule schedule;
  std::vector<double> latest_starts;
  std::vector<double> slack;
};

inline CpmAnalysis analyze_cpm(const ProjectNetwork& net, std::span<const double> durations) {
  CpmAnalysis out{earliest_start_schedule(net, durations), {}, {}};
  const std::size_t n = net.size();
  std::vector<double> latest_finish(n, out.schedule.makespan);
  const auto& topo = net.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    for (std::size_t s : net.successors(*it)) {
      latest_finish[*it] = std::min(latest_finish[*it], latest_finish[s] - durations[s]);
    }
  }
  out.latest_starts.resize(n);
  out.slack.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.latest_starts[j] = latest_finish[j] - durations[j];
    out.slack[j] = out.latest_starts[j] - out.schedule.starts[j];
  }
  return out;
}

/// Zero-slack activity ids, in canonical order.
inline std::vector<std::string> critical_activities(const ProjectNetwork& net,
                                                    std::span<const double> durations) {
  const CpmAnalysis cpm = analyze_cpm(net, durations);
  std::vector<std::string> ids;
  for (std::size_t j = 0; j < net.size(); ++j) {
    if (std::abs(cpm.slack[j]) <= 1e-9) ids.push_back(net.activity(j).id);
  }
  return ids;
}

inline double total_cost(const ProjectNetwork& net, std::span<const double> durations,
                         CoefficientSet set = CoefficientSet::kTable1) {
  detail::check_durations(net, durations);
  double sum = 0.0;
  for (std::size_t j = 0; j < net.size(); ++j) sum += interpolate_cost(net.activity(j), durations[j], set);
  return sum;
}

/// Total quality degradation: sum of slope_j * (t_j - T_j).
inline double total_quality_loss(const ProjectNetwork& net, std::span<const double> durations) {
  detail::check_durations(net, durations);
  double sum = 0.0;
  for (std::size_t j = 0; j < net.size(); ++j) {
    const Activity& a = net.activity(j);
    if (a.fixed_duration()) continue;
    sum += (a.normal_quality - a.crash_quality) * (a.normal_time - durations[j]) / a.time_range();
  }
  return sum;
}

/// Mean activity quality implied by a total quality loss.
inline double aggregate_quality(const ProjectNetwork& net, double quality_loss) {
  return net.size() == 0 ? 1.0 : 1.0 - quality_loss / static_cast<double>(net.size());
}

/// Checks every schedule invariant: duration ranges, precedence, makespan
/// covering each sink, non-negative starts.
inline bool satisfies_schedule_invariants(const ProjectNetwork& net, const Schedule& s,
                                          double tol = 1e-9) {
  if (s.durations.size() != net.size() || s.starts.size() != net.size()) return false;
  for (std::size_t j = 0; j < net.size(); ++j) {
    const Activity& a = net.activity(j);
    if (s.durations[j] < a.crash_time - tol || s.durations[j] > a.normal_time + tol) return false;
    if (s.starts[j] < -tol) return false;
    for (std::size_t p : net.predecessors(j)) {
      if (s.starts[p] + s.durations[p] > s.starts[j] + tol) return false;
    }
    if (net.successors(j).empty() && s.starts[j] + s.durations[j] > s.makespan + tol) return false;
  }
  return true;
}

}  // namespace pmfuzz
