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

// Brute-force ground truth over every integer duration vector. Shares no code
// with the LP path: schedules and criteria come straight from the CPM pass and
// the trade-off lines, scenario rules are checked directly.

#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pmfuzz/errors.hpp"
#include "pmfuzz/fuzzy_solver.hpp"
#include "pmfuzz/membership.hpp"
#include "pmfuzz/objectives.hpp"
#include "pmfuzz/project_model.hpp"
#include "pmfuzz/scenario.hpp"

namespace pmfuzz::oracle {

struct EnumerationStats {
  std::uint64_t enumerated = 0;
  std::uint64_t feasible = 0;
  double elapsed_seconds = 0;
};

struct Options {
  MembershipShape shape = MembershipShape::kSmooth;
  std::uint64_t max_vectors = 10'000'000;
  unsigned workers = 1;
};

struct Result {
  SolveResult result;
  EnumerationStats stats;
};

/// Number of integer duration vectors in the box; throws SearchSpaceTooLarge
/// past `limit`.
inline std::uint64_t box_size(const ProjectNetwork& net, std::uint64_t limit) {
  std::uint64_t count = 1;
  for (const Activity& a : net.activities()) {
    if (!is_whole(a.normal_time) || !is_whole(a.crash_time)) {
      throw Error("oracle needs whole-number durations; activity " + a.id + " has fractional times");
    }
    const auto span = static_cast<std::uint64_t>(a.normal_time - a.crash_time) + 1;
    if (count > limit / span) {
      throw SearchSpaceTooLarge("duration box exceeds " + std::to_string(limit) + " vectors");
    }
    count *= span;
  }
  if (count > limit) throw SearchSpaceTooLarge("duration box exceeds " + std::to_string(limit) + " vectors");
  return count;
}

namespace detail {

struct Candidate {
  double lambda;
  CriterionValues z;
  Durations durations;
};

inline bool close(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Max lambda, then min time, min cost, min quality loss; earlier wins ties.
inline bool better(const Candidate& a, const Candidate& b) {
  if (std::abs(a.lambda - b.lambda) > 1e-9) return a.lambda > b.lambda;
  for (Criterion c : {Criterion::kTime, Criterion::kCost, Criterion::kQualityLoss}) {
    const double za = a.z[index(c)];
    const double zb = b.z[index(c)];
    if (!close(za, zb)) return za < zb;
  }
  return false;
}

inline bool admits(const ProjectNetwork& net, const Scenario& s, const BoundsSet& bounds,
                   const Durations& d, const CriterionValues& z) {
  for (const auto& [id, lock] : s.duration_locks) {
    if (std::abs(d[*net.index_of(id)] - lock) > 1e-9) return false;
  }
  for (const auto& [id, floor] : s.quality_floors) {
    const std::size_t j = *net.index_of(id);
    if (interpolate_quality(net.activity(j), d[j]) < floor - 1e-9) return false;
  }
  if (s.deadline && z[index(Criterion::kTime)] > *s.deadline + 1e-9) return false;
  if (s.budget_cap && z[index(Criterion::kCost)] > *s.budget_cap + 1e-9 * std::max(1.0, std::abs(*s.budget_cap))) {
    return false;
  }
  for (Criterion c : kCriteria) {
    const auto& b = bounds[index(c)];
    if (b.degenerate() && z[index(c)] > b.lower + 1e-9 * std::max(1.0, std::abs(b.lower))) return false;
  }
  return true;
}

// Visits the vectors whose first coordinate lies in [first_lo, first_hi], in
// mixed-radix order (first activity most significant, each coordinate rising
// from its crash time).
template <class Visit>
void for_each_vector(const ProjectNetwork& net, double first_lo, double first_hi, Visit visit) {
  const std::size_t n = net.size();
  Durations d(n);
  for (std::size_t j = 0; j < n; ++j) d[j] = net.activity(j).crash_time;
  d[0] = first_lo;
  while (true) {
    visit(d);
    std::size_t j = n;
    while (j > 0) {
      --j;
      const double top = j == 0 ? first_hi : net.activity(j).normal_time;
      if (d[j] < top) {
        d[j] += 1.0;
        break;
      }
      if (j == 0) return;
      d[j] = net.activity(j).crash_time;
    }
    if (n == 0) return;
  }
}

}  // namespace detail

/// Exhaustive max-lambda optimum, tie-broken like the solver.
inline Result enumerate_optimal(const ProjectNetwork& net, const BoundsSet& bounds, const Scenario& s,
                                CoefficientSet project_set = CoefficientSet::kTable1,
                                const Options& opt = {}) {
  const auto start_time = std::chrono::steady_clock::now();
  validate_scenario(net, s);
  const std::uint64_t total = box_size(net, opt.max_vectors);
  const CoefficientSet set = s.coefficients_or(project_set);
  const auto specs = membership_specs(bounds);
  auto value_of = [&](const MembershipSpec& spec, double z) { return membership(spec, z, opt.shape); };

  struct Partial {
    std::optional<detail::Candidate> best;
    std::uint64_t enumerated = 0;
    std::uint64_t feasible = 0;
  };
  auto scan = [&](double lo, double hi) {
    Partial p;
    detail::for_each_vector(net, lo, hi, [&](const Durations& d) {
      ++p.enumerated;
      const CriterionValues z = evaluate_criteria(net, d, set);
      if (!detail::admits(net, s, bounds, d, z)) return;
      ++p.feasible;
      double lambda = 1.0;
      for (Criterion c : kCriteria) {
        if (!specs[index(c)].degenerate()) lambda = std::min(lambda, value_of(specs[index(c)], z[index(c)]));
      }
      detail::Candidate cand{std::clamp(lambda, 0.0, 1.0), z, d};
      if (!p.best || detail::better(cand, *p.best)) p.best = std::move(cand);
    });
    return p;
  };

  // Partition the outermost coordinate; merging in partition order keeps the
  // sequential tie-break.
  const Activity& first = net.activity(0);
  const auto values = static_cast<unsigned>(first.normal_time - first.crash_time) + 1;
  const unsigned workers = std::clamp(opt.workers, 1u, values);
  std::vector<std::future<Partial>> parts;
  for (unsigned w = 0; w < workers; ++w) {
    const double lo = first.crash_time + std::floor(static_cast<double>(values) * w / workers);
    const double hi = first.crash_time + std::floor(static_cast<double>(values) * (w + 1) / workers) - 1;
    parts.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async, scan, lo, hi));
  }
  Partial merged;
  for (auto& f : parts) {
    Partial p = f.get();
    merged.enumerated += p.enumerated;
    merged.feasible += p.feasible;
    if (p.best && (!merged.best || detail::better(*p.best, *merged.best))) merged.best = std::move(p.best);
  }
  if (merged.enumerated != total) throw Error("enumeration count mismatch");
  if (!merged.best) throw InfeasibleScenario(explain_infeasibility(net, s, set));

  Result out;
  out.result = evaluate_plan(net, merged.best->durations, bounds, set, value_of);
  out.stats.enumerated = merged.enumerated;
  out.stats.feasible = merged.feasible;
  out.stats.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return out;
}

/// Optional upper caps per criterion.
using CriterionCaps = std::array<std::optional<double>, 3>;

/// Exact minimum of one criterion over the integer box subject to caps.
/// Returns nullopt when no vector meets the caps.
inline std::optional<double> min_criterion_over_box(const ProjectNetwork& net, Criterion criterion,
                                                    const CriterionCaps& caps = {},
                                                    CoefficientSet set = CoefficientSet::kTable1,
                                                    std::uint64_t max_vectors = 10'000'000) {
  box_size(net, max_vectors);
  std::optional<double> best;
  detail::for_each_vector(net, net.activity(0).crash_time, net.activity(0).normal_time,
                          [&](const Durations& d) {
                            const CriterionValues z = evaluate_criteria(net, d, set);
                            for (Criterion c : kCriteria) {
                              const auto& cap = caps[index(c)];
                              if (cap && z[index(c)] > *cap + 1e-9 * std::max(1.0, std::abs(*cap))) return;
                            }
                            const double v = z[index(criterion)];
                            if (!best || v < *best) best = v;
                          });
  return best;
}

}  // namespace pmfuzz::oracle
