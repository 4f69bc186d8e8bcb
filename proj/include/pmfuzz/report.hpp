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

// Plain-text tables for the CLI.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pmfuzz/errors.hpp"
#include "pmfuzz/fuzzy_solver.hpp"
#include "pmfuzz/io.hpp"
#include "pmfuzz/objectives.hpp"
#include "pmfuzz/project_model.hpp"

namespace pmfuzz::report {

/// Shortest decimal that prints `x` faithfully (integers without a point).
inline std::string fmt(double x) {
  if (x == std::floor(x) && std::abs(x) < 9e15) return std::to_string(static_cast<long long>(x));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline std::string fmt_degree(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.7f", x);
  return buf;
}

inline std::string fmt_money(double x) { return std::to_string(static_cast<long long>(std::llround(x))); }

class Table {
 public:
  explicit Table(std::vector<std::string> header) : rows_{std::move(header)} {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string str() const {
    std::vector<std::size_t> width;
    for (const auto& row : rows_) {
      width.resize(std::max(width.size(), row.size()));
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream os;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      std::string line;
      for (std::size_t c = 0; c < rows_[r].size(); ++c) {
        if (c) line += "  ";
        // first column left-aligned, numbers right-aligned
        const std::string pad(width[c] - rows_[r][c].size(), ' ');
        line += c == 0 ? rows_[r][c] + pad : pad + rows_[r][c];
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      os << line << '\n';
      if (r == 0) {
        std::size_t total = 0;
        for (std::size_t w : width) total += w;
        os << std::string(total + 2 * (width.size() - 1), '-') << '\n';
      }
    }
    return os.str();
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

inline std::string validation_verdict(const ProjectNetwork& net) {
  return "valid, " + std::to_string(net.size()) + " activities, " + std::to_string(net.edge_count()) +
         " precedence edges";
}

inline std::string violations(const ValidationError& e) {
  std::ostringstream os;
  os << "invalid, " << e.violations().size() << " problem(s):\n";
  for (const auto& v : e.violations()) {
    os << "  [" << to_string(v.kind) << "]";
    if (!v.activity.empty()) os << " " << v.activity;
    if (!v.field.empty()) os << " (" << v.field << ")";
    os << ": " << v.message << '\n';
  }
  return os.str();
}

inline std::string cpm(const ProjectNetwork& net, const CpmAnalysis& a, const std::string& mode) {
  Table t({"activity", "duration", "start", "finish", "latest", "slack", "critical"});
  const auto& s = a.schedule;
  for (std::size_t j = 0; j < net.size(); ++j) {
    const bool critical = a.slack[j] <= 1e-9;
    t.add({net.activity(j).id, fmt(s.durations[j]), fmt(s.starts[j]), fmt(s.starts[j] + s.durations[j]),
           fmt(a.latest_starts[j]), fmt(a.slack[j]), critical ? "*" : ""});
  }
  std::ostringstream os;
  os << "mode: " << mode << '\n' << t.str();
  os << "makespan: " << fmt(s.makespan) << '\n';
  os << "critical:";
  for (const auto& id : critical_activities(net, s.durations)) os << ' ' << id;
  os << '\n';
  return os.str();
}

inline std::string criterion_value(Criterion c, double z) {
  return c == Criterion::kCost ? fmt_money(z) : fmt(z);
}

inline std::string payoff(const PayoffMatrix& pm, const io::ProjectFile& p) {
  Table t({"optimizes", "cost", "time", "quality_loss"});
  for (Criterion row : kCriteria) {
    std::vector<std::string> cells{std::string(to_string(row))};
    for (Criterion col : kCriteria) cells.push_back(criterion_value(col, pm.entries[index(row)][index(col)]));
    t.add(std::move(cells));
  }
  Table b({"criterion", "lower", "upper", "degenerate"});
  for (Criterion c : kCriteria) {
    const auto& bd = pm.bounds[index(c)];
    b.add({std::string(to_string(c)), criterion_value(c, bd.lower), criterion_value(c, bd.upper),
           bd.degenerate() ? "yes" : ""});
  }
  std::ostringstream os;
  os << "payoff matrix (row = criterion minimized)\n" << t.str() << '\n' << "bounds\n" << b.str();
  const auto div = io::bound_divergences(pm, p);
  if (!div.empty()) {
    os << '\n';
    for (const auto& d : div) {
      os << "note: computed " << to_string(d.criterion) << (d.upper ? " upper" : " lower") << " bound "
         << criterion_value(d.criterion, d.computed) << " differs from reference "
         << criterion_value(d.criterion, d.reference) << '\n';
    }
  }
  return os.str();
}

inline std::string solve(const SolveResult& r, const ProjectNetwork& net) {
  std::ostringstream os;
  os << "lambda: " << fmt_degree(r.lambda) << '\n';
  Table z({"criterion", "value", "membership", "binding"});
  for (Criterion c : kCriteria) {
    const bool binding = std::find(r.binding.begin(), r.binding.end(), c) != r.binding.end();
    z.add({std::string(to_string(c)), criterion_value(c, r.criteria[index(c)]),
           fmt_degree(r.memberships[index(c)]), binding ? "*" : ""});
  }
  os << z.str();
  os << "aggregate quality: " << fmt_degree(r.aggregate_quality) << '\n' << '\n';
  const CpmAnalysis a = analyze_cpm(net, r.schedule.durations);
  Table s({"activity", "duration", "start", "finish", "critical"});
  for (std::size_t j = 0; j < r.activity_ids.size(); ++j) {
    s.add({r.activity_ids[j], fmt(r.schedule.durations[j]), fmt(r.schedule.starts[j]),
           fmt(r.schedule.starts[j] + r.schedule.durations[j]), a.slack[j] <= 1e-9 ? "*" : ""});
  }
  os << s.str();
  os << "stats: " << r.stats.bisection_iterations << " bisection steps, " << r.stats.milp_solves
     << " MILP solves, " << r.stats.milp_nodes << " nodes\n";
  return os.str();
}

struct SweepRow {
  double value;
  std::optional<SolveResult> result;  // empty when the grid point is infeasible
};

inline std::string sweep(const std::string& column, const std::vector<SweepRow>& rows) {
  Table t({column, "lambda", "cost", "time", "quality_loss"});
  for (const auto& row : rows) {
    if (row.result) {
      t.add({fmt(row.value), fmt_degree(row.result->lambda), fmt_money(row.result->cost()),
             fmt(row.result->time()), fmt(row.result->quality_loss())});
    } else {
      t.add({fmt(row.value), "infeasible", "-", "-", "-"});
    }
  }
  return t.str();
}

}  // namespace pmfuzz::report
