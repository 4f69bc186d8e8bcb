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

// Small dense two-phase simplex and depth-first branch-and-bound.
//
// Sized for crashing models of a few dozen activities. Every row is scaled by
// its largest absolute coefficient before solving, so the feasibility
// tolerance applies to scaled rows. Pivoting uses the most negative reduced
// cost and switches to Bland's rule after `bland_after` iterations; all ties
// go to the lowest index, which makes every solve deterministic.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pmfuzz/errors.hpp"

namespace pmfuzz::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kGreaterEqual, kEqual };
enum class Sense { kMinimize, kMaximize };
enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Term {
  std::size_t var;
  double coef;
};

struct Variable {
  std::string name;
  double lower = 0;
  double upper = kInfinity;
  bool integer = false;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0;
  std::string name;
};

struct Objective {
  std::vector<Term> terms;
  Sense sense = Sense::kMinimize;
  double constant = 0;
};

inline double evaluate(std::span<const Term> terms, std::span<const double> x) {
  double sum = 0.0;
  for (const Term& t : terms) sum += t.coef * x[t.var];
  return sum;
}

class LinearModel {
 public:
  std::size_t add_variable(std::string name, double lower, double upper, bool integer = false) {
    variables_.push_back({std::move(name), lower, upper, integer});
    return variables_.size() - 1;
  }

  void add_constraint(std::vector<Term> terms, Relation relation, double rhs,
                      std::string name = {}) {
    constraints_.push_back({std::move(terms), relation, rhs, std::move(name)});
  }

  void set_objective(std::vector<Term> terms, Sense sense, double constant = 0) {
    objective_ = Objective{std::move(terms), sense, constant};
  }
  void clear_objective() { objective_.reset(); }

  void set_bounds(std::size_t var, double lower, double upper) {
    variables_.at(var).lower = lower;
    variables_.at(var).upper = upper;
  }

  std::size_t num_variables() const { return variables_.size(); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(std::size_t i) const { return variables_.at(i); }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const std::optional<Objective>& objective() const { return objective_; }

  bool has_integers() const {
    return std::any_of(variables_.begin(), variables_.end(),
                       [](const Variable& v) { return v.integer; });
  }

  /// Throws ModelMalformed on dangling indices, non-finite data, or crossed bounds.
  void validate() const {
    const std::size_t n = variables_.size();
    for (const auto& v : variables_) {
      if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper ||
          v.lower == kInfinity || v.upper == -kInfinity) {
        throw ModelMalformed("variable " + v.name + " has invalid bounds");
      }
    }
    auto check_terms = [&](const std::vector<Term>& terms, const std::string& where) {
      for (const Term& t : terms) {
        if (t.var >= n) throw ModelMalformed(where + " references undeclared variable");
        if (!std::isfinite(t.coef)) throw ModelMalformed(where + " has a non-finite coefficient");
      }
    };
    for (std::size_t r = 0; r < constraints_.size(); ++r) {
      const auto& c = constraints_[r];
      const std::string where = "constraint " + (c.name.empty() ? std::to_string(r) : c.name);
      check_terms(c.terms, where);
      if (!std::isfinite(c.rhs)) throw ModelMalformed(where + " has a non-finite right-hand side");
    }
    if (objective_) {
      check_terms(objective_->terms, "objective");
      if (!std::isfinite(objective_->constant)) {
        throw ModelMalformed("objective has a non-finite constant");
      }
    }
  }

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::optional<Objective> objective_;
};

struct SolverOptions {
  double feasibility_tolerance = 1e-9;
  double integrality_tolerance = 1e-6;
  std::size_t bland_after = 500;
  std::size_t max_iterations = 1'000'000;
  std::size_t max_nodes = 5'000'000;
};

struct SolveStats {
  std::size_t simplex_iterations = 0;
  std::size_t nodes = 0;
};

struct SolveOutcome {
  Status status = Status::kInfeasible;
  std::vector<double> values;  // set when Optimal
  double objective = 0;        // raw objective incl. constant; 0 when absent
  SolveStats stats;

  bool optimal() const { return status == Status::kOptimal; }
};

/// Largest violation over all rows, each measured after scaling by the row's
/// largest absolute coefficient, and over all variable bounds.
inline double max_scaled_violation(const LinearModel& model, std::span<const double> x) {
  double worst = 0.0;
  for (const auto& c : model.constraints()) {
    double scale = 0.0;
    for (const Term& t : c.terms) scale = std::max(scale, std::abs(t.coef));
    if (scale == 0.0) scale = 1.0;
    const double lhs = evaluate(c.terms, x) / scale;
    const double rhs = c.rhs / scale;
    double v = 0.0;
    switch (c.relation) {
      case Relation::kLessEqual: v = lhs - rhs; break;
      case Relation::kGreaterEqual: v = rhs - lhs; break;
      case Relation::kEqual: v = std::abs(lhs - rhs); break;
    }
    worst = std::max(worst, v);
  }
  for (std::size_t i = 0; i < model.num_variables(); ++i) {
    const auto& var = model.variable(i);
    worst = std::max({worst, var.lower - x[i], x[i] - var.upper});
  }
  return worst;
}

namespace detail {

// Dense tableau in row-major order. Column `width - 1` holds the right-hand
// side; `cost` is the reduced-cost row with the negated objective in its last
// slot.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t columns)
      : rows_(rows), width_(columns + 1), a_(rows * width_, 0.0), cost_(width_, 0.0),
        basis_(rows, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t columns() const { return width_ - 1; }
  double& at(std::size_t r, std::size_t c) { return a_[r * width_ + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * width_ + c]; }
  double& rhs(std::size_t r) { return a_[r * width_ + width_ - 1]; }
  double rhs(std::size_t r) const { return a_[r * width_ + width_ - 1]; }
  std::vector<double>& cost() { return cost_; }
  std::vector<std::size_t>& basis() { return basis_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    double* prow = &a_[pr * width_];
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < width_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    auto eliminate = [&](double* row) {
      const double f = row[pc];
      if (f == 0.0) return;
      for (std::size_t c = 0; c < width_; ++c) {
        row[c] -= f * prow[c];
        if (std::abs(row[c]) < 1e-13) row[c] = 0.0;
      }
      row[pc] = 0.0;
    };
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r != pr) eliminate(&a_[r * width_]);
    }
    eliminate(cost_.data());
    basis_[pr] = pc;
  }

 private:
  std::size_t rows_;
  std::size_t width_;
  std::vector<double> a_;
  std::vector<double> cost_;
  std::vector<std::size_t> basis_;
};

enum class PhaseResult { kOptimal, kUnbounded };

inline constexpr double kReducedCostTolerance = 1e-9;
// Smaller pivots than this amplify round-off enough to drift off the
// feasible region; rows are scaled to unit max so the bound is absolute.
inline constexpr double kPivotTolerance = 1e-7;

// Minimizes the tableau's cost row over columns [0, allowed).
inline PhaseResult run_phase(Tableau& t, std::size_t allowed, const SolverOptions& opt,
                             std::size_t& iterations) {
  auto& cost = t.cost();
  for (std::size_t local = 0;; ++local) {
    if (iterations >= opt.max_iterations) {
      throw LimitExceeded("simplex iteration limit reached");
    }
    std::size_t enter = allowed;
    if (local < opt.bland_after) {
      double best = -kReducedCostTolerance;
      for (std::size_t c = 0; c < allowed; ++c) {
        if (cost[c] < best) { best = cost[c]; enter = c; }
      }
    } else {
      for (std::size_t c = 0; c < allowed; ++c) {
        if (cost[c] < -kReducedCostTolerance) { enter = c; break; }
      }
    }
    if (enter == allowed) return PhaseResult::kOptimal;

    std::size_t leave = t.rows();
    double best_ratio = kInfinity;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double coef = t.at(r, enter);
      if (coef <= kPivotTolerance) continue;
      const double ratio = std::max(t.rhs(r), 0.0) / coef;
      const double tie = 1e-12 * std::max(1.0, ratio);
      if (leave == t.rows() || ratio < best_ratio - tie) {
        leave = r;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + tie && t.basis()[r] < t.basis()[leave]) {
        leave = r;
      }
    }
    if (leave == t.rows()) return PhaseResult::kUnbounded;
    t.pivot(leave, enter);
    ++iterations;
  }
}

// Maps one model variable onto non-negative tableau columns:
// x = offset + sign * column[pos] - column[neg].
struct ColumnMap {
  double offset = 0;
  double sign = 1;
  std::size_t pos = 0;
  std::optional<std::size_t> neg;
};

inline SolveOutcome simplex(const LinearModel& model, std::span<const double> lower,
                            std::span<const double> upper, const SolverOptions& opt) {
  SolveOutcome out;
  const std::size_t n = model.num_variables();
  for (std::size_t i = 0; i < n; ++i) {
    if (lower[i] > upper[i]) return out;  // crossed branch bounds
  }

  std::vector<ColumnMap> map(n);
  std::size_t structural = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(lower[i])) {
      map[i] = {lower[i], 1.0, structural++, std::nullopt};
    } else if (std::isfinite(upper[i])) {
      map[i] = {upper[i], -1.0, structural++, std::nullopt};
    } else {
      map[i] = {0.0, 1.0, structural, structural + 1};
      structural += 2;
    }
  }

  struct Row {
    std::vector<std::pair<std::size_t, double>> coefs;
    Relation relation;
    double rhs;
  };
  std::vector<Row> rows;
  auto push_row = [&](const std::vector<Term>& terms, Relation rel, double rhs) -> bool {
    std::vector<double> dense(structural, 0.0);
    double shifted = rhs;
    for (const Term& t : terms) {
      const ColumnMap& m = map[t.var];
      shifted -= t.coef * m.offset;
      dense[m.pos] += t.coef * m.sign;
      if (m.neg) dense[*m.neg] -= t.coef;
    }
    double scale = 0.0;
    for (double v : dense) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) {
      const double tol = opt.feasibility_tolerance;
      switch (rel) {
        case Relation::kLessEqual: return shifted >= -tol;
        case Relation::kGreaterEqual: return shifted <= tol;
        case Relation::kEqual: return std::abs(shifted) <= tol;
      }
    }
    Row row{{}, rel, shifted / scale};
    for (std::size_t c = 0; c < structural; ++c) {
      if (dense[c] != 0.0) row.coefs.emplace_back(c, dense[c] / scale);
    }
    if (row.rhs < 0) {
      row.rhs = -row.rhs;
      for (auto& [c, v] : row.coefs) v = -v;
      if (rel == Relation::kLessEqual) row.relation = Relation::kGreaterEqual;
      else if (rel == Relation::kGreaterEqual) row.relation = Relation::kLessEqual;
    }
    rows.push_back(std::move(row));
    return true;
  };

  for (const auto& c : model.constraints()) {
    if (!push_row(c.terms, c.relation, c.rhs)) return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(lower[i]) && std::isfinite(upper[i])) {
      rows.push_back({{{map[i].pos, 1.0}}, Relation::kLessEqual, upper[i] - lower[i]});
    }
  }

  const std::size_t m = rows.size();
  std::size_t slacks = 0;
  std::size_t artificials = 0;
  for (const auto& r : rows) {
    if (r.relation != Relation::kEqual) ++slacks;
    if (r.relation != Relation::kLessEqual) ++artificials;
  }
  const std::size_t first_artificial = structural + slacks;
  Tableau t(m, first_artificial + artificials);
  {
    std::size_t next_slack = structural;
    std::size_t next_art = first_artificial;
    for (std::size_t r = 0; r < m; ++r) {
      for (const auto& [c, v] : rows[r].coefs) t.at(r, c) = v;
      t.rhs(r) = rows[r].rhs;
      switch (rows[r].relation) {
        case Relation::kLessEqual:
          t.at(r, next_slack) = 1.0;
          t.basis()[r] = next_slack++;
          break;
        case Relation::kGreaterEqual:
          t.at(r, next_slack++) = -1.0;
          t.at(r, next_art) = 1.0;
          t.basis()[r] = next_art++;
          break;
        case Relation::kEqual:
          t.at(r, next_art) = 1.0;
          t.basis()[r] = next_art++;
          break;
      }
    }
  }

  std::size_t iterations = 0;
  if (artificials > 0) {
    auto& cost = t.cost();
    std::fill(cost.begin(), cost.end(), 0.0);
    double max_rhs = 1.0;
    for (std::size_t r = 0; r < m; ++r) {
      max_rhs = std::max(max_rhs, t.rhs(r));
      if (t.basis()[r] < first_artificial) continue;
      for (std::size_t c = 0; c < first_artificial; ++c) cost[c] -= t.at(r, c);
      cost.back() -= t.rhs(r);
    }
    run_phase(t, first_artificial, opt, iterations);
    const double infeasibility = -cost.back();
    if (infeasibility > opt.feasibility_tolerance * max_rhs * static_cast<double>(artificials)) {
      out.stats.simplex_iterations = iterations;
      return out;
    }
    // Drive remaining artificials out of the basis; rows where that is
    // impossible are redundant and keep a zero-valued artificial.
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis()[r] < first_artificial) continue;
      std::size_t best = first_artificial;
      double magnitude = kPivotTolerance;
      for (std::size_t c = 0; c < first_artificial; ++c) {
        if (std::abs(t.at(r, c)) > magnitude) { magnitude = std::abs(t.at(r, c)); best = c; }
      }
      if (best < first_artificial) {
        t.pivot(r, best);
        ++iterations;
      }
    }
  }

  // Phase 2 with the objective scaled to unit magnitude.
  std::vector<double> col_cost(first_artificial, 0.0);
  const auto& objective = model.objective();
  if (objective) {
    const double flip = objective->sense == Sense::kMaximize ? -1.0 : 1.0;
    for (const Term& term : objective->terms) {
      const ColumnMap& mp = map[term.var];
      col_cost[mp.pos] += flip * term.coef * mp.sign;
      if (mp.neg) col_cost[*mp.neg] -= flip * term.coef;
    }
    double scale = 0.0;
    for (double v : col_cost) scale = std::max(scale, std::abs(v));
    if (scale > 0) {
      for (double& v : col_cost) v /= scale;
    }
    auto& cost = t.cost();
    std::fill(cost.begin(), cost.end(), 0.0);
    for (std::size_t c = 0; c < first_artificial; ++c) cost[c] = col_cost[c];
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t b = t.basis()[r];
      const double cb = b < first_artificial ? col_cost[b] : 0.0;
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c < t.columns(); ++c) cost[c] -= cb * t.at(r, c);
      cost.back() -= cb * t.rhs(r);
    }
    if (run_phase(t, first_artificial, opt, iterations) == PhaseResult::kUnbounded) {
      out.status = Status::kUnbounded;
      out.stats.simplex_iterations = iterations;
      return out;
    }
  }

  std::vector<double> column_value(t.columns(), 0.0);
  for (std::size_t r = 0; r < m; ++r) column_value[t.basis()[r]] = std::max(t.rhs(r), 0.0);
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ColumnMap& mp = map[i];
    double x = mp.offset + mp.sign * column_value[mp.pos];
    if (mp.neg) x -= column_value[*mp.neg];
    out.values[i] = x;
  }
  out.status = Status::kOptimal;
  if (objective) out.objective = evaluate(objective->terms, out.values) + objective->constant;
  out.stats.simplex_iterations = iterations;
  return out;
}

inline std::vector<double> lower_bounds(const LinearModel& model) {
  std::vector<double> v;
  for (const auto& var : model.variables()) v.push_back(var.lower);
  return v;
}

inline std::vector<double> upper_bounds(const LinearModel& model) {
  std::vector<double> v;
  for (const auto& var : model.variables()) v.push_back(var.upper);
  return v;
}

inline constexpr int kPropagationPasses = 10;
inline constexpr double kRoundingNoise = 1e-12;

/// Row-activity bound propagation. Every variable takes part, but only the
/// integer ones keep their tightened bounds, rounded onto the lattice; that is
/// what turns "every duration <= makespan <= 5.99999999" into "<= 5" before
/// the relaxation, which forgives the 1e-8, spreads it over many activities.
/// Rounding slack is floating-point noise of the row, not the integrality
/// tolerance. Returns false when a domain empties.
inline bool propagate(const LinearModel& model, std::vector<double>& lower, std::vector<double>& upper) {
  std::vector<double> lo = lower, hi = upper;
  auto slack = [](double v) { return 1e-9 * std::max(1.0, std::abs(v)); };
  for (int pass = 0; pass < kPropagationPasses; ++pass) {
    bool changed = false;
    for (const auto& c : model.constraints()) {
      for (const double sign : {1.0, -1.0}) {
        // sign * row <= sign * rhs
        if (sign > 0 && c.relation == Relation::kGreaterEqual) continue;
        if (sign < 0 && c.relation == Relation::kLessEqual) continue;
        const double rhs = sign * c.rhs;
        double min_activity = 0.0;
        double magnitude = std::abs(rhs);
        std::size_t unbounded = 0, unbounded_term = 0;
        for (std::size_t k = 0; k < c.terms.size(); ++k) {
          const double a = sign * c.terms[k].coef;
          if (a == 0.0) continue;
          const double b = a > 0 ? lo[c.terms[k].var] : hi[c.terms[k].var];
          if (std::isfinite(b)) {
            min_activity += a * b;
            magnitude += std::abs(a * b);
          } else {
            ++unbounded;
            unbounded_term = k;
          }
        }
        if (unbounded > 1) continue;
        const double noise = kRoundingNoise * std::max(1.0, magnitude);
        if (unbounded == 0 && min_activity > rhs + noise) return false;
        for (std::size_t k = 0; k < c.terms.size(); ++k) {
          const double a = sign * c.terms[k].coef;
          if (a == 0.0) continue;
          if (unbounded == 1 && k != unbounded_term) continue;
          const std::size_t v = c.terms[k].var;
          const double rest = unbounded == 1 ? min_activity : min_activity - a * (a > 0 ? lo[v] : hi[v]);
          double bound = (rhs - rest) / a;
          const bool integer = model.variable(v).integer;
          // continuous bounds only move for a real gain, so passes settle
          auto gain = [&](double old) { return integer ? 0.5 : 1e-7 * std::max(1.0, std::abs(old)); };
          if (a > 0) {
            if (integer) bound = std::floor(bound + noise / a);
            if (!std::isfinite(hi[v]) || bound < hi[v] - gain(hi[v])) {
              hi[v] = bound;
              changed = true;
            }
          } else {
            if (integer) bound = std::ceil(bound + noise / a);
            if (!std::isfinite(lo[v]) || bound > lo[v] + gain(lo[v])) {
              lo[v] = bound;
              changed = true;
            }
          }
          if (lo[v] > hi[v] + slack(hi[v]) + noise / std::abs(a)) return false;
        }
      }
    }
    if (!changed) break;
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!model.variable(i).integer) continue;
    lower[i] = std::max(lower[i], lo[i]);
    upper[i] = std::min(upper[i], hi[i]);
  }
  return true;
}

}  // namespace detail

/// Optimal basic solution of the continuous relaxation (integrality ignored).
inline SolveOutcome solve_lp(const LinearModel& model, const SolverOptions& opt = {}) {
  model.validate();
  const auto lower = detail::lower_bounds(model);
  const auto upper = detail::upper_bounds(model);
  return detail::simplex(model, lower, upper, opt);
}

/// Branch-and-bound over the integer-flagged variables: depth-first, lower
/// branch first, branching on the most fractional variable (lowest index on
/// ties). Without an objective the first integral point found is returned.
inline SolveOutcome solve_milp(const LinearModel& model, const SolverOptions& opt = {}) {
  model.validate();
  const std::size_t n = model.num_variables();
  struct Node {
    std::vector<double> lower;
    std::vector<double> upper;
  };
  Node root{detail::lower_bounds(model), detail::upper_bounds(model)};
  for (std::size_t i = 0; i < n; ++i) {
    if (!model.variable(i).integer) continue;
    root.lower[i] = std::ceil(root.lower[i] - opt.integrality_tolerance);
    root.upper[i] = std::floor(root.upper[i] + opt.integrality_tolerance);
  }

  const auto& objective = model.objective();
  const bool minimize = !objective || objective->sense == Sense::kMinimize;
  // `a` improves on `b` by more than the relative tolerance.
  auto improves = [&](double a, double b) {
    const double tol = 1e-9 * std::max(1.0, std::abs(b));
    return minimize ? a < b - tol : a > b + tol;
  };

  SolveOutcome best;
  bool have_incumbent = false;
  SolveStats stats;
  std::vector<Node> stack;
  stack.push_back(std::move(root));
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    if (++stats.nodes > opt.max_nodes) throw LimitExceeded("branch-and-bound node limit reached");

    if (!detail::propagate(model, node.lower, node.upper)) continue;
    SolveOutcome relax = detail::simplex(model, node.lower, node.upper, opt);
    stats.simplex_iterations += relax.stats.simplex_iterations;
    if (relax.status == Status::kInfeasible) continue;
    if (relax.status == Status::kUnbounded) {
      best = SolveOutcome{Status::kUnbounded, {}, 0, {}};
      best.stats = stats;
      return best;
    }
    if (have_incumbent && objective && !improves(relax.objective, best.objective)) continue;

    // Round-off can leave a value a hair outside its node bounds; a fixed
    // variable must never be branched on again.
    for (std::size_t i = 0; i < n; ++i) {
      relax.values[i] = std::clamp(relax.values[i], node.lower[i], node.upper[i]);
    }
    std::size_t branch = n;
    double most = opt.integrality_tolerance;
    for (std::size_t i = 0; i < n; ++i) {
      if (!model.variable(i).integer) continue;
      const double x = relax.values[i];
      const double dist = std::abs(x - std::round(x));
      if (dist > most) { most = dist; branch = i; }
    }

    if (branch == n) {
      // Integral: pin the integer variables exactly and re-solve the rest.
      Node pinned = node;
      for (std::size_t i = 0; i < n; ++i) {
        if (!model.variable(i).integer) continue;
        pinned.lower[i] = pinned.upper[i] = std::round(relax.values[i]);
      }
      SolveOutcome cand = detail::simplex(model, pinned.lower, pinned.upper, opt);
      stats.simplex_iterations += cand.stats.simplex_iterations;
      if (cand.optimal()) {
        for (std::size_t i = 0; i < n; ++i) {
          if (model.variable(i).integer) cand.values[i] = pinned.lower[i];
        }
      }
      if (cand.optimal() && max_scaled_violation(model, cand.values) <= opt.feasibility_tolerance) {
        if (objective) cand.objective = evaluate(objective->terms, cand.values) + objective->constant;
        if (!objective) {
          cand.stats = stats;
          return cand;
        }
        if (!have_incumbent || improves(cand.objective, best.objective)) {
          best = std::move(cand);
          have_incumbent = true;
        }
        continue;
      }
      // Phase 1 forgives a little infeasibility, so a point that is integral
      // only within tolerance can round onto the wrong side of a tight row.
      // That is not a solution; keep splitting while anything is off the
      // lattice at all.
      double off = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!model.variable(i).integer) continue;
        const double dist = std::abs(relax.values[i] - std::round(relax.values[i]));
        if (dist > off) { off = dist; branch = i; }
      }
      if (branch == n) continue;
    }

    const double x = relax.values[branch];
    Node up = node;
    up.lower[branch] = std::ceil(x);
    node.upper[branch] = std::floor(x);
    stack.push_back(std::move(up));
    stack.push_back(std::move(node));
  }

  if (!have_incumbent) {
    best = SolveOutcome{};
    best.status = Status::kInfeasible;
  }
  best.stats = stats;
  return best;
}

struct FeasibilityResult {
  bool feasible = false;
  std::vector<double> witness;
  SolveStats stats;
};

/// Integer feasibility of an objective-free model.
inline FeasibilityResult check_feasible(const LinearModel& model, const SolverOptions& opt = {}) {
  if (model.objective()) throw ModelMalformed("check_feasible expects a model without objective");
  SolveOutcome r = solve_milp(model, opt);
  return {r.optimal(), std::move(r.values), r.stats};
}

}  // namespace pmfuzz::lp
