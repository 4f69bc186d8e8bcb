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

// Membership functions mapping a minimized criterion value onto a
// satisfaction degree in [0, 1].

#pragma once

#include <cmath>
#include <concepts>
#include <string>

#include "pmfuzz/errors.hpp"
#include "pmfuzz/objectives.hpp"

namespace pmfuzz {

struct MembershipSpec {
  Criterion criterion = Criterion::kCost;
  double lower = 0;
  double upper = 0;

  MembershipSpec() = default;
  MembershipSpec(Criterion c, double lo, double hi) : criterion(c), lower(lo), upper(hi) {}
  MembershipSpec(Criterion c, CriterionBounds b) : criterion(c), lower(b.lower), upper(b.upper) {}

  bool degenerate() const { return !(upper > lower); }
  double midpoint() const { return (upper + lower) / 2; }
  /// Inverse criterion units; spreads the bulk of the tanh over [lower, upper].
  double steepness() const { return 6.0 / (upper - lower); }
};

enum class MembershipShape {
  kSmooth,   // raw tanh everywhere; invertible
  kClamped,  // pinned to 1 at or below `lower` and 0 at or above `upper`
};

/// Hyperbolic membership. Degenerate specs are a step: 1 when z <= lower.
inline double membership(const MembershipSpec& spec, double z,
                         MembershipShape shape = MembershipShape::kSmooth) {
  if (spec.degenerate()) return z <= spec.lower ? 1.0 : 0.0;
  if (shape == MembershipShape::kClamped) {
    if (z <= spec.lower) return 1.0;
    if (z >= spec.upper) return 0.0;
  }
  return 0.5 * std::tanh(spec.steepness() * (spec.midpoint() - z)) + 0.5;
}

/// Largest z with membership(spec, z) >= lambda, for the smooth shape.
inline double invert_membership(const MembershipSpec& spec, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw LambdaOutOfOpenInterval("lambda " + std::to_string(lambda) + " outside (0, 1)");
  }
  if (spec.degenerate()) throw Error("cannot invert a degenerate membership function");
  return spec.midpoint() - std::atanh(2.0 * lambda - 1.0) / spec.steepness();
}

/// What the max-lambda solver needs from a membership family: the degree of a
/// value, and the cap a degree puts on the criterion.
template <class F>
concept MembershipFamily = requires(const F f, const MembershipSpec& spec, double x) {
  { f.value(spec, x) } -> std::convertible_to<double>;
  { f.cap(spec, x) } -> std::convertible_to<double>;
};

struct HyperbolicMembership {
  double value(const MembershipSpec& spec, double z) const { return membership(spec, z); }
  double cap(const MembershipSpec& spec, double lambda) const {
    return invert_membership(spec, lambda);
  }
};

static_assert(MembershipFamily<HyperbolicMembership>);

}  // namespace pmfuzz
