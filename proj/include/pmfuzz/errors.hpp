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

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pmfuzz {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ViolationKind {
  kCycleDetected,
  kUnknownPredecessor,
  kBoundViolation,
  kDuplicateId,
  kUnknownActivityInScenario,
  kParse,
};

inline std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kCycleDetected: return "CycleDetected";
    case ViolationKind::kUnknownPredecessor: return "UnknownPredecessor";
    case ViolationKind::kBoundViolation: return "BoundViolation";
    case ViolationKind::kDuplicateId: return "DuplicateId";
    case ViolationKind::kUnknownActivityInScenario: return "UnknownActivityInScenario";
    case ViolationKind::kParse: return "ParseError";
  }
  return "Unknown";
}

struct Violation {
  ViolationKind kind;
  std::string activity;  // empty when not tied to one activity
  std::string field;     // empty when not tied to one field
  std::string message;
};

/// Carries the complete list of problems found in an input; never thrown
/// with an empty list.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : Error(summarize(violations)), violations_(std::move(violations)) {}

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  static std::string summarize(const std::vector<Violation>& violations) {
    std::string out = std::to_string(violations.size()) + " violation(s)";
    for (const auto& v : violations) {
      out += "; ";
      out += to_string(v.kind);
      out += ": ";
      out += v.message;
    }
    return out;
  }

  std::vector<Violation> violations_;
};

class DurationOutOfRange : public Error {
 public:
  using Error::Error;
};

class ModelMalformed : public Error {
 public:
  using Error::Error;
};

class LambdaOutOfOpenInterval : public Error {
 public:
  using Error::Error;
};

/// No schedule satisfies the scenario constraints, even at lambda = 0.
class InfeasibleScenario : public Error {
 public:
  using Error::Error;
};

class SearchSpaceTooLarge : public Error {
 public:
  using Error::Error;
};

/// A solver resource limit (node budget) was exhausted.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace pmfuzz
