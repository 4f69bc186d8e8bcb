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

// Everything except the HTTP service (which pulls in httplib).

#pragma once

#include "pmfuzz/errors.hpp"
#include "pmfuzz/project_model.hpp"
#include "pmfuzz/lp_core.hpp"
#include "pmfuzz/objectives.hpp"
#include "pmfuzz/membership.hpp"
#include "pmfuzz/scenario.hpp"
#include "pmfuzz/fuzzy_solver.hpp"
#include "pmfuzz/oracle.hpp"
#include "pmfuzz/io.hpp"
#include "pmfuzz/report.hpp"

namespace pmfuzz {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pmfuzz
