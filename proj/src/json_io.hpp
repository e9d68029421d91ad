// Copyright 2025 The PolyPlan Authors
//
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

#include <json.hpp>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "mcp.hpp"
#include "trajopt.hpp"

namespace polyplan {

using Json = nlohmann::json;

// Polytope document: either explicit {"A": [[...]], "b": [...], "c": [...]}
// or shape shorthand {"shape": "rectangle", "w": 1.0, "h": 0.5}. Shorthands
// may expand to more than one body (L_shape).
std::vector<ConvexPolytope> polytopes_from_json(const Json& j);
Json polytope_to_json(const ConvexPolytope& poly);

// Trajectory problem document (shapes, dynamics parameters, penalties,
// formulation tag, seed). Benchmark generator shorthand is layered on top in
// bench.hpp.
TrajectoryProblem problem_from_json(const Json& j);
Json problem_to_json(const TrajectoryProblem& prob);

Json solve_report_to_json(const SolveReport& report);
// Parses the fields cmd_render and round-trip tooling need back out of a
// trajectory document.
SolveReport solve_report_from_json(const Json& j);

Json parse_json(const std::string& text);  // wraps errors in ParseError

}  // namespace polyplan
