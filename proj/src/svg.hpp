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

#include <string>

#include "json_io.hpp"

namespace polyplan {

// Standalone SVG of a solved trajectory: ego part outlines at every timestep
// (intermediate steps dashed, the final pose bold), obstacles filled, goal
// marker, canvas bounds fitted to the scene. 3D bodies are drawn as the
// convex hull of their xy-projected vertices. Output is deterministic.
std::string render_svg(const SolveReport& report);

}  // namespace polyplan
