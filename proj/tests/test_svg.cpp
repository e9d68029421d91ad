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

#include "svg.hpp"

#include <doctest.h>

using namespace polyplan;

namespace {

size_t count_occurrences(const std::string& hay, const std::string& needle) {
  size_t n = 0;
  for (size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

SolveReport line_report(int T, std::vector<ConvexPolytope> parts,
                        std::vector<ConvexPolytope> obstacles) {
  SolveReport report;
  TrajectoryProblem prob;
  prob.d = 2;
  prob.T = T;
  prob.dt = 0.2;
  prob.x0 = Vector::Zero(6);
  prob.x0(0) = -2.0;
  prob.u0 = Vector::Zero(3);
  prob.goal_pose = Vector::Zero(3);
  prob.ego_parts = std::move(parts);
  prob.obstacles = std::move(obstacles);
  prob.Q = Vector::Constant(3, 2e-3);
  prob.R = Vector::Constant(3, 1e-3);
  prob.u_max = Vector::Constant(3, 10.0);
  report.problem = prob;
  for (int t = 0; t <= T; ++t) {
    Vector x = prob.x0;
    x(0) += 0.05 * t;
    report.states.push_back(x);
  }
  for (int t = 0; t < T; ++t) report.controls.push_back(Vector::Zero(3));
  return report;
}

}  // namespace

TEST_CASE("SVG contains one ego polygon per timestep") {
  const SolveReport report =
      line_report(20, {make_rectangle(1.0, 0.5)}, {make_rectangle(1, 1)});
  const std::string svg = render_svg(report);
  CHECK(count_occurrences(svg, "<polygon") == 21 + 1);  // 21 ego + obstacle
  CHECK(count_occurrences(svg, "stroke-dasharray") == 20);  // final pose bold
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.rfind("</svg>") != std::string::npos);
}

TEST_CASE("L-shaped ego draws two polygons per timestep") {
  const SolveReport report =
      line_report(5, make_l_shape(1.0, 1.0, 0.4, 0.4), {});
  const std::string svg = render_svg(report);
  CHECK(count_occurrences(svg, "<polygon") == 2 * 6);
}

TEST_CASE("no obstacles renders ego and goal only") {
  const SolveReport report = line_report(3, {make_rectangle(1.0, 0.5)}, {});
  const std::string svg = render_svg(report);
  CHECK(count_occurrences(svg, "<polygon") == 4);
  CHECK(count_occurrences(svg, "<line") == 2);  // goal cross
}

TEST_CASE("rendering is deterministic") {
  const SolveReport report =
      line_report(8, {make_rectangle(1.0, 0.5)}, {make_rectangle(1, 1)});
  CHECK(render_svg(report) == render_svg(report));
}

TEST_CASE("3D trajectories render as xy projections") {
  SolveReport report;
  TrajectoryProblem prob;
  prob.d = 3;
  prob.T = 2;
  prob.dt = 2.0;
  prob.x0 = Vector::Zero(12);
  prob.x0(0) = -1.5;
  prob.u0 = Vector::Zero(6);
  prob.goal_pose = Vector::Zero(6);
  prob.ego_parts = {make_tetrahedron(1.0)};
  prob.obstacles = {make_tetrahedron(1.0)};
  prob.Q = Vector::Constant(6, 2e-3);
  prob.R = Vector::Constant(6, 1e-3);
  prob.u_max = Vector::Constant(6, 10.0);
  report.problem = prob;
  for (int t = 0; t <= 2; ++t) {
    Vector x = prob.x0;
    x(0) += 0.3 * t;
    report.states.push_back(x);
  }
  report.controls.assign(2, Vector::Zero(6));
  const std::string svg = render_svg(report);
  CHECK(count_occurrences(svg, "<polygon") == 4);
}
