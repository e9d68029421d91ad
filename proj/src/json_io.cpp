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

#include "json_io.hpp"

#include <numbers>

namespace polyplan {
namespace {

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected a JSON array of numbers");
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError("expected a numeric array entry");
    v(i) = j[i].get<double>();
  }
  return v;
}

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a JSON matrix");
  const size_t cols = j[0].size();
  Matrix m(j.size(), cols);
  for (size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ParseError("ragged JSON matrix");
    for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) rows.push_back(vector_to_json(m.row(r)));
  return rows;
}

double require_number(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(std::string("missing numeric field: ") + key);
  return j[key].get<double>();
}

}  // namespace

Json parse_json(const std::string& text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("invalid JSON document");
  return j;
}

namespace {

std::vector<ConvexPolytope> base_polytopes_from_json(const Json& j) {
  if (j.contains("shape")) {
    const std::string name = j["shape"].get<std::string>();
    if (name == "rectangle")
      return {make_rectangle(require_number(j, "w"), require_number(j, "h"))};
    if (name == "regular_polygon")
      return {make_regular_polygon(static_cast<int>(require_number(j, "n")),
                                   require_number(j, "r"))};
    if (name == "L_shape")
      return make_l_shape(require_number(j, "w"), require_number(j, "h"),
                          require_number(j, "t1"), require_number(j, "t2"));
    if (name == "tetrahedron")
      return {make_tetrahedron(require_number(j, "edge"))};
    if (name == "random_convex")
      return {make_random_convex(
          static_cast<std::uint64_t>(require_number(j, "seed")),
          static_cast<int>(require_number(j, "n")))};
    throw ParseError("unknown shape name: " + name);
  }
  if (!j.contains("A") || !j.contains("b") || !j.contains("c"))
    throw ParseError("polytope document needs A, b, c (or a shape shorthand)");
  std::vector<ConvexPolytope> out;
  try {
    out.emplace_back(matrix_from_json(j["A"]), vector_from_json(j["b"]),
                     vector_from_json(j["c"]));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid polytope: ") + e.what());
  }
  return out;
}

}  // namespace

std::vector<ConvexPolytope> polytopes_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("polytope document must be an object");
  std::vector<ConvexPolytope> out = base_polytopes_from_json(j);
  try {
    if (j.contains("rotate")) {
      const Vector angles = vector_from_json(j["rotate"]);
      for (ConvexPolytope& p : out)
        p = transform_polytope(
            p, RigidTransform(Vector::Zero(p.dim()),
                              rotation_matrix(angles, p.dim())));
    }
    if (j.contains("translate")) {
      const Vector offset = vector_from_json(j["translate"]);
      for (ConvexPolytope& p : out) p = translate_polytope(p, offset);
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid placement: ") + e.what());
  }
  return out;
}

Json polytope_to_json(const ConvexPolytope& poly) {
  Json j;
  j["A"] = matrix_to_json(poly.A());
  j["b"] = vector_to_json(poly.b());
  j["c"] = vector_to_json(poly.c());
  return j;
}

namespace {

std::vector<ConvexPolytope> polytope_list_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of polytopes");
  std::vector<ConvexPolytope> out;
  for (const Json& e : j)
    for (ConvexPolytope& p : polytopes_from_json(e)) out.push_back(std::move(p));
  return out;
}

Json polytope_list_to_json(const std::vector<ConvexPolytope>& list) {
  Json arr = Json::array();
  for (const auto& p : list) arr.push_back(polytope_to_json(p));
  return arr;
}

}  // namespace

TrajectoryProblem problem_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("problem document must be an object");
  TrajectoryProblem prob;
  prob.d = j.contains("d") ? j["d"].get<int>() : 2;
  if (prob.d != 2 && prob.d != 3) throw ParseError("d must be 2 or 3");
  prob.T = j.contains("T") ? j["T"].get<int>() : 20;
  prob.dt = j.contains("dt") ? j["dt"].get<double>() : 0.2;
  const int sd = prob.state_dim();
  const int cd = prob.control_dim();
  const int pd = prob.pose_dim();
  prob.x0 = j.contains("x0") ? vector_from_json(j["x0"]) : Vector::Zero(sd);
  prob.u0 = j.contains("u0") ? vector_from_json(j["u0"]) : Vector::Zero(cd);
  if (!j.contains("x_goal")) throw ParseError("problem needs x_goal");
  prob.goal_pose = vector_from_json(j["x_goal"]);
  if (prob.goal_pose.size() == sd) prob.goal_pose = prob.goal_pose.head(pd).eval();
  if (j.contains("ego_parts"))
    prob.ego_parts = polytope_list_from_json(j["ego_parts"]);
  if (j.contains("obstacles"))
    prob.obstacles = polytope_list_from_json(j["obstacles"]);
  if (j.contains("Q"))
    prob.Q = vector_from_json(j["Q"]);
  else {
    prob.Q = Vector::Zero(pd);
    for (int i = 0; i < prob.d; ++i) prob.Q(i) = 2e-3;
  }
  if (j.contains("R"))
    prob.R = vector_from_json(j["R"]);
  else {
    prob.R = Vector::Constant(cd, 1e-3);
    for (int i = prob.d; i < cd; ++i) prob.R(i) = 1e-5;
  }
  if (j.contains("u_max"))
    prob.u_max = vector_from_json(j["u_max"]);
  else {
    prob.u_max = Vector::Constant(cd, 10.0);
    for (int i = prob.d; i < cd; ++i) prob.u_max(i) = std::numbers::pi;
  }
  if (j.contains("formulation")) {
    const auto f = formulation_from_string(j["formulation"].get<std::string>());
    if (!f) throw ParseError("unknown formulation tag");
    prob.formulation = *f;
  }
  prob.slots = j.contains("N") ? j["N"].get<int>() : default_slot_count(prob.d);
  try {
    prob.validate();
  } catch (const std::exception& e) {
    throw ParseError(std::string("invalid problem: ") + e.what());
  }
  return prob;
}

Json problem_to_json(const TrajectoryProblem& prob) {
  Json j;
  j["d"] = prob.d;
  j["T"] = prob.T;
  j["dt"] = prob.dt;
  j["x0"] = vector_to_json(prob.x0);
  j["u0"] = vector_to_json(prob.u0);
  j["x_goal"] = vector_to_json(prob.goal_pose);
  j["ego_parts"] = polytope_list_to_json(prob.ego_parts);
  j["obstacles"] = polytope_list_to_json(prob.obstacles);
  j["Q"] = vector_to_json(prob.Q);
  j["R"] = vector_to_json(prob.R);
  j["u_max"] = vector_to_json(prob.u_max);
  j["formulation"] = to_string(prob.formulation);
  j["N"] = prob.slots;
  return j;
}

Json solve_report_to_json(const SolveReport& report) {
  Json j;
  j["problem"] = problem_to_json(report.problem);
  Json states = Json::array();
  for (const auto& x : report.states) states.push_back(vector_to_json(x));
  j["states"] = states;
  Json controls = Json::array();
  for (const auto& u : report.controls) controls.push_back(vector_to_json(u));
  j["controls"] = controls;
  if (report.problem.formulation == Formulation::kVertexEnum) {
    Json slots = Json::array();
    for (const auto& per_t : report.slot_values) {
      Json pairs = Json::array();
      for (const auto& vals : per_t) pairs.push_back(vals);
      slots.push_back(pairs);
    }
    j["slots"] = slots;
  }
  j["solver"] = {{"status", to_string(report.solution.status)},
                 {"iterations", report.solution.iterations},
                 {"residual", report.solution.residual},
                 {"merit", report.solution.merit},
                 {"wall_time", report.solution.wall_time}};
  if (!report.solution.diagnostic.empty())
    j["solver"]["diagnostic"] = report.solution.diagnostic;
  j["cost"] = report.cost;
  j["oracle_min_sd"] = report.oracle_min_sd;
  j["certified"] = report.certified;
  return j;
}

SolveReport solve_report_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("problem") || !j.contains("states"))
    throw ParseError("trajectory document needs problem and states");
  SolveReport report;
  report.problem = problem_from_json(j["problem"]);
  for (const Json& x : j["states"]) report.states.push_back(vector_from_json(x));
  if (j.contains("controls"))
    for (const Json& u : j["controls"])
      report.controls.push_back(vector_from_json(u));
  if (report.states.size() != static_cast<size_t>(report.problem.T) + 1)
    throw ParseError("trajectory has wrong number of states");
  for (const auto& x : report.states)
    if (x.size() != report.problem.state_dim())
      throw ParseError("trajectory state has wrong size");
  if (j.contains("cost")) report.cost = j["cost"].get<double>();
  if (j.contains("oracle_min_sd"))
    report.oracle_min_sd = j["oracle_min_sd"].get<double>();
  if (j.contains("certified")) report.certified = j["certified"].get<bool>();
  return report;
}

}  // namespace polyplan
