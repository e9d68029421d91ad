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

// Exercises the shared library strictly through its C interface.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>

#include "polyplan/polyplan.h"

namespace {

struct CString {
  char* ptr = nullptr;
  ~CString() { pp_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

pp_polytope* square_at(double x, double y) {
  const double A[8] = {1, 0, -1, 0, 0, 1, 0, -1};
  const double b[4] = {0.5 - x, 0.5 + x, 0.5 - y, 0.5 + y};
  const double c[2] = {x, y};
  pp_polytope* out = nullptr;
  REQUIRE(pp_polytope_create(2, 4, A, b, c, &out) == PP_OK);
  return out;
}

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(pp_status_name(PP_OK)) == "ok");
  CHECK(std::string(pp_status_name(PP_ERR_PARSE)) == "parse_error");
  CHECK(pp_version() != nullptr);
}

TEST_CASE("polytope lifecycle via the C API") {
  pp_polytope* sq = square_at(0, 0);
  CHECK(pp_polytope_dim(sq) == 2);
  CHECK(pp_polytope_faces(sq) == 4);

  double* verts = nullptr;
  int count = 0;
  REQUIRE(pp_polytope_vertices(sq, &verts, &count) == PP_OK);
  CHECK(count == 4);
  pp_buffer_free(verts);

  CString json;
  REQUIRE(pp_polytope_to_json(sq, &json.ptr) == PP_OK);
  pp_polytope* back = nullptr;
  REQUIRE(pp_polytope_from_json(json.ptr, &back) == PP_OK);
  CHECK(pp_polytope_faces(back) == 4);

  // rigid transform: rotate 90 degrees, translate by (2, 0)
  const double l[2] = {2, 0};
  const double R[4] = {0, -1, 1, 0};
  pp_polytope* moved = nullptr;
  REQUIRE(pp_polytope_transform(sq, l, R, &moved) == PP_OK);
  double sd = 0;
  REQUIRE(pp_signed_distance(sq, moved, &sd) == PP_OK);
  CHECK(sd == doctest::Approx(1.0).epsilon(1e-9));

  pp_polytope_free(moved);
  pp_polytope_free(back);
  pp_polytope_free(sq);
}

TEST_CASE("invalid inputs produce error codes and messages") {
  pp_polytope* out = nullptr;
  CHECK(pp_polytope_from_json("{bad json", &out) == PP_ERR_PARSE);
  CHECK(std::strlen(pp_last_error()) > 0);

  // interior point outside the body
  const double A[8] = {1, 0, -1, 0, 0, 1, 0, -1};
  const double b[4] = {0.5, 0.5, 0.5, 0.5};
  const double c[2] = {5, 0};
  CHECK(pp_polytope_create(2, 4, A, b, c, &out) == PP_ERR_INVALID_ARGUMENT);

  // L expands to two bodies: rejected for the single-handle entry point
  CHECK(pp_polytope_from_json(
            R"({"shape": "L_shape", "w": 1, "h": 1, "t1": 0.4, "t2": 0.4})",
            &out) == PP_ERR_INVALID_ARGUMENT);

  CHECK(pp_polytope_create(2, 4, nullptr, b, c, &out) ==
        PP_ERR_INVALID_ARGUMENT);

  double sd = 0;
  pp_polytope* sq = square_at(0, 0);
  pp_polytope* tet = nullptr;
  REQUIRE(pp_polytope_from_json(R"({"shape": "tetrahedron", "edge": 1.0})",
                                &tet) == PP_OK);
  CHECK(pp_signed_distance(sq, tet, &sd) == PP_ERR_DIMENSION);
  pp_polytope_free(tet);
  pp_polytope_free(sq);
}

TEST_CASE("signed distance, oracle and assignment dump") {
  pp_polytope* a = square_at(0, 0);
  pp_polytope* b = square_at(2, 0);
  double sd = 0, oracle = 0;
  REQUIRE(pp_signed_distance(a, b, &sd) == PP_OK);
  REQUIRE(pp_signed_distance_oracle(a, b, 1e-8, &oracle) == PP_OK);
  CHECK(sd == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(oracle == doctest::Approx(1.0).epsilon(1e-7));

  CString dump;
  REQUIRE(pp_assignments_json(a, b, &dump.ptr) == PP_OK);
  CHECK(dump.str().find("\"alpha\"") != std::string::npos);
  pp_polytope_free(a);
  pp_polytope_free(b);
}

TEST_CASE("solve, render and bench through JSON") {
  const char* problem = R"({
    "generate": {"problem": "simple_packing", "seed": 0, "trial": 0,
                 "formulation": "vertex_enum"}
  })";
  CString traj;
  const pp_status status = pp_solve_json(problem, nullptr, &traj.ptr);
  REQUIRE(status == PP_OK);
  CHECK(traj.str().find("\"states\"") != std::string::npos);

  CString svg;
  REQUIRE(pp_render_svg(traj.ptr, &svg.ptr) == PP_OK);
  CHECK(svg.str().find("<svg") == 0);

  CString svg2;
  CHECK(pp_render_svg("{\"not\": \"a trajectory\"}", &svg2.ptr) ==
        PP_ERR_PARSE);

  CString summary;
  const char* spec = R"({
    "problem": "simple_packing", "trials": 2, "seed": 1, "threads": 1,
    "formulations": ["vertex_enum"]
  })";
  REQUIRE(pp_bench_json(spec, nullptr, &summary.ptr) == PP_OK);
  CHECK(summary.str().find("success_rate") != std::string::npos);
}

TEST_CASE("solver failures surface as PP_ERR_SOLVER with a trajectory") {
  // One iteration is never enough: expect a solver error plus a written
  // trajectory document for inspection.
  const char* problem = R"({
    "generate": {"problem": "simple_packing", "seed": 0, "trial": 0}
  })";
  CString traj;
  const pp_status status =
      pp_solve_json(problem, R"({"max_iter": 1, "restarts": 0})", &traj.ptr);
  CHECK(status == PP_ERR_SOLVER);
  CHECK(traj.str().find("\"solver\"") != std::string::npos);
  CHECK(std::strlen(pp_last_error()) > 0);
}
