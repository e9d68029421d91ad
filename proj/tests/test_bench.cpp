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

#include "bench.hpp"

#include <doctest.h>

#include <cmath>

#include "sdcore.hpp"

using namespace polyplan;

namespace {

BenchmarkSpec spec_for(BenchProblem p, int trials = 4, std::uint64_t seed = 0) {
  BenchmarkSpec spec;
  spec.problem = p;
  spec.trials = trials;
  spec.seed = seed;
  return spec;
}

double max_extent(const ConvexPolytope& poly) {
  double hi = 0.0;
  const auto verts = poly.vertices();
  for (size_t i = 0; i < verts.size(); ++i)
    for (size_t j = i + 1; j < verts.size(); ++j)
      hi = std::max(hi, (verts[i] - verts[j]).norm());
  return hi;
}

}  // namespace

TEST_CASE("generators are deterministic per (seed, trial)") {
  for (BenchProblem p : all_bench_problems()) {
    CAPTURE(to_string(p));
    const TrajectoryProblem a = generate_problem(spec_for(p), 3);
    const TrajectoryProblem b = generate_problem(spec_for(p), 3);
    CHECK((a.x0 - b.x0).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(a.obstacles.size() == b.obstacles.size());
    for (size_t i = 0; i < a.obstacles.size(); ++i) {
      CHECK((a.obstacles[i].A() - b.obstacles[i].A()).cwiseAbs().maxCoeff() ==
            0.0);
      CHECK((a.obstacles[i].b() - b.obstacles[i].b()).cwiseAbs().maxCoeff() ==
            0.0);
    }
    const TrajectoryProblem c = generate_problem(spec_for(p), 4);
    CHECK((a.x0 - c.x0).cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("every generated start state is collision free") {
  for (BenchProblem p : all_bench_problems()) {
    for (int trial = 0; trial < 5; ++trial) {
      const TrajectoryProblem prob = generate_problem(spec_for(p), trial);
      const RigidState st = RigidState::from_stacked(prob.x0, prob.d);
      const RigidTransform tf = pose_transform(st.rigid_pose());
      for (const auto& part : prob.ego_parts) {
        const ConvexPolytope posed = transform_polytope(part, tf);
        for (const auto& obs : prob.obstacles)
          CHECK(signed_distance(posed, obs) > 0.0);
      }
    }
  }
}

TEST_CASE("gap problems: the gap is narrower than the ego's largest dimension") {
  for (BenchProblem p : {BenchProblem::kSimpleGap, BenchProblem::kLThroughGap}) {
    for (int trial = 0; trial < 6; ++trial) {
      const TrajectoryProblem prob = generate_problem(spec_for(p), trial);
      REQUIRE(prob.obstacles.size() == 2);
      // gap: vertical distance between the two wall rectangles
      double lo_top = 1e9, hi_bottom = -1e9;
      const auto v0 = prob.obstacles[0].vertices();
      const auto v1 = prob.obstacles[1].vertices();
      for (const auto& v : v0) lo_top = std::min(lo_top, v(1));
      for (const auto& v : v1) hi_bottom = std::max(hi_bottom, v(1));
      const double gap = lo_top - hi_bottom;
      CHECK(gap > 0.0);
      double ego_dim = 0.0;
      for (const auto& part : prob.ego_parts)
        ego_dim = std::max(ego_dim, max_extent(part));
      CHECK(gap < ego_dim);
    }
  }
}

TEST_CASE("piano corridor is narrower than the ego length") {
  for (int trial = 0; trial < 6; ++trial) {
    const TrajectoryProblem prob =
        generate_problem(spec_for(BenchProblem::kPiano), trial);
    REQUIRE(prob.obstacles.size() == 3);
    // corridor width: distance between the bottom wall's top edge and the
    // inner block's bottom edge
    double wall_top = -1e9, block_bottom = 1e9;
    for (const auto& v : prob.obstacles[0].vertices())
      wall_top = std::max(wall_top, v(1));
    for (const auto& v : prob.obstacles[2].vertices())
      block_bottom = std::min(block_bottom, v(1));
    const double corridor = block_bottom - wall_top;
    CHECK(corridor > 0.0);
    CHECK(corridor < max_extent(prob.ego_parts[0]));
  }
}

TEST_CASE("random packing: goal lies in the hull of the obstacle centers") {
  for (BenchProblem p :
       {BenchProblem::kRandomPacking, BenchProblem::kRandomLPacking}) {
    for (int trial = 0; trial < 6; ++trial) {
      const TrajectoryProblem prob = generate_problem(spec_for(p), trial);
      REQUIRE(prob.obstacles.size() == 3);
      // 2D containment: the goal must be a convex combination of the three
      // centers (solve the barycentric system).
      Matrix T(2, 2);
      const Vector c0 = prob.obstacles[0].c(), c1 = prob.obstacles[1].c(),
                   c2 = prob.obstacles[2].c();
      T.col(0) = c0 - c2;
      T.col(1) = c1 - c2;
      const Vector lambda = T.fullPivLu().solve(
          (prob.goal_pose.head(2) - c2).eval());
      CHECK(lambda(0) >= -1e-9);
      CHECK(lambda(1) >= -1e-9);
      CHECK(lambda(0) + lambda(1) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("3D packing uses tetrahedra and the 3D defaults") {
  const TrajectoryProblem prob =
      generate_problem(spec_for(BenchProblem::kPacking3d), 0);
  CHECK(prob.d == 3);
  CHECK(prob.T == 2);
  CHECK(prob.dt == 2.0);
  CHECK(prob.slots == 8);
  CHECK(prob.ego_parts.size() == 1);
  CHECK(prob.ego_parts[0].num_faces() == 4);
  CHECK(prob.obstacles[0].num_faces() == 4);
}

TEST_CASE("L problems carry a two-part ego") {
  for (BenchProblem p :
       {BenchProblem::kLThroughGap, BenchProblem::kRandomLPacking}) {
    const TrajectoryProblem prob = generate_problem(spec_for(p), 0);
    CHECK(prob.ego_parts.size() == 2);
  }
}

TEST_CASE("overrides apply") {
  BenchmarkSpec spec = spec_for(BenchProblem::kSimplePacking);
  spec.overrides.T = 7;
  spec.overrides.slots = 6;
  spec.overrides.dt = 0.1;
  const TrajectoryProblem prob = generate_problem(spec, 0);
  CHECK(prob.T == 7);
  CHECK(prob.slots == 6);
  CHECK(prob.dt == 0.1);
}

TEST_CASE("run_benchmark records, summary and persistence") {
  BenchmarkSpec spec = spec_for(BenchProblem::kSimplePacking, 3, 42);
  spec.overrides.T = 8;  // keep the suite quick
  // computed once; doctest re-enters the test body per subcase
  static const BenchResult result = run_benchmark(spec);
  REQUIRE(result.records.size() == 6);  // 3 trials x 2 formulations
  REQUIRE(result.cells.size() == 2);
  CHECK(result.defaults_version == std::string(kBenchDefaultsVersion));

  SUBCASE("summary recomputes exactly from the records") {
    for (const auto& cell : result.cells) {
      int successes = 0, converged = 0, trials = 0;
      double cost_sum = 0.0;
      for (const auto& rec : result.records) {
        if (rec.formulation != cell.formulation) continue;
        ++trials;
        if (rec.converged) ++converged;
        if (rec.success) {
          ++successes;
          cost_sum += rec.cost;
        }
      }
      CHECK(trials == cell.trials);
      CHECK(successes == cell.successes);
      CHECK(converged == cell.converged);
      if (successes > 0)
        CHECK(cell.cost_mean == doctest::Approx(cost_sum / successes));
    }
  }

  SUBCASE("successful records carry costs, failed ones do not") {
    for (const auto& rec : result.records) {
      if (rec.success) {
        CHECK(std::isfinite(rec.cost));
        CHECK(rec.oracle_min_sd >= kCertificationMargin);
      } else {
        CHECK((std::isnan(rec.cost) || !rec.converged));
      }
    }
  }

  SUBCASE("CSV bytes are reproducible and timing free") {
    const std::string csv_a = records_csv(result, Formulation::kVertexEnum);
    static const BenchResult again = run_benchmark(spec);
    const std::string csv_b = records_csv(again, Formulation::kVertexEnum);
    CHECK(csv_a == csv_b);
    CHECK(csv_a.find("solve_time") == std::string::npos);
    CHECK(csv_a.find("simple_packing") != std::string::npos);
  }

  SUBCASE("records are identical under multithreading") {
    BenchmarkSpec threaded = spec;
    threaded.threads = 4;
    static const BenchResult par = run_benchmark(threaded);
    CHECK(records_csv(par, Formulation::kVertexEnum) ==
          records_csv(result, Formulation::kVertexEnum));
    CHECK(records_csv(par, Formulation::kSeparatingHyperplanes) ==
          records_csv(result, Formulation::kSeparatingHyperplanes));
  }

  SUBCASE("table lists one row per cell") {
    const std::string table = format_table(result);
    CHECK(table.find("vertex_enum") != std::string::npos);
    CHECK(table.find("separating_hyperplanes") != std::string::npos);
  }

  SUBCASE("filenames follow problem-formulation-seed") {
    CHECK(csv_filename(spec, Formulation::kVertexEnum) ==
          "simple_packing-vertex_enum-42.csv");
  }
}

TEST_CASE("bench spec and generate shorthand parse from JSON") {
  const Json j = Json::parse(R"({
    "problem": "piano", "trials": 9, "seed": 5,
    "formulations": ["vertex_enum"],
    "overrides": {"T": 11, "N": 2}
  })");
  const BenchmarkSpec spec = bench_spec_from_json(j);
  CHECK(spec.problem == BenchProblem::kPiano);
  CHECK(spec.trials == 9);
  CHECK(spec.seed == 5);
  REQUIRE(spec.formulations.size() == 1);
  CHECK(*spec.overrides.T == 11);
  CHECK(*spec.overrides.slots == 2);

  const Json g = Json::parse(R"({
    "generate": {"problem": "simple_packing", "seed": 3, "trial": 2,
                 "formulation": "separating_hyperplanes"}
  })");
  const TrajectoryProblem prob = problem_from_json_any(g);
  CHECK(prob.formulation == Formulation::kSeparatingHyperplanes);
  CHECK(prob.obstacles.size() == 1);

  CHECK_THROWS_AS(bench_spec_from_json(Json::parse(R"({"problem":"zzz"})")),
                  ParseError);
}
