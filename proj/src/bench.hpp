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

#include <optional>
#include <string>
#include <vector>

#include "json_io.hpp"
#include "mcp.hpp"
#include "trajopt.hpp"

namespace polyplan {

enum class BenchProblem {
  kSimplePacking,
  kSimpleGap,
  kPiano,
  kRandomPacking,
  kLThroughGap,
  kRandomLPacking,
  kPacking3d,
};
const char* to_string(BenchProblem p);
std::optional<BenchProblem> bench_problem_from_string(const std::string& s);
std::vector<BenchProblem> all_bench_problems();

// Version tag of the concrete benchmark geometry constants; recorded in every
// summary so result sets remain comparable.
extern const char* const kBenchDefaultsVersion;

struct BenchOverrides {
  std::optional<int> T;
  std::optional<double> dt;
  std::optional<int> slots;
  std::optional<Vector> Q;
  std::optional<Vector> R;
  std::optional<Vector> u_max;
};

struct BenchmarkSpec {
  BenchProblem problem = BenchProblem::kSimplePacking;
  int trials = 100;
  std::uint64_t seed = 0;
  std::vector<Formulation> formulations = {
      Formulation::kVertexEnum, Formulation::kSeparatingHyperplanes};
  BenchOverrides overrides;
  int threads = 1;
  MCPOptions solver;
};

struct TrialRecord {
  std::string problem;
  std::string formulation;
  std::uint64_t seed = 0;
  int trial = 0;
  MCPStatus status = MCPStatus::kDiverged;
  bool converged = false;
  bool success = false;  // converged AND oracle-certified
  double cost = 0.0;     // meaningful only when success
  double solve_time = 0.0;
  double oracle_min_sd = 0.0;
  int iterations = 0;
};

struct BenchSummaryCell {
  std::string problem;
  std::string formulation;
  int trials = 0;
  int successes = 0;
  int converged = 0;
  double success_rate = 0.0;
  double converged_rate = 0.0;
  double cost_mean = 0.0;
  double cost_sem = 0.0;
  double time_mean = 0.0;
  double time_sem = 0.0;
};

struct BenchResult {
  std::vector<TrialRecord> records;  // trial-major, formulation order per trial
  std::vector<BenchSummaryCell> cells;
  std::string defaults_version;
};

// Problem instance for trial `trial_index` of the spec; deterministic in
// (spec.seed, trial_index) and independent of the formulation (the caller
// sets `formulation` afterwards, so both formulations see identical
// geometry).
TrajectoryProblem generate_problem(const BenchmarkSpec& spec, int trial_index);

// Runs trials x formulations, certifying every converged trajectory with the
// bisection oracle. Individual trial failures are recorded, never fatal.
BenchResult run_benchmark(const BenchmarkSpec& spec);

// Record CSV for one (problem, formulation) cell; volatile timing is omitted
// so fixed-seed runs are byte-identical (timing statistics live in the
// summary). Filename convention: {problem}-{formulation}-{seed}.csv.
std::string records_csv(const BenchResult& result, Formulation f);
std::string csv_filename(const BenchmarkSpec& spec, Formulation f);
// Writes the per-formulation CSVs plus summary.json into out_dir; returns the
// summary document.
Json write_bench_outputs(const BenchmarkSpec& spec, const BenchResult& result,
                         const std::string& out_dir);
Json summary_to_json(const BenchmarkSpec& spec, const BenchResult& result);
// Aligned success/cost/time table, one row per (problem, formulation) cell.
std::string format_table(const BenchResult& result);

// Spec document {"problem": ..., "trials": ..., "seed": ..., ...}.
BenchmarkSpec bench_spec_from_json(const Json& j);

// Problem document or {"generate": {"problem": ..., "seed": ..., "trial":
// ...}} benchmark shorthand.
TrajectoryProblem problem_from_json_any(const Json& j);

}  // namespace polyplan
