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

// Command-line front end. Talks to the polyplan shared library exclusively
// through its C interface.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "polyplan/polyplan.h"

namespace {

constexpr int kExitSolverFailure = 1;
constexpr int kExitParseError = 2;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return out.good();
}

// Owns a string returned by the C API.
struct CString {
  char* ptr = nullptr;
  ~CString() { pp_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

int status_to_exit(pp_status status) {
  switch (status) {
    case PP_OK:
      return 0;
    case PP_ERR_PARSE:
    case PP_ERR_INVALID_ARGUMENT:
    case PP_ERR_DIMENSION:
      return kExitParseError;
    default:
      return kExitSolverFailure;
  }
}

int cmd_solve(const std::string& problem_file, const std::string& formulation,
              std::optional<std::uint64_t> seed, const std::string& out_file,
              std::optional<double> tol, std::optional<int> max_iter) {
  const auto doc = read_file(problem_file);
  if (!doc) {
    std::fprintf(stderr, "error: cannot read %s\n", problem_file.c_str());
    return kExitParseError;
  }
  nlohmann::json options = nlohmann::json::object();
  if (!formulation.empty()) options["formulation"] = formulation;
  if (seed) options["seed"] = *seed;
  if (tol) options["tol"] = *tol;
  if (max_iter) options["max_iter"] = *max_iter;

  CString traj;
  const pp_status status =
      pp_solve_json(doc->c_str(), options.dump().c_str(), &traj.ptr);
  if (traj.ptr && !write_file(out_file, traj.str() + "\n")) {
    std::fprintf(stderr, "error: cannot write %s\n", out_file.c_str());
    return kExitSolverFailure;
  }
  if (status != PP_OK) {
    std::fprintf(stderr, "error: %s (%s)\n", pp_last_error(),
                 pp_status_name(status));
    return status_to_exit(status);
  }
  const auto parsed = nlohmann::json::parse(traj.str());
  std::printf("status: %s  iterations: %d  cost: %.6g  oracle min sd: %.3g\n",
              parsed["solver"]["status"].get<std::string>().c_str(),
              parsed["solver"]["iterations"].get<int>(),
              parsed["cost"].get<double>(),
              parsed["oracle_min_sd"].get<double>());
  std::printf("trajectory written to %s\n", out_file.c_str());
  return 0;
}

int cmd_bench(const std::string& problem, int trials, std::uint64_t seed,
              const std::string& formulations, const std::string& out_dir,
              int threads, std::optional<double> tol,
              std::optional<int> max_iter, std::optional<int> slots) {
  nlohmann::json spec;
  spec["problem"] = problem;
  spec["trials"] = trials;
  spec["seed"] = seed;
  spec["threads"] = threads;
  if (formulations == "both")
    spec["formulations"] = {"vertex_enum", "separating_hyperplanes"};
  else
    spec["formulations"] = {formulations};
  if (tol) spec["tol"] = *tol;
  if (max_iter) spec["max_iter"] = *max_iter;
  if (slots) spec["overrides"]["N"] = *slots;

  CString summary;
  const pp_status status = pp_bench_json(
      spec.dump().c_str(), out_dir.empty() ? nullptr : out_dir.c_str(),
      &summary.ptr);
  if (status != PP_OK) {
    std::fprintf(stderr, "error: %s (%s)\n", pp_last_error(),
                 pp_status_name(status));
    return status_to_exit(status);
  }
  const auto parsed = nlohmann::json::parse(summary.str());
  std::printf("%s", parsed["table"].get<std::string>().c_str());
  if (!out_dir.empty())
    std::printf("records and summary written to %s\n", out_dir.c_str());
  return 0;
}

int cmd_render(const std::string& traj_file, const std::string& out_file) {
  const auto doc = read_file(traj_file);
  if (!doc) {
    std::fprintf(stderr, "error: cannot read %s\n", traj_file.c_str());
    return kExitParseError;
  }
  CString svg;
  const pp_status status = pp_render_svg(doc->c_str(), &svg.ptr);
  if (status != PP_OK) {
    std::fprintf(stderr, "error: %s (%s)\n", pp_last_error(),
                 pp_status_name(status));
    return status_to_exit(status);
  }
  if (!write_file(out_file, svg.str())) {
    std::fprintf(stderr, "error: cannot write %s\n", out_file.c_str());
    return kExitSolverFailure;
  }
  std::printf("figure written to %s\n", out_file.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyplan: polytope collision detection and trajectory "
               "optimization via signed-distance vertex enumeration"};
  app.require_subcommand(1);

  // solve
  std::string problem_file, formulation, solve_out = "traj.json";
  std::optional<std::uint64_t> seed_opt;
  std::optional<double> tol_opt;
  std::optional<int> max_iter_opt, slots_opt;
  auto* solve = app.add_subcommand("solve", "solve one trajectory problem");
  solve->add_option("problem", problem_file, "problem JSON file")->required();
  solve->add_option("--formulation", formulation,
                    "vertex_enum | separating_hyperplanes");
  solve->add_option("--seed", seed_opt, "solver restart seed");
  solve->add_option("--out", solve_out, "output trajectory JSON path");
  solve->add_option("--tol", tol_opt, "solver convergence tolerance");
  solve->add_option("--max-iter", max_iter_opt, "solver iteration budget");

  // bench
  std::string bench_problem, bench_formulations = "both", bench_out;
  int bench_trials = 100;
  std::uint64_t bench_seed = 0;
  int bench_threads = static_cast<int>(std::thread::hardware_concurrency());
  auto* bench = app.add_subcommand("bench", "run a randomized benchmark");
  bench->add_option("--problem", bench_problem,
                    "simple_packing | simple_gap | piano | random_packing | "
                    "l_through_gap | random_l_packing | packing_3d")
      ->required();
  bench->add_option("--trials", bench_trials, "number of trials");
  bench->add_option("--seed", bench_seed, "root seed");
  bench->add_option("--formulations", bench_formulations,
                    "both | vertex_enum | separating_hyperplanes");
  bench->add_option("--out", bench_out, "output directory for CSV + summary");
  bench->add_option("--threads", bench_threads,
                    "worker threads (records are thread-count independent)");
  bench->add_option("--tol", tol_opt, "solver convergence tolerance");
  bench->add_option("--max-iter", max_iter_opt, "solver iteration budget");
  bench->add_option("--slots", slots_opt, "override slot count N");

  // render
  std::string traj_file, render_out = "fig.svg";
  auto* render = app.add_subcommand("render", "render a trajectory to SVG");
  render->add_option("trajectory", traj_file, "trajectory JSON file")
      ->required();
  render->add_option("--out", render_out, "output SVG path");

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed())
    return cmd_solve(problem_file, formulation, seed_opt, solve_out, tol_opt,
                     max_iter_opt);
  if (bench->parsed())
    return cmd_bench(bench_problem, bench_trials, bench_seed,
                     bench_formulations, bench_out, bench_threads, tol_opt,
                     max_iter_opt, slots_opt);
  if (render->parsed()) return cmd_render(traj_file, render_out);
  return kExitParseError;
}
