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

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "logging.hpp"
#include "rng.hpp"

namespace polyplan {

const char* const kBenchDefaultsVersion = "bench-defaults-v1";

namespace {

// Concrete benchmark geometry. The difficulty conditions the generators must
// meet (gap narrower than the ego's largest dimension, corridors forcing
// rotation, obstacles obstructing the goal) are asserted by tests against
// these numbers.
struct Defaults {
  // shared 2D ego
  double ego_w = 1.0;
  double ego_h = 0.5;
  // L-shaped ego bounding box and arm thicknesses
  double l_w = 1.0;
  double l_h = 1.0;
  double l_t1 = 0.4;
  double l_t2 = 0.4;
  // simple packing
  double pack_obs_w = 1.2;
  double pack_obs_h = 1.2;
  double pack_start_x = -2.2;
  // gap problems
  double wall_thickness = 0.4;
  double wall_extent = 4.0;  // walls span to +/- this y
  double gap_lo = 0.78;      // sampled gap width range
  double gap_hi = 0.88;
  double gap_start_x = -1.9;
  double gap_goal_x = 1.9;
  // piano corridor
  double corridor_lo = 0.78;
  double corridor_hi = 0.88;
  double piano_reach = 3.2;  // outer extent of the corridor walls
  double piano_start_x = -2.0;
  double piano_goal_y = 2.0;
  // random packing
  int rp_obstacle_count = 3;
  int rp_obstacle_faces = 5;
  double rp_obstacle_scale = 0.5;
  double rp_ring_lo = 1.05;
  double rp_ring_hi = 1.45;
  double rp_start_radius = 2.6;
  // 3D packing
  double tetra_edge = 1.0;
  double pack3d_distance = 1.8;
};

const Defaults kDefaults;

Vector vec2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

Vector state2d(double x, double y, double theta) {
  Vector v(6);
  v << x, y, theta, 0, 0, 0;
  return v;
}

Vector pose2d(double x, double y, double theta) {
  Vector v(3);
  v << x, y, theta;
  return v;
}

ConvexPolytope rect_at(double w, double h, double cx, double cy) {
  return translate_polytope(make_rectangle(w, h), vec2(cx, cy));
}

void set_2d_defaults(TrajectoryProblem& prob) {
  prob.d = 2;
  prob.T = 20;
  prob.dt = 0.2;
  prob.Q = pose2d(2e-3, 2e-3, 0.0);
  prob.R = pose2d(1e-3, 1e-3, 1e-5);
  prob.u_max = pose2d(10.0, 10.0, std::numbers::pi);
  prob.u0 = Vector::Zero(3);
  prob.slots = 4;
}

void set_3d_defaults(TrajectoryProblem& prob) {
  prob.d = 3;
  prob.T = 2;
  prob.dt = 2.0;
  prob.Q = Vector::Zero(6);
  prob.Q.head(3).setConstant(2e-3);
  prob.R = Vector::Constant(6, 1e-3);
  prob.R.tail(3).setConstant(1e-5);
  prob.u_max = Vector::Constant(6, 10.0);
  prob.u_max.tail(3).setConstant(std::numbers::pi);
  prob.u0 = Vector::Zero(6);
  prob.slots = 8;
}

// Minimum signed distance of the start state over all pairs.
double start_clearance(const TrajectoryProblem& prob) {
  double lo = std::numeric_limits<double>::infinity();
  const RigidState st = RigidState::from_stacked(prob.x0, prob.d);
  const RigidTransform tf = pose_transform(st.rigid_pose());
  for (const auto& part : prob.ego_parts) {
    const ConvexPolytope posed = transform_polytope(part, tf);
    for (const auto& obs : prob.obstacles)
      lo = std::min(lo, signed_distance(posed, obs));
  }
  return lo;
}

void gen_simple_packing(SplitMix64& rng, TrajectoryProblem& prob, bool l_ego) {
  set_2d_defaults(prob);
  if (l_ego)
    prob.ego_parts = make_l_shape(kDefaults.l_w, kDefaults.l_h, kDefaults.l_t1,
                                  kDefaults.l_t2);
  else
    prob.ego_parts = {make_rectangle(kDefaults.ego_w, kDefaults.ego_h)};
  prob.obstacles = {rect_at(kDefaults.pack_obs_w, kDefaults.pack_obs_h, 0, 0)};
  prob.goal_pose = pose2d(0, 0, 0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    prob.x0 = state2d(kDefaults.pack_start_x + rng.uniform(-0.3, 0.3),
                      rng.uniform(-0.4, 0.4), rng.uniform(-0.3, 0.3));
    if (start_clearance(prob) > 0.05) return;
  }
  throw std::runtime_error("simple_packing: no clear start state found");
}

void add_gap_walls(TrajectoryProblem& prob, double gap_width,
                   double gap_center) {
  const double lo = gap_center - gap_width / 2;
  const double hi = gap_center + gap_width / 2;
  const double top_h = kDefaults.wall_extent - hi;
  const double bot_h = lo + kDefaults.wall_extent;
  prob.obstacles.push_back(
      rect_at(kDefaults.wall_thickness, top_h, 0.0, hi + top_h / 2));
  prob.obstacles.push_back(
      rect_at(kDefaults.wall_thickness, bot_h, 0.0, lo - bot_h / 2));
}

void gen_simple_gap(SplitMix64& rng, TrajectoryProblem& prob, bool l_ego) {
  set_2d_defaults(prob);
  double max_dim;
  if (l_ego) {
    prob.ego_parts = make_l_shape(kDefaults.l_w, kDefaults.l_h, kDefaults.l_t1,
                                  kDefaults.l_t2);
    max_dim = std::max(kDefaults.l_w, kDefaults.l_h);
  } else {
    prob.ego_parts = {make_rectangle(kDefaults.ego_w, kDefaults.ego_h)};
    max_dim = std::max(kDefaults.ego_w, kDefaults.ego_h);
  }
  const double gap = rng.uniform(kDefaults.gap_lo, kDefaults.gap_hi);
  if (gap >= max_dim)
    throw std::runtime_error("gap generator: gap not narrower than the ego");
  const double center = rng.uniform(-0.3, 0.3);
  add_gap_walls(prob, gap, center);
  prob.goal_pose = pose2d(kDefaults.gap_goal_x, center + rng.uniform(-0.2, 0.2), 0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    prob.x0 = state2d(kDefaults.gap_start_x + rng.uniform(-0.3, 0.3),
                      center + rng.uniform(-0.3, 0.3), rng.uniform(-0.2, 0.2));
    if (start_clearance(prob) > 0.05) return;
  }
  throw std::runtime_error("gap generator: no clear start state found");
}

void gen_piano(SplitMix64& rng, TrajectoryProblem& prob) {
  set_2d_defaults(prob);
  prob.ego_parts = {make_rectangle(kDefaults.ego_w, kDefaults.ego_h)};
  const double c = rng.uniform(kDefaults.corridor_lo, kDefaults.corridor_hi);
  if (c >= kDefaults.ego_w)
    throw std::runtime_error("piano generator: corridor not narrower than ego");
  const double reach = kDefaults.piano_reach;
  const double th = 0.4;
  // Free space is an L corridor: horizontal leg y in [-c/2, c/2], vertical
  // leg x in [-c/2, c/2]. Bottom wall, right wall, and the inner block.
  prob.obstacles.push_back(rect_at(reach + c / 2 + th, th,
                                   (-reach + c / 2 + th) / 2, -c / 2 - th / 2));
  prob.obstacles.push_back(rect_at(th, reach + c / 2 + th, c / 2 + th / 2,
                                   (reach - c / 2 - th) / 2 + th / 2));
  prob.obstacles.push_back(
      rect_at(reach - c / 2, reach - c / 2, -(reach + c / 2) / 2,
              (reach + c / 2) / 2));
  prob.goal_pose =
      pose2d(0, kDefaults.piano_goal_y + rng.uniform(-0.2, 0.2),
             std::numbers::pi / 2);
  for (int attempt = 0; attempt < 100; ++attempt) {
    prob.x0 = state2d(kDefaults.piano_start_x + rng.uniform(-0.3, 0.3),
                      rng.uniform(-0.1, 0.1) * (c - kDefaults.ego_h),
                      rng.uniform(-0.1, 0.1));
    if (start_clearance(prob) > 0.03) return;
  }
  throw std::runtime_error("piano generator: no clear start state found");
}

void gen_random_packing(SplitMix64& rng, TrajectoryProblem& prob, bool l_ego) {
  set_2d_defaults(prob);
  if (l_ego)
    prob.ego_parts = make_l_shape(kDefaults.l_w, kDefaults.l_h, kDefaults.l_t1,
                                  kDefaults.l_t2);
  else
    prob.ego_parts = {make_rectangle(kDefaults.ego_w, kDefaults.ego_h)};

  // Obstacles on a ring around the goal; the angular jitter keeps every gap
  // below pi, so the goal stays inside the hull of the centers.
  const int n = kDefaults.rp_obstacle_count;
  for (int k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / n +
                         std::numbers::pi / 2 + rng.uniform(-0.4, 0.4);
    const double radius = rng.uniform(kDefaults.rp_ring_lo, kDefaults.rp_ring_hi);
    const std::uint64_t shape_seed = rng.next();
    ConvexPolytope poly = scale_polytope(
        make_random_convex(shape_seed, kDefaults.rp_obstacle_faces),
        kDefaults.rp_obstacle_scale);
    // Recenter on the ring position (c is the hull's vertex centroid).
    poly = translate_polytope(
        poly, vec2(radius * std::cos(angle), radius * std::sin(angle)) -
                  poly.c());
    prob.obstacles.push_back(std::move(poly));
  }
  prob.goal_pose = pose2d(0, 0, 0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const double psi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    prob.x0 = state2d(kDefaults.rp_start_radius * std::cos(psi),
                      kDefaults.rp_start_radius * std::sin(psi),
                      rng.uniform(-std::numbers::pi, std::numbers::pi));
    if (start_clearance(prob) > 0.05) return;
  }
  throw std::runtime_error("random packing: no clear start state found");
}

void gen_packing_3d(SplitMix64& rng, TrajectoryProblem& prob) {
  set_3d_defaults(prob);
  prob.ego_parts = {make_tetrahedron(kDefaults.tetra_edge)};
  prob.obstacles = {make_tetrahedron(kDefaults.tetra_edge)};
  prob.goal_pose = Vector::Zero(6);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const double azimuth = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double elevation = rng.uniform(-0.5, 0.5);
    const double dist = kDefaults.pack3d_distance + rng.uniform(-0.2, 0.2);
    Vector x0 = Vector::Zero(12);
    x0(0) = dist * std::cos(azimuth) * std::cos(elevation);
    x0(1) = dist * std::sin(azimuth) * std::cos(elevation);
    x0(2) = dist * std::sin(elevation);
    for (int i = 3; i < 6; ++i) x0(i) = rng.uniform(-0.3, 0.3);
    prob.x0 = x0;
    if (start_clearance(prob) > 0.05) return;
  }
  throw std::runtime_error("packing_3d: no clear start state found");
}

void apply_overrides(const BenchOverrides& o, TrajectoryProblem& prob) {
  if (o.T) prob.T = *o.T;
  if (o.dt) prob.dt = *o.dt;
  if (o.slots) prob.slots = *o.slots;
  if (o.Q) prob.Q = *o.Q;
  if (o.R) prob.R = *o.R;
  if (o.u_max) prob.u_max = *o.u_max;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sem_of(const std::vector<double>& xs) {
  const size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(n - 1)) /
         std::sqrt(static_cast<double>(n));
}

}  // namespace

const char* to_string(BenchProblem p) {
  switch (p) {
    case BenchProblem::kSimplePacking:
      return "simple_packing";
    case BenchProblem::kSimpleGap:
      return "simple_gap";
    case BenchProblem::kPiano:
      return "piano";
    case BenchProblem::kRandomPacking:
      return "random_packing";
    case BenchProblem::kLThroughGap:
      return "l_through_gap";
    case BenchProblem::kRandomLPacking:
      return "random_l_packing";
    case BenchProblem::kPacking3d:
      return "packing_3d";
  }
  return "unknown";
}

std::optional<BenchProblem> bench_problem_from_string(const std::string& s) {
  for (BenchProblem p : all_bench_problems())
    if (s == to_string(p)) return p;
  return std::nullopt;
}

std::vector<BenchProblem> all_bench_problems() {
  return {BenchProblem::kSimplePacking,  BenchProblem::kSimpleGap,
          BenchProblem::kPiano,          BenchProblem::kRandomPacking,
          BenchProblem::kLThroughGap,    BenchProblem::kRandomLPacking,
          BenchProblem::kPacking3d};
}

TrajectoryProblem generate_problem(const BenchmarkSpec& spec, int trial_index) {
  SplitMix64 rng(SplitMix64::derive(spec.seed, static_cast<std::uint64_t>(trial_index)));
  TrajectoryProblem prob;
  switch (spec.problem) {
    case BenchProblem::kSimplePacking:
      gen_simple_packing(rng, prob, false);
      break;
    case BenchProblem::kSimpleGap:
      gen_simple_gap(rng, prob, false);
      break;
    case BenchProblem::kPiano:
      gen_piano(rng, prob);
      break;
    case BenchProblem::kRandomPacking:
      gen_random_packing(rng, prob, false);
      break;
    case BenchProblem::kLThroughGap:
      gen_simple_gap(rng, prob, true);
      break;
    case BenchProblem::kRandomLPacking:
      gen_random_packing(rng, prob, true);
      break;
    case BenchProblem::kPacking3d:
      gen_packing_3d(rng, prob);
      break;
  }
  apply_overrides(spec.overrides, prob);
  prob.validate();
  return prob;
}

BenchResult run_benchmark(const BenchmarkSpec& spec) {
  if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (spec.formulations.empty())
    throw std::invalid_argument("at least one formulation required");

  BenchResult result;
  result.defaults_version = kBenchDefaultsVersion;
  const int per_trial = static_cast<int>(spec.formulations.size());
  result.records.resize(static_cast<size_t>(spec.trials) * per_trial);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int trial = next.fetch_add(1);
      if (trial >= spec.trials) return;
      TrajectoryProblem base;
      try {
        base = generate_problem(spec, trial);
      } catch (const std::exception& e) {
        log_error("trial %d: generator failed: %s", trial, e.what());
        for (int f = 0; f < per_trial; ++f) {
          TrialRecord& rec = result.records[trial * per_trial + f];
          rec.problem = to_string(spec.problem);
          rec.formulation = to_string(spec.formulations[f]);
          rec.seed = spec.seed;
          rec.trial = trial;
        }
        continue;
      }
      for (int f = 0; f < per_trial; ++f) {
        TrajectoryProblem prob = base;
        prob.formulation = spec.formulations[f];
        MCPOptions opts = spec.solver;
        opts.seed = SplitMix64::derive(spec.seed, trial);
        TrialRecord& rec = result.records[trial * per_trial + f];
        rec.problem = to_string(spec.problem);
        rec.formulation = to_string(prob.formulation);
        rec.seed = spec.seed;
        rec.trial = trial;
        try {
          const SolveReport report = solve_problem(prob, opts);
          rec.status = report.solution.status;
          rec.converged = report.solution.status == MCPStatus::kConverged;
          rec.success = rec.converged && report.certified;
          rec.cost = rec.success ? report.cost
                                 : std::numeric_limits<double>::quiet_NaN();
          rec.solve_time = report.solution.wall_time;
          rec.oracle_min_sd = report.oracle_min_sd;
          rec.iterations = report.solution.iterations;
        } catch (const std::exception& e) {
          log_error("trial %d (%s): %s", trial, rec.formulation.c_str(),
                    e.what());
          rec.status = MCPStatus::kDiverged;
          rec.cost = std::numeric_limits<double>::quiet_NaN();
        }
      }
      log_debug("trial %d done", trial);
    }
  };

  const int threads = std::max(1, spec.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Aggregate per formulation, in spec order.
  for (Formulation f : spec.formulations) {
    BenchSummaryCell cell;
    cell.problem = to_string(spec.problem);
    cell.formulation = to_string(f);
    std::vector<double> costs, times;
    for (const TrialRecord& rec : result.records) {
      if (rec.formulation != cell.formulation) continue;
      ++cell.trials;
      if (rec.converged) ++cell.converged;
      if (rec.success) {
        ++cell.successes;
        costs.push_back(rec.cost);
        times.push_back(rec.solve_time);
      }
    }
    if (cell.trials > 0) {
      cell.success_rate = static_cast<double>(cell.successes) / cell.trials;
      cell.converged_rate = static_cast<double>(cell.converged) / cell.trials;
    }
    cell.cost_mean = mean_of(costs);
    cell.cost_sem = sem_of(costs);
    cell.time_mean = mean_of(times);
    cell.time_sem = sem_of(times);
    result.cells.push_back(std::move(cell));
  }
  return result;
}

std::string records_csv(const BenchResult& result, Formulation f) {
  std::ostringstream out;
  out << "problem,formulation,seed,trial,status,converged,success,cost,"
         "oracle_min_sd,iterations\n";
  char buf[64];
  const std::string name = to_string(f);
  for (const TrialRecord& rec : result.records) {
    if (rec.formulation != name) continue;
    out << rec.problem << ',' << rec.formulation << ',' << rec.seed << ','
        << rec.trial << ',' << to_string(rec.status) << ','
        << (rec.converged ? 1 : 0) << ',' << (rec.success ? 1 : 0) << ',';
    if (rec.success) {
      std::snprintf(buf, sizeof(buf), "%.17g", rec.cost);
      out << buf;
    }
    out << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", rec.oracle_min_sd);
    out << buf << ',' << rec.iterations << '\n';
  }
  return out.str();
}

std::string csv_filename(const BenchmarkSpec& spec, Formulation f) {
  std::ostringstream name;
  name << to_string(spec.problem) << '-' << to_string(f) << '-' << spec.seed
       << ".csv";
  return name.str();
}

Json summary_to_json(const BenchmarkSpec& spec, const BenchResult& result) {
  Json j;
  j["problem"] = to_string(spec.problem);
  j["trials"] = spec.trials;
  j["seed"] = spec.seed;
  j["defaults_version"] = result.defaults_version;
  Json cells = Json::array();
  for (const BenchSummaryCell& c : result.cells) {
    cells.push_back({{"problem", c.problem},
                     {"formulation", c.formulation},
                     {"trials", c.trials},
                     {"successes", c.successes},
                     {"converged", c.converged},
                     {"success_rate", c.success_rate},
                     {"converged_rate", c.converged_rate},
                     {"cost_mean", c.cost_mean},
                     {"cost_sem", c.cost_sem},
                     {"time_mean", c.time_mean},
                     {"time_sem", c.time_sem}});
  }
  j["cells"] = cells;
  return j;
}

Json write_bench_outputs(const BenchmarkSpec& spec, const BenchResult& result,
                         const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  for (Formulation f : spec.formulations) {
    std::ofstream csv(fs::path(out_dir) / csv_filename(spec, f),
                      std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write CSV in " + out_dir);
    csv << records_csv(result, f);
  }
  const Json summary = summary_to_json(spec, result);
  std::ofstream js(fs::path(out_dir) / "summary.json", std::ios::binary);
  if (!js) throw std::runtime_error("cannot write summary in " + out_dir);
  js << summary.dump(2) << '\n';
  return summary;
}

std::string format_table(const BenchResult& result) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-18s %-24s %9s %9s %18s %18s\n",
                "problem", "formulation", "success%", "conv%", "cost (sem)",
                "time s (sem)");
  out << line;
  for (const BenchSummaryCell& c : result.cells) {
    char cost[48], time[48];
    if (c.successes > 0) {
      std::snprintf(cost, sizeof(cost), "%.4f(%.4f)", c.cost_mean, c.cost_sem);
      std::snprintf(time, sizeof(time), "%.3f(%.3f)", c.time_mean, c.time_sem);
    } else {
      std::snprintf(cost, sizeof(cost), "-");
      std::snprintf(time, sizeof(time), "-");
    }
    std::snprintf(line, sizeof(line), "%-18s %-24s %9.1f %9.1f %18s %18s\n",
                  c.problem.c_str(), c.formulation.c_str(),
                  100.0 * c.success_rate, 100.0 * c.converged_rate, cost, time);
    out << line;
  }
  return out.str();
}

BenchmarkSpec bench_spec_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("bench spec must be an object");
  BenchmarkSpec spec;
  if (!j.contains("problem")) throw ParseError("bench spec needs a problem");
  const auto p = bench_problem_from_string(j["problem"].get<std::string>());
  if (!p) throw ParseError("unknown benchmark problem");
  spec.problem = *p;
  if (j.contains("trials")) spec.trials = j["trials"].get<int>();
  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("threads")) spec.threads = j["threads"].get<int>();
  if (j.contains("formulations")) {
    spec.formulations.clear();
    for (const Json& e : j["formulations"]) {
      const auto f = formulation_from_string(e.get<std::string>());
      if (!f) throw ParseError("unknown formulation in bench spec");
      spec.formulations.push_back(*f);
    }
  }
  if (j.contains("tol")) spec.solver.tol = j["tol"].get<double>();
  if (j.contains("max_iter")) spec.solver.max_iter = j["max_iter"].get<int>();
  if (j.contains("restarts")) spec.solver.restarts = j["restarts"].get<int>();
  if (j.contains("overrides")) {
    const Json& o = j["overrides"];
    if (o.contains("T")) spec.overrides.T = o["T"].get<int>();
    if (o.contains("dt")) spec.overrides.dt = o["dt"].get<double>();
    if (o.contains("N")) spec.overrides.slots = o["N"].get<int>();
    auto vec = [](const Json& a) {
      Vector v(a.size());
      for (size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
      return v;
    };
    if (o.contains("Q")) spec.overrides.Q = vec(o["Q"]);
    if (o.contains("R")) spec.overrides.R = vec(o["R"]);
    if (o.contains("u_max")) spec.overrides.u_max = vec(o["u_max"]);
  }
  return spec;
}

TrajectoryProblem problem_from_json_any(const Json& j) {
  if (j.is_object() && j.contains("generate")) {
    const Json& g = j["generate"];
    BenchmarkSpec spec = bench_spec_from_json(g);
    const int trial = g.contains("trial") ? g["trial"].get<int>() : 0;
    TrajectoryProblem prob = generate_problem(spec, trial);
    if (g.contains("formulation")) {
      const auto f =
          formulation_from_string(g["formulation"].get<std::string>());
      if (!f) throw ParseError("unknown formulation tag");
      prob.formulation = *f;
    }
    return prob;
  }
  return problem_from_json(j);
}

}  // namespace polyplan
