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

// End-to-end checks of the installed CLI binary (path from POLYPLAN_CLI).

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
  const char* env = std::getenv("POLYPLAN_CLI");
  REQUIRE_MESSAGE(env != nullptr, "POLYPLAN_CLI must point at the binary");
  return env;
}

// Runs the CLI, returns its exit code.
int run(const std::string& args, std::string* output = nullptr) {
  const std::string out_file =
      (fs::temp_directory_path() / "polyplan_cli_out.txt").string();
  const std::string cmd = cli_path() + " " + args + " > " + out_file + " 2>&1";
  const int rc = std::system(cmd.c_str());
  if (output) {
    std::ifstream in(out_file);
    std::ostringstream buf;
    buf << in.rdbuf();
    *output = buf.str();
  }
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("polyplan_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("solve writes a trajectory and render converts it to SVG") {
  TempDir dir;
  const fs::path problem = dir.path / "problem.json";
  {
    std::ofstream out(problem);
    out << R"({"generate": {"problem": "simple_packing", "seed": 0,
               "trial": 0, "formulation": "vertex_enum"}})";
  }
  const fs::path traj = dir.path / "traj.json";
  std::string output;
  const int rc = run("solve " + problem.string() + " --out " + traj.string(),
                     &output);
  CHECK(rc == 0);
  CHECK(fs::exists(traj));
  CHECK(output.find("status: converged") != std::string::npos);

  const fs::path fig = dir.path / "fig.svg";
  CHECK(run("render " + traj.string() + " --out " + fig.string()) == 0);
  const std::string svg = slurp(fig);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("solve on a trivial problem exits zero with zero controls") {
  TempDir dir;
  const fs::path problem = dir.path / "trivial.json";
  {
    std::ofstream out(problem);
    out << R"({
      "d": 2, "T": 5, "dt": 0.2,
      "x0": [0.5, -0.25, 0, 0, 0, 0],
      "x_goal": [0.5, -0.25, 0],
      "ego_parts": [], "obstacles": []
    })";
  }
  const fs::path traj = dir.path / "t.json";
  std::string output;
  CHECK(run("solve " + problem.string() + " --out " + traj.string(),
            &output) == 0);
  const std::string doc = slurp(traj);
  CHECK(doc.find("\"status\": \"converged\"") != std::string::npos);
}

TEST_CASE("malformed problem files exit 2") {
  TempDir dir;
  const fs::path broken = dir.path / "broken.json";
  {
    std::ofstream out(broken);
    out << "{this is not json";
  }
  CHECK(run("solve " + broken.string()) == 2);
  CHECK(run("render " + broken.string() + " --out " +
            (dir.path / "x.svg").string()) == 2);
  CHECK(run("solve " + (dir.path / "missing.json").string()) == 2);
}

TEST_CASE("bench writes byte-identical CSVs for a fixed seed") {
  TempDir dir;
  const fs::path out_a = dir.path / "a";
  const fs::path out_b = dir.path / "b";
  const std::string base =
      "bench --problem simple_packing --trials 2 --seed 9 --threads 1 "
      "--formulations vertex_enum --out ";
  std::string table_a, table_b;
  CHECK(run(base + out_a.string(), &table_a) == 0);
  CHECK(run(base + out_b.string(), &table_b) == 0);
  const std::string csv_name = "simple_packing-vertex_enum-9.csv";
  const std::string csv_a = slurp(out_a / csv_name);
  const std::string csv_b = slurp(out_b / csv_name);
  REQUIRE(!csv_a.empty());
  CHECK(csv_a == csv_b);
  CHECK(table_a.find("simple_packing") != std::string::npos);
  CHECK(fs::exists(out_a / "summary.json"));
}

TEST_CASE("bench with both formulations prints two summary rows") {
  std::string table;
  CHECK(run("bench --problem simple_packing --trials 1 --seed 4 --threads 1",
            &table) == 0);
  CHECK(table.find("vertex_enum") != std::string::npos);
  CHECK(table.find("separating_hyperplanes") != std::string::npos);
}

TEST_CASE("unknown benchmark problem exits 2") {
  CHECK(run("bench --problem nonsense --trials 1") == 2);
}
