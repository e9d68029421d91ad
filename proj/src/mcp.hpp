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

#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>

#include "geometry.hpp"

namespace polyplan {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Box-constrained mixed complementarity problem: find v in [lower, upper]
// with F_i(v) complementary to the bound activity of v_i (F_i = 0 where v_i
// is strictly inside its box). Callbacks must be reentrant; they return false
// to signal an evaluation failure.
struct MCProblem {
  int dim = 0;
  Vector lower;  // entries may be -inf
  Vector upper;  // entries may be +inf
  Vector v0;     // start point (projected onto the box before use)
  std::function<bool(const Vector& v, Vector& f)> eval_f;
  std::function<bool(const Vector& v, Vector& f, SparseMatrix& jac)> eval_fj;
};

struct MCPOptions {
  double tol = 1e-6;   // convergence threshold on ||Phi||_inf
  int max_iter = 500;  // total Newton iterations across restarts
  int restarts = 3;    // perturbed restarts from v0 on stagnation
  std::uint64_t seed = 0;
  std::ostream* iter_log = nullptr;  // CSV stream: iter,merit,step
};

enum class MCPStatus { kConverged, kMaxIter, kSingular, kDiverged };
const char* to_string(MCPStatus s);

struct MCPSolution {
  Vector v;
  MCPStatus status = MCPStatus::kDiverged;
  double residual = 0.0;  // ||Phi||_inf at exit; <= tol iff converged
  double merit = 0.0;     // 0.5 ||Phi||^2 at exit
  int iterations = 0;
  double wall_time = 0.0;  // seconds
  std::string diagnostic;
};

// Damped semismooth Newton on the Fischer-Burmeister reformulation Phi(v):
// the FB function phi(a,b) = a + b - sqrt(a^2 + b^2) replaces bounded rows,
// free rows keep raw F. Newton directions come from a deterministic
// generalized Jacobian (kinks take the a = b limiting element), globalized by
// Armijo backtracking on 0.5 ||Phi||^2, with seeded perturbed restarts from
// v0 (noise scale 0.1) when progress stalls. Iterates stay projected onto the
// box. Bitwise deterministic for fixed (prob, opts).
MCPSolution solve_mcp(const MCProblem& prob, const MCPOptions& opts = {});

// Merit 0.5 ||Phi(v)||^2 and the per-row residual vector Phi(v).
std::pair<double, Vector> merit_and_residual(const MCProblem& prob,
                                             const Vector& v);

}  // namespace polyplan
