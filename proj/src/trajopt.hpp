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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "mcp.hpp"
#include "sdcore.hpp"

namespace polyplan {

// State of one rigid body: pose (d translations, then 1 or 3 angles) and the
// matching velocity block, 6(d-1) scalars in total. Angles are wrapped to
// (-pi, pi] on construction.
struct RigidState {
  Vector pose;
  Vector velocity;

  RigidState() = default;
  RigidState(Vector pose_in, Vector velocity_in);
  static RigidState from_stacked(const Vector& x, int d);

  int dim() const;                   // spatial dimension (2 or 3)
  int pose_dim() const { return static_cast<int>(pose.size()); }
  Vector stacked() const;
  Pose rigid_pose() const;
};

// One step of semi-implicit Euler double-integrator dynamics:
// v' = v + dt u, pose' = pose + dt v'.
RigidState dynamics_step(const RigidState& x, const Vector& u, double dt);

// Constant matrices of the same update, x' = Ad x + Bd u.
void dynamics_matrices(int d, double dt, Matrix* Ad, Matrix* Bd);

enum class Formulation { kVertexEnum, kSeparatingHyperplanes };
const char* to_string(Formulation f);
std::optional<Formulation> formulation_from_string(const std::string& s);

// Discrete-time trajectory optimization problem: reach goal_pose from x0
// while every (ego part, obstacle) pair stays collision free. Q penalizes
// pose error, R control effort; both act diagonally. Obstacles are fixed in
// the world frame; ego parts are expressed in the ego body frame.
struct TrajectoryProblem {
  int d = 2;
  int T = 20;
  double dt = 0.2;
  Vector x0;         // 6(d-1)
  Vector u0;         // 3(d-1); initial guess for the first control
  Vector goal_pose;  // 3(d-1)
  std::vector<ConvexPolytope> ego_parts;
  std::vector<ConvexPolytope> obstacles;
  Vector Q;      // pose-sized diagonal
  Vector R;      // control-sized diagonal
  Vector u_max;  // control-sized, positive
  Formulation formulation = Formulation::kVertexEnum;
  int slots = 4;  // N, vertex-enumeration formulation only

  int state_dim() const { return 6 * (d - 1); }
  int control_dim() const { return 3 * (d - 1); }
  int pose_dim() const { return 3 * (d - 1); }
  int num_pairs() const {
    return static_cast<int>(ego_parts.size() * obstacles.size());
  }
  void validate() const;
};

// A block of constraint rows that depends nonlinearly on a small set of
// decision variables. eval fills values and the dense Jacobian over the
// support; hessians returns one support-sized symmetric matrix per row
// (second derivatives, used for the Lagrangian Hessian).
class ConstraintGroup {
 public:
  virtual ~ConstraintGroup() = default;
  virtual int rows() const = 0;
  virtual const std::vector<int>& support() const = 0;
  virtual void eval(const Vector& zloc, Vector* values, Matrix* jac) const = 0;
  virtual void hessians(const Vector& zloc,
                        std::vector<Matrix>* hess) const = 0;
};

// Structured NLP over z = [(x_t, u_{t-1})]_{t=1..T} (+ appended auxiliary
// variables for the separating-hyperplanes formulation):
//
//   min  z'Hz/2 + g'z + c
//   s.t. A_eq z + b_eq = 0            (dynamics defects)
//        eq groups        = 0          (hyperplane normalizations)
//        A_in z + b_in >= 0           (control bounds)
//        in groups       >= 0          (collision constraints)
struct TrajectoryNlp {
  int nz = 0;
  int traj_vars = 0;  // leading variables holding the state/control blocks
  Vector z0;
  SparseMatrix cost_H;  // symmetric
  Vector cost_g;
  double cost_c = 0.0;
  SparseMatrix eq_A;
  Vector eq_b;
  SparseMatrix in_A;
  Vector in_b;
  std::vector<std::unique_ptr<ConstraintGroup>> eq_groups;
  std::vector<std::unique_ptr<ConstraintGroup>> in_groups;
  TrajectoryProblem problem;

  int num_linear_eq() const { return static_cast<int>(eq_b.size()); }
  int num_linear_in() const { return static_cast<int>(in_b.size()); }
  int num_eq() const;
  int num_in() const;

  double cost(const Vector& z) const;
  // State x_t for t = 0..T (x0 included) recovered from z.
  std::vector<Vector> states(const Vector& z) const;
  std::vector<Vector> controls(const Vector& z) const;
  // Index of x_t's first entry within z (t >= 1).
  int state_offset(int t) const;
  int control_offset(int t) const;
};

TrajectoryNlp build_nlp(const TrajectoryProblem& prob);
// The separating-hyperplanes variant; build_nlp dispatches here when the
// problem selects that formulation.
TrajectoryNlp build_separating_hyperplanes(const TrajectoryProblem& prob);

// KKT system of the NLP as a box MCP over v = (z, lambda, mu):
// F = (grad_z L, -c_eq, c_ineq) with z and lambda free and mu >= 0,
// L = f - lambda'c_eq - mu'c_ineq. The NLP must outlive the returned problem.
MCProblem kkt_to_mcp(const TrajectoryNlp& nlp);

// Per-step slot values along a trajectory (vertex-enumeration formulation),
// indexed [t-1][pair][slot].
std::vector<std::vector<std::vector<double>>> slot_values_along(
    const TrajectoryProblem& prob, const std::vector<Vector>& states);

// Minimum oracle signed distance over all timesteps (x0 included) and
// collision pairs; +inf when there are no pairs. Independent of the solver's
// own constraint values.
double certify_trajectory(const TrajectoryProblem& prob,
                          const std::vector<Vector>& states, double tol = 1e-6);

// A solved trajectory counts as collision free when the oracle minimum stays
// above this margin.
inline constexpr double kCertificationMargin = -1e-4;

struct SolveReport {
  TrajectoryProblem problem;
  std::vector<Vector> states;    // T + 1 entries
  std::vector<Vector> controls;  // T entries
  std::vector<std::vector<std::vector<double>>> slot_values;
  MCPSolution solution;
  double cost = 0.0;
  double oracle_min_sd = 0.0;
  bool certified = false;
};

// Full pipeline: build the NLP for the problem's formulation, reduce to an
// MCP, solve, and certify the result against the bisection oracle.
SolveReport solve_problem(const TrajectoryProblem& prob,
                          const MCPOptions& opts = {});

}  // namespace polyplan
