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

#include "trajopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polyplan {
namespace {

constexpr double kHessianFdStep = 1e-5;
// Tikhonov term on the inequality complementarity rows of the KKT system
// (F_mu = c_ineq - eps mu). Contact configurations have non-unique
// multipliers, which leaves the plain KKT Jacobian rank deficient; the
// perturbation is far below every feasibility tolerance in use.
constexpr double kComplementarityRegularization = 1e-8;

int spatial_dim_from_state(int state_size) {
  if (state_size == 6) return 2;
  if (state_size == 12) return 3;
  throw std::invalid_argument("state vector must have 6 (2D) or 12 (3D) entries");
}

Vector wrap_pose_angles(Vector pose, int d) {
  for (int i = d; i < pose.size(); ++i) pose(i) = wrap_angle(pose(i));
  return pose;
}

}  // namespace

RigidState::RigidState(Vector pose_in, Vector velocity_in)
    : pose(std::move(pose_in)), velocity(std::move(velocity_in)) {
  if (pose.size() != velocity.size())
    throw std::invalid_argument("pose and velocity blocks must match");
  const int d = spatial_dim_from_state(
      static_cast<int>(pose.size() + velocity.size()));
  pose = wrap_pose_angles(pose, d);
}

RigidState RigidState::from_stacked(const Vector& x, int d) {
  const int pd = 3 * (d - 1);
  if (x.size() != 2 * pd)
    throw std::invalid_argument("stacked state has wrong size");
  return RigidState(x.head(pd), x.tail(pd));
}

int RigidState::dim() const { return pose.size() == 3 ? 2 : 3; }

Vector RigidState::stacked() const {
  Vector out(pose.size() + velocity.size());
  out << pose, velocity;
  return out;
}

Pose RigidState::rigid_pose() const {
  const int d = dim();
  return Pose(pose.head(d), pose.tail(pose.size() - d));
}

RigidState dynamics_step(const RigidState& x, const Vector& u, double dt) {
  if (u.size() != x.pose.size())
    throw std::invalid_argument("control dimension mismatch");
  const Vector v_next = x.velocity + dt * u;
  return RigidState(x.pose + dt * v_next, v_next);
}

void dynamics_matrices(int d, double dt, Matrix* Ad, Matrix* Bd) {
  const int pd = 3 * (d - 1);
  *Ad = Matrix::Identity(2 * pd, 2 * pd);
  Ad->topRightCorner(pd, pd) = dt * Matrix::Identity(pd, pd);
  *Bd = Matrix::Zero(2 * pd, pd);
  Bd->topRows(pd) = dt * dt * Matrix::Identity(pd, pd);
  Bd->bottomRows(pd) = dt * Matrix::Identity(pd, pd);
}

const char* to_string(Formulation f) {
  return f == Formulation::kVertexEnum ? "vertex_enum"
                                       : "separating_hyperplanes";
}

std::optional<Formulation> formulation_from_string(const std::string& s) {
  if (s == "vertex_enum") return Formulation::kVertexEnum;
  if (s == "separating_hyperplanes") return Formulation::kSeparatingHyperplanes;
  return std::nullopt;
}

void TrajectoryProblem::validate() const {
  if (d != 2 && d != 3) throw std::invalid_argument("problem dimension must be 2 or 3");
  if (T < 1) throw std::invalid_argument("horizon T must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("step dt must be positive");
  if (x0.size() != state_dim()) throw std::invalid_argument("x0 size mismatch");
  if (u0.size() != control_dim()) throw std::invalid_argument("u0 size mismatch");
  if (goal_pose.size() != pose_dim())
    throw std::invalid_argument("goal pose size mismatch");
  if (Q.size() != pose_dim() || R.size() != control_dim() ||
      u_max.size() != control_dim())
    throw std::invalid_argument("Q/R/u_max size mismatch");
  if (Q.minCoeff() < 0.0 || R.minCoeff() < 0.0)
    throw std::invalid_argument("Q and R penalties must be nonnegative");
  if (u_max.minCoeff() <= 0.0)
    throw std::invalid_argument("u_max must be positive componentwise");
  if (slots < 1) throw std::invalid_argument("slot count must be >= 1");
  for (const auto& part : ego_parts)
    if (part.dim() != d) throw DimensionError("ego part dimension mismatch");
  for (const auto& obs : obstacles)
    if (obs.dim() != d) throw DimensionError("obstacle dimension mismatch");
}

int TrajectoryNlp::num_eq() const {
  int n = num_linear_eq();
  for (const auto& g : eq_groups) n += g->rows();
  return n;
}

int TrajectoryNlp::num_in() const {
  int n = num_linear_in();
  for (const auto& g : in_groups) n += g->rows();
  return n;
}

double TrajectoryNlp::cost(const Vector& z) const {
  return 0.5 * z.dot(cost_H * z) + cost_g.dot(z) + cost_c;
}

int TrajectoryNlp::state_offset(int t) const {
  const int bs = problem.state_dim() + problem.control_dim();
  return (t - 1) * bs;
}

int TrajectoryNlp::control_offset(int t) const {
  return state_offset(t) + problem.state_dim();
}

std::vector<Vector> TrajectoryNlp::states(const Vector& z) const {
  std::vector<Vector> out;
  out.reserve(problem.T + 1);
  out.push_back(problem.x0);
  for (int t = 1; t <= problem.T; ++t)
    out.push_back(z.segment(state_offset(t), problem.state_dim()));
  return out;
}

std::vector<Vector> TrajectoryNlp::controls(const Vector& z) const {
  std::vector<Vector> out;
  out.reserve(problem.T);
  for (int t = 1; t <= problem.T; ++t)
    out.push_back(z.segment(control_offset(t), problem.control_dim()));
  return out;
}

namespace {

// Central finite differences of an analytic Jacobian; valid whenever the
// group's rows are fixed smooth functions of the support variables.
void fd_hessians_from_eval(const ConstraintGroup& g, const Vector& zloc,
                           std::vector<Matrix>* hess) {
  const int n = static_cast<int>(zloc.size());
  const int r = g.rows();
  hess->assign(r, Matrix::Zero(n, n));
  Vector vals;
  Matrix jp(r, n), jm(r, n);
  for (int i = 0; i < n; ++i) {
    Vector zp = zloc, zm = zloc;
    zp(i) += kHessianFdStep;
    zm(i) -= kHessianFdStep;
    g.eval(zp, &vals, &jp);
    g.eval(zm, &vals, &jm);
    for (int k = 0; k < r; ++k)
      (*hess)[k].col(i) = (jp.row(k) - jm.row(k)).transpose() /
                          (2.0 * kHessianFdStep);
  }
  for (int k = 0; k < r; ++k)
    (*hess)[k] = 0.5 * ((*hess)[k] + (*hess)[k].transpose()).eval();
}

// N signed-distance slots for one (ego part, obstacle) pair at one timestep.
// Support is the pose block of x_t; values are the sorted slot values and
// Jacobian rows the fixed-assignment gradients.
class SlotGroup final : public ConstraintGroup {
 public:
  SlotGroup(ConvexPolytope part, ConvexPolytope obstacle, int slots,
            std::vector<int> support)
      : part_(std::move(part)),
        obstacle_(std::move(obstacle)),
        slots_(slots),
        support_(std::move(support)) {}

  int rows() const override { return slots_; }
  const std::vector<int>& support() const override { return support_; }

  void eval(const Vector& zloc, Vector* values, Matrix* jac) const override {
    const Pose pose = Pose::from_flat(zloc, part_.dim());
    if (!jac) {
      const SdLP lp = build_sdlp(
          transform_polytope(part_, pose_transform(pose)), obstacle_);
      const std::vector<double> vals = slot_values(lp, slots_);
      values->resize(slots_);
      for (int i = 0; i < slots_; ++i) (*values)(i) = vals[i];
      return;
    }
    const EgoPoseContext ctx = make_ego_pose_context(part_, pose, obstacle_);
    const SdLP lp = build_sdlp(ctx);
    const SlotSet set = fill_slots(lp, slots_, ctx);
    values->resize(slots_);
    jac->resize(slots_, zloc.size());
    for (int i = 0; i < slots_; ++i) {
      (*values)(i) = set.slots[i].sd_value;
      jac->row(i) = set.slots[i].gradient.transpose();
    }
  }

  // Curvature of each slot at its frozen assignment, by central differences
  // of the fixed-assignment gradient. Re-sorting at the perturbed poses is
  // deliberately not applied here.
  void hessians(const Vector& zloc, std::vector<Matrix>* hess) const override {
    const int n = static_cast<int>(zloc.size());
    const Pose pose = Pose::from_flat(zloc, part_.dim());
    const EgoPoseContext ctx = make_ego_pose_context(part_, pose, obstacle_);
    const SdLP lp = build_sdlp(ctx);
    const SlotSet set = fill_slots(lp, slots_, ctx);
    hess->assign(slots_, Matrix::Zero(n, n));
    for (int i = 0; i < n; ++i) {
      Vector zp = zloc, zm = zloc;
      zp(i) += kHessianFdStep;
      zm(i) -= kHessianFdStep;
      const EgoPoseContext cp = make_ego_pose_context(
          part_, Pose::from_flat(zp, part_.dim()), obstacle_);
      const EgoPoseContext cm = make_ego_pose_context(
          part_, Pose::from_flat(zm, part_.dim()), obstacle_);
      const SdLP lp_p = build_sdlp(cp);
      const SdLP lp_m = build_sdlp(cm);
      for (int s = 0; s < slots_; ++s) {
        Vector gp, gm;
        if (!assignment_value_gradient(lp_p, cp, set.slots[s].assignment,
                                       nullptr, &gp) ||
            !assignment_value_gradient(lp_m, cm, set.slots[s].assignment,
                                       nullptr, &gm))
          continue;  // singular at the probe: leave the column zero
        (*hess)[s].col(i) = (gp - gm) / (2.0 * kHessianFdStep);
      }
    }
    for (int s = 0; s < slots_; ++s)
      (*hess)[s] = 0.5 * ((*hess)[s] + (*hess)[s].transpose()).eval();
  }

 private:
  ConvexPolytope part_;
  ConvexPolytope obstacle_;
  int slots_;
  std::vector<int> support_;
};

// Hyperplane side constraints for one pair at one timestep: every posed ego
// vertex on the positive side, every obstacle vertex on the negative side.
// Support is (pose of x_t, a, beta).
class SeparatingPlaneGroup final : public ConstraintGroup {
 public:
  SeparatingPlaneGroup(std::vector<Vector> ego_vertices_body,
                       std::vector<Vector> obstacle_vertices, int d,
                       std::vector<int> support)
      : ego_vertices_(std::move(ego_vertices_body)),
        obstacle_vertices_(std::move(obstacle_vertices)),
        d_(d),
        pose_coords_(d == 2 ? 3 : 6),
        support_(std::move(support)) {}

  int rows() const override {
    return static_cast<int>(ego_vertices_.size() + obstacle_vertices_.size());
  }
  const std::vector<int>& support() const override { return support_; }

  void eval(const Vector& zloc, Vector* values, Matrix* jac) const override {
    const Pose pose = Pose::from_flat(zloc.head(pose_coords_), d_);
    const Vector a = zloc.segment(pose_coords_, d_);
    const double beta = zloc(pose_coords_ + d_);
    const Matrix R = rotation_matrix(pose.angles, d_);
    const int r = rows();
    values->resize(r);
    if (jac) jac->setZero(r, zloc.size());
    std::vector<Matrix> dR;
    if (jac) dR = rotation_derivatives(pose.angles, d_);
    int row = 0;
    for (const Vector& v : ego_vertices_) {
      const Vector world = R * v + pose.translation;
      (*values)(row) = a.dot(world) - beta;
      if (jac) {
        jac->block(row, 0, 1, d_) = a.transpose();
        for (size_t k = 0; k < dR.size(); ++k)
          (*jac)(row, d_ + static_cast<int>(k)) = a.dot(dR[k] * v);
        jac->block(row, pose_coords_, 1, d_) = world.transpose();
        (*jac)(row, pose_coords_ + d_) = -1.0;
      }
      ++row;
    }
    for (const Vector& v : obstacle_vertices_) {
      (*values)(row) = beta - a.dot(v);
      if (jac) {
        jac->block(row, pose_coords_, 1, d_) = -v.transpose();
        (*jac)(row, pose_coords_ + d_) = 1.0;
      }
      ++row;
    }
  }

  void hessians(const Vector& zloc, std::vector<Matrix>* hess) const override {
    fd_hessians_from_eval(*this, zloc, hess);
  }

 private:
  std::vector<Vector> ego_vertices_;
  std::vector<Vector> obstacle_vertices_;
  int d_;
  int pose_coords_;
  std::vector<int> support_;
};

// ||a||^2 = 1 for one hyperplane normal.
class PlaneNormalizationGroup final : public ConstraintGroup {
 public:
  PlaneNormalizationGroup(std::vector<int> support)
      : support_(std::move(support)) {}

  int rows() const override { return 1; }
  const std::vector<int>& support() const override { return support_; }

  void eval(const Vector& zloc, Vector* values, Matrix* jac) const override {
    values->resize(1);
    (*values)(0) = zloc.squaredNorm() - 1.0;
    if (jac) {
      jac->resize(1, zloc.size());
      jac->row(0) = 2.0 * zloc.transpose();
    }
  }

  void hessians(const Vector& zloc, std::vector<Matrix>* hess) const override {
    hess->assign(1, 2.0 * Matrix::Identity(zloc.size(), zloc.size()));
  }

 private:
  std::vector<int> support_;
};

// Cost, dynamics defects, control bounds, and the straight-line initial
// guess shared by both formulations. `nz` may exceed the trajectory block to
// leave room for auxiliary variables.
TrajectoryNlp build_core(const TrajectoryProblem& prob, int nz) {
  prob.validate();
  TrajectoryNlp nlp;
  nlp.problem = prob;
  const int sd = prob.state_dim();
  const int cd = prob.control_dim();
  const int pd = prob.pose_dim();
  const int bs = sd + cd;
  nlp.traj_vars = prob.T * bs;
  nlp.nz = nz;

  // Quadratic cost: sum_t (pose_t - goal)' Q (pose_t - goal) + u' R u.
  std::vector<Eigen::Triplet<double>> h_trips;
  nlp.cost_g = Vector::Zero(nz);
  nlp.cost_c = 0.0;
  for (int t = 1; t <= prob.T; ++t) {
    const int xoff = (t - 1) * bs;
    const int uoff = xoff + sd;
    for (int i = 0; i < pd; ++i) {
      h_trips.emplace_back(xoff + i, xoff + i, 2.0 * prob.Q(i));
      nlp.cost_g(xoff + i) = -2.0 * prob.Q(i) * prob.goal_pose(i);
      nlp.cost_c += prob.Q(i) * prob.goal_pose(i) * prob.goal_pose(i);
    }
    for (int i = 0; i < cd; ++i)
      h_trips.emplace_back(uoff + i, uoff + i, 2.0 * prob.R(i));
  }
  nlp.cost_H.resize(nz, nz);
  nlp.cost_H.setFromTriplets(h_trips.begin(), h_trips.end());

  // Dynamics defects x_t - Ad x_{t-1} - Bd u_{t-1} = 0.
  Matrix Ad, Bd;
  dynamics_matrices(prob.d, prob.dt, &Ad, &Bd);
  std::vector<Eigen::Triplet<double>> eq_trips;
  nlp.eq_b = Vector::Zero(prob.T * sd);
  for (int t = 1; t <= prob.T; ++t) {
    const int row0 = (t - 1) * sd;
    const int xoff = (t - 1) * bs;
    const int uoff = xoff + sd;
    for (int i = 0; i < sd; ++i) eq_trips.emplace_back(row0 + i, xoff + i, 1.0);
    for (int i = 0; i < sd; ++i)
      for (int j = 0; j < cd; ++j)
        if (Bd(i, j) != 0.0)
          eq_trips.emplace_back(row0 + i, uoff + j, -Bd(i, j));
    if (t == 1) {
      nlp.eq_b.segment(row0, sd) = -Ad * prob.x0;
    } else {
      const int xprev = (t - 2) * bs;
      for (int i = 0; i < sd; ++i)
        for (int j = 0; j < sd; ++j)
          if (Ad(i, j) != 0.0)
            eq_trips.emplace_back(row0 + i, xprev + j, -Ad(i, j));
    }
  }
  nlp.eq_A.resize(prob.T * sd, nz);
  nlp.eq_A.setFromTriplets(eq_trips.begin(), eq_trips.end());

  // Control bounds as two one-sided rows per component.
  std::vector<Eigen::Triplet<double>> in_trips;
  nlp.in_b = Vector::Zero(2 * prob.T * cd);
  for (int t = 1; t <= prob.T; ++t) {
    const int uoff = (t - 1) * bs + sd;
    for (int i = 0; i < cd; ++i) {
      const int row = 2 * ((t - 1) * cd + i);
      in_trips.emplace_back(row, uoff + i, -1.0);  // u_max - u >= 0
      nlp.in_b(row) = prob.u_max(i);
      in_trips.emplace_back(row + 1, uoff + i, 1.0);  // u + u_max >= 0
      nlp.in_b(row + 1) = prob.u_max(i);
    }
  }
  nlp.in_A.resize(2 * prob.T * cd, nz);
  nlp.in_A.setFromTriplets(in_trips.begin(), in_trips.end());

  // Straight-line pose interpolation, zero velocities and controls. The
  // interpolation stops advancing at the last collision-free sample: packing
  // goals sit inside obstacles, and seeding poses deep in penetration starts
  // the solver in a basin it rarely escapes.
  nlp.z0 = Vector::Zero(nz);
  const Vector pose0 = prob.x0.head(pd);
  Vector last_safe = pose0;
  bool blocked = false;
  for (int t = 1; t <= prob.T; ++t) {
    const double s = static_cast<double>(t) / prob.T;
    Vector pose = pose0 + s * (prob.goal_pose - pose0);
    if (!blocked && prob.num_pairs() > 0) {
      const RigidTransform tf = pose_transform(Pose::from_flat(pose, prob.d));
      for (const auto& part : prob.ego_parts) {
        const ConvexPolytope posed = transform_polytope(part, tf);
        for (const auto& obs : prob.obstacles) {
          if (signed_distance(posed, obs) < 0.0) {
            blocked = true;
            break;
          }
        }
        if (blocked) break;
      }
    }
    if (blocked)
      pose = last_safe;
    else
      last_safe = pose;
    nlp.z0.segment((t - 1) * bs, pd) = pose;
  }
  nlp.z0.segment(sd, cd) = prob.u0;
  return nlp;
}

std::vector<int> pose_support(const TrajectoryNlp& nlp, int t) {
  std::vector<int> sup(nlp.problem.pose_dim());
  const int off = nlp.state_offset(t);
  for (int i = 0; i < nlp.problem.pose_dim(); ++i) sup[i] = off + i;
  return sup;
}

}  // namespace

TrajectoryNlp build_separating_hyperplanes(const TrajectoryProblem& prob) {
  const int bs = prob.state_dim() + prob.control_dim();
  const int aux = prob.d + 1;
  const int pairs = prob.num_pairs();
  const int nz = prob.T * bs + prob.T * pairs * aux;
  TrajectoryNlp nlp = build_core(prob, nz);

  std::vector<std::vector<Vector>> part_vertices;
  for (const auto& part : prob.ego_parts) part_vertices.push_back(part.vertices());
  std::vector<std::vector<Vector>> obstacle_vertices;
  for (const auto& obs : prob.obstacles) obstacle_vertices.push_back(obs.vertices());

  int unit = 0;
  for (int t = 1; t <= prob.T; ++t) {
    const Pose pose = Pose::from_flat(
        nlp.z0.segment(nlp.state_offset(t), prob.pose_dim()), prob.d);
    const Matrix R = rotation_matrix(pose.angles, prob.d);
    for (size_t pi = 0; pi < prob.ego_parts.size(); ++pi) {
      for (size_t oi = 0; oi < prob.obstacles.size(); ++oi) {
        const int aux_off = nlp.traj_vars + unit * aux;
        ++unit;

        std::vector<int> support = pose_support(nlp, t);
        for (int i = 0; i < aux; ++i) support.push_back(aux_off + i);
        nlp.in_groups.push_back(std::make_unique<SeparatingPlaneGroup>(
            part_vertices[pi], obstacle_vertices[oi], prob.d,
            std::move(support)));

        std::vector<int> norm_support;
        for (int i = 0; i < prob.d; ++i) norm_support.push_back(aux_off + i);
        nlp.eq_groups.push_back(
            std::make_unique<PlaneNormalizationGroup>(std::move(norm_support)));

        // Plane guess: normal from obstacle center toward the posed ego part,
        // offset midway between the two centers.
        const Vector ego_center =
            R * prob.ego_parts[pi].c() + pose.translation;
        const Vector obs_center = prob.obstacles[oi].c();
        Vector dir = ego_center - obs_center;
        if (dir.norm() < 1e-9) dir = Vector::Unit(prob.d, 0);
        dir.normalize();
        nlp.z0.segment(aux_off, prob.d) = dir;
        nlp.z0(aux_off + prob.d) = dir.dot(0.5 * (ego_center + obs_center));
      }
    }
  }
  return nlp;
}

TrajectoryNlp build_nlp(const TrajectoryProblem& prob) {
  if (prob.formulation == Formulation::kSeparatingHyperplanes)
    return build_separating_hyperplanes(prob);

  const int bs = prob.state_dim() + prob.control_dim();
  TrajectoryNlp nlp = build_core(prob, prob.T * bs);
  for (int t = 1; t <= prob.T; ++t) {
    for (const auto& part : prob.ego_parts) {
      for (const auto& obs : prob.obstacles) {
        nlp.in_groups.push_back(std::make_unique<SlotGroup>(
            part, obs, prob.slots, pose_support(nlp, t)));
      }
    }
  }
  return nlp;
}

MCProblem kkt_to_mcp(const TrajectoryNlp& nlp) {
  const int nz = nlp.nz;
  const int me = nlp.num_eq();
  const int mi = nlp.num_in();
  const int n = nz + me + mi;

  MCProblem prob;
  prob.dim = n;
  prob.lower = Vector::Constant(n, -std::numeric_limits<double>::infinity());
  prob.upper = Vector::Constant(n, std::numeric_limits<double>::infinity());
  prob.lower.tail(mi).setZero();  // mu >= 0
  prob.v0 = Vector::Zero(n);
  prob.v0.head(nz) = nlp.z0;
  prob.v0.tail(mi).setOnes();  // inequality multipliers start at 1

  const TrajectoryNlp* nl = &nlp;

  struct GroupEval {
    Vector values;
    Matrix jac;
  };

  // F = (grad_z L, -c_eq, c_ineq) with L = f - lambda'c_eq - mu'c_ineq.
  auto assemble_f = [nl, nz, me, mi](const Vector& v, Vector& f,
                                     bool with_jac) {
    const int n_all = nz + me + mi;
    f.resize(n_all);
    const auto z = v.head(nz);
    const auto lam = v.segment(nz, me);
    const auto mu = v.tail(mi);

    Vector grad = nl->cost_H * z + nl->cost_g;
    // Linear parts.
    const Vector eq_lin = nl->eq_A * z + nl->eq_b;
    const Vector in_lin = nl->in_A * z + nl->in_b;
    grad.noalias() -= nl->eq_A.transpose() * lam.head(nl->num_linear_eq());
    grad.noalias() -= nl->in_A.transpose() * mu.head(nl->num_linear_in());

    f.segment(nz, nl->num_linear_eq()) = -eq_lin;
    f.segment(nz + me, nl->num_linear_in()) = in_lin;

    // Nonlinear groups.
    int row = nl->num_linear_eq();
    for (const auto& g : nl->eq_groups) {
      Vector zloc(g->support().size());
      for (size_t i = 0; i < g->support().size(); ++i)
        zloc(i) = z(g->support()[i]);
      Vector vals;
      Matrix jac;
      g->eval(zloc, &vals, &jac);
      f.segment(nz + row, g->rows()) = -vals;
      for (int r = 0; r < g->rows(); ++r)
        for (size_t i = 0; i < g->support().size(); ++i)
          grad(g->support()[i]) -= lam(row + r) * jac(r, i);
      row += g->rows();
    }
    row = nl->num_linear_in();
    for (const auto& g : nl->in_groups) {
      Vector zloc(g->support().size());
      for (size_t i = 0; i < g->support().size(); ++i)
        zloc(i) = z(g->support()[i]);
      Vector vals;
      Matrix jac;
      g->eval(zloc, &vals, &jac);
      f.segment(nz + me + row, g->rows()) = vals;
      for (int r = 0; r < g->rows(); ++r)
        for (size_t i = 0; i < g->support().size(); ++i)
          grad(g->support()[i]) -= mu(row + r) * jac(r, i);
      row += g->rows();
    }
    f.head(nz) = grad;
    f.tail(mi).noalias() -= kComplementarityRegularization * mu;
    (void)with_jac;
    return true;
  };

  prob.eval_f = [assemble_f](const Vector& v, Vector& f) {
    try {
      return assemble_f(v, f, false);
    } catch (const std::exception&) {
      return false;
    }
  };

  prob.eval_fj = [nl, nz, me, mi](const Vector& v, Vector& f,
                                  SparseMatrix& jac) {
    try {
      const int n_all = nz + me + mi;
      f.resize(n_all);
      const auto z = v.head(nz);
      const auto lam = v.segment(nz, me);
      const auto mu = v.tail(mi);

      std::vector<Eigen::Triplet<double>> trips;
      trips.reserve(static_cast<size_t>(nl->cost_H.nonZeros()) +
                    4 * (nl->eq_A.nonZeros() + nl->in_A.nonZeros()));

      Vector grad = nl->cost_H * z + nl->cost_g;
      for (int k = 0; k < nl->cost_H.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(nl->cost_H, k); it; ++it)
          trips.emplace_back(static_cast<int>(it.row()),
                             static_cast<int>(it.col()), it.value());

      const Vector eq_lin = nl->eq_A * z + nl->eq_b;
      const Vector in_lin = nl->in_A * z + nl->in_b;
      grad.noalias() -= nl->eq_A.transpose() * lam.head(nl->num_linear_eq());
      grad.noalias() -= nl->in_A.transpose() * mu.head(nl->num_linear_in());
      f.segment(nz, nl->num_linear_eq()) = -eq_lin;
      f.segment(nz + me, nl->num_linear_in()) = in_lin;

      for (int k = 0; k < nl->eq_A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(nl->eq_A, k); it; ++it) {
          const int r = static_cast<int>(it.row());
          const int c = static_cast<int>(it.col());
          trips.emplace_back(c, nz + r, -it.value());   // -A_eq^T
          trips.emplace_back(nz + r, c, -it.value());   // -A_eq
        }
      for (int k = 0; k < nl->in_A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(nl->in_A, k); it; ++it) {
          const int r = static_cast<int>(it.row());
          const int c = static_cast<int>(it.col());
          trips.emplace_back(c, nz + me + r, -it.value());  // -A_in^T
          trips.emplace_back(nz + me + r, c, it.value());   // A_in
        }

      int row = nl->num_linear_eq();
      for (const auto& g : nl->eq_groups) {
        const auto& sup = g->support();
        Vector zloc(sup.size());
        for (size_t i = 0; i < sup.size(); ++i) zloc(i) = z(sup[i]);
        Vector vals;
        Matrix gj;
        g->eval(zloc, &vals, &gj);
        std::vector<Matrix> gh;
        g->hessians(zloc, &gh);
        f.segment(nz + row, g->rows()) = -vals;
        for (int r = 0; r < g->rows(); ++r) {
          for (size_t i = 0; i < sup.size(); ++i) {
            grad(sup[i]) -= lam(row + r) * gj(r, i);
            trips.emplace_back(sup[i], nz + row + r, -gj(r, i));
            trips.emplace_back(nz + row + r, sup[i], -gj(r, i));
            for (size_t j = 0; j < sup.size(); ++j)
              if (gh[r](i, j) != 0.0)
                trips.emplace_back(sup[i], sup[j],
                                   -lam(row + r) * gh[r](i, j));
          }
        }
        row += g->rows();
      }
      row = nl->num_linear_in();
      for (const auto& g : nl->in_groups) {
        const auto& sup = g->support();
        Vector zloc(sup.size());
        for (size_t i = 0; i < sup.size(); ++i) zloc(i) = z(sup[i]);
        Vector vals;
        Matrix gj;
        g->eval(zloc, &vals, &gj);
        std::vector<Matrix> gh;
        g->hessians(zloc, &gh);
        f.segment(nz + me + row, g->rows()) = vals;
        for (int r = 0; r < g->rows(); ++r) {
          for (size_t i = 0; i < sup.size(); ++i) {
            grad(sup[i]) -= mu(row + r) * gj(r, i);
            trips.emplace_back(sup[i], nz + me + row + r, -gj(r, i));
            trips.emplace_back(nz + me + row + r, sup[i], gj(r, i));
            for (size_t j = 0; j < sup.size(); ++j)
              if (gh[r](i, j) != 0.0)
                trips.emplace_back(sup[i], sup[j],
                                   -mu(row + r) * gh[r](i, j));
          }
        }
        row += g->rows();
      }

      f.head(nz) = grad;
      f.tail(mi).noalias() -= kComplementarityRegularization * mu;
      for (int i = 0; i < mi; ++i)
        trips.emplace_back(nz + me + i, nz + me + i,
                           -kComplementarityRegularization);
      jac.resize(n_all, n_all);
      jac.setFromTriplets(trips.begin(), trips.end());
      return f.allFinite();
    } catch (const std::exception&) {
      return false;
    }
  };

  return prob;
}

std::vector<std::vector<std::vector<double>>> slot_values_along(
    const TrajectoryProblem& prob, const std::vector<Vector>& states) {
  std::vector<std::vector<std::vector<double>>> out;
  for (size_t t = 1; t < states.size(); ++t) {
    const RigidState st = RigidState::from_stacked(states[t], prob.d);
    const RigidTransform tf = pose_transform(st.rigid_pose());
    std::vector<std::vector<double>> per_pair;
    for (const auto& part : prob.ego_parts) {
      const ConvexPolytope posed = transform_polytope(part, tf);
      for (const auto& obs : prob.obstacles) {
        per_pair.push_back(slot_values(build_sdlp(posed, obs), prob.slots));
      }
    }
    out.push_back(std::move(per_pair));
  }
  return out;
}

double certify_trajectory(const TrajectoryProblem& prob,
                          const std::vector<Vector>& states, double tol) {
  double min_sd = std::numeric_limits<double>::infinity();
  for (const Vector& x : states) {
    const RigidState st = RigidState::from_stacked(x, prob.d);
    const RigidTransform tf = pose_transform(st.rigid_pose());
    for (const auto& part : prob.ego_parts) {
      const ConvexPolytope posed = transform_polytope(part, tf);
      for (const auto& obs : prob.obstacles)
        min_sd = std::min(min_sd, signed_distance_oracle(posed, obs, tol));
    }
  }
  return min_sd;
}

SolveReport solve_problem(const TrajectoryProblem& prob,
                          const MCPOptions& opts) {
  SolveReport report;
  report.problem = prob;
  const TrajectoryNlp nlp = build_nlp(prob);
  const MCProblem mcp = kkt_to_mcp(nlp);
  report.solution = solve_mcp(mcp, opts);
  const Vector z = report.solution.v.head(nlp.nz);
  report.states = nlp.states(z);
  report.controls = nlp.controls(z);
  report.cost = nlp.cost(z);
  if (prob.formulation == Formulation::kVertexEnum && prob.num_pairs() > 0)
    report.slot_values = slot_values_along(prob, report.states);
  report.oracle_min_sd = certify_trajectory(prob, report.states);
  report.certified = report.oracle_min_sd >= kCertificationMargin;
  return report;
}

}  // namespace polyplan
