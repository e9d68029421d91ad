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

#include "sdcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace polyplan {
namespace {

// Stack-allocated matrices for the (d+1)-sized assignment systems.
using SmallMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;

bool next_combination(std::vector<int>& idx, int m) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[i] < m - (k - i)) {
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

double row_scale(const SdLP& lp, int i) {
  return std::max({1.0, lp.A.row(i).cwiseAbs().maxCoeff(), std::abs(lp.b(i))});
}

// Solves the selected system; returns false when it is singular under the
// pivot-ratio threshold.
bool solve_selected(const SdLP& lp, const Assignment& a, SmallVector* w) {
  const int k = a.count;
  SmallMatrix sel(k, k);
  SmallVector rhs(k);
  for (int i = 0; i < k; ++i) {
    sel.row(i) = lp.A.row(a[i]);
    rhs(i) = -lp.b(a[i]);
  }
  Eigen::FullPivLU<SmallMatrix> lu(sel);
  lu.setThreshold(1.0 / kSingularCondLimit);
  if (!lu.isInvertible()) return false;
  *w = lu.solve(rhs);
  return w->allFinite();
}

bool feasible_everywhere(const SdLP& lp, const SmallVector& w) {
  const int m = lp.rows();
  for (int i = 0; i < m; ++i) {
    const double r = lp.A.row(i).dot(w) + lp.b(i);
    if (r < -kAssignmentFeasTol * row_scale(lp, i)) return false;
  }
  return true;
}

// Derivative of the selected rows' residual with respect to one ego pose
// coordinate, evaluated at w. Only ego-block rows (index < m1) depend on the
// pose; the scaling column A c + b is rigid-transform invariant.
SmallVector selected_rows_pose_derivative(const SdLP& lp,
                                          const Assignment& a,
                                          const EgoPoseContext& ctx,
                                          const SmallVector& w, int coord) {
  const int d = lp.d;
  const int k = a.count;
  SmallVector v = SmallVector::Zero(k);
  const Matrix& Abody = ctx.body->A();
  const Vector p = w.head(d);
  for (int i = 0; i < k; ++i) {
    const int row = a[i];
    if (row >= lp.m1) continue;
    if (coord < d) {
      // translation: d b'/d l_j = -(A R^T)_{row, j}
      v(i) = -Abody.row(row).dot(ctx.R.row(coord));
    } else {
      // rotation: (A dR^T)_row . (p - l)
      const Matrix& dR = ctx.dR[coord - d];
      v(i) = (Abody.row(row) * dR.transpose()).dot(p - ctx.pose.translation);
    }
  }
  return v;
}

bool fixed_assignment_gradient(const SdLP& lp, const Assignment& a,
                               const EgoPoseContext& ctx, double* value,
                               Vector* gradient) {
  const int k = a.count;
  SmallMatrix sel(k, k);
  SmallVector rhs(k);
  for (int i = 0; i < k; ++i) {
    sel.row(i) = lp.A.row(a[i]);
    rhs(i) = -lp.b(a[i]);
  }
  Eigen::FullPivLU<SmallMatrix> lu(sel);
  lu.setThreshold(1.0 / kSingularCondLimit);
  if (!lu.isInvertible()) return false;
  const SmallVector w = lu.solve(rhs);
  if (!w.allFinite()) return false;
  if (value) *value = w(k - 1);
  if (!gradient) return true;

  // dalpha/dxi = -lambda . v_xi with A_sel^T lambda = e_alpha.
  SmallVector e = SmallVector::Zero(k);
  e(k - 1) = 1.0;
  const SmallVector lambda = lu.transpose().solve(e);
  const int nc = ctx.num_pose_coords();
  gradient->resize(nc);
  for (int c = 0; c < nc; ++c) {
    const SmallVector v = selected_rows_pose_derivative(lp, a, ctx, w, c);
    (*gradient)(c) = -lambda.dot(v);
  }
  return gradient->allFinite();
}

}  // namespace

std::vector<AssignmentPoint> enumerate_assignments(const SdLP& lp) {
  const int m = lp.rows();
  const int k = lp.d + 1;
  std::vector<AssignmentPoint> out;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  do {
    AssignmentPoint pt;
    pt.assignment.count = k;
    for (int i = 0; i < k; ++i) pt.assignment.rows[i] = idx[i];
    SmallVector w;
    if (!solve_selected(lp, pt.assignment, &w)) {
      pt.singular = true;
      pt.feasible = false;
      pt.w = Vector::Constant(k, std::numeric_limits<double>::quiet_NaN());
    } else {
      pt.w = w;
      pt.feasible = feasible_everywhere(lp, w);
    }
    out.push_back(std::move(pt));
  } while (next_combination(idx, m));
  return out;
}

double signed_distance(const ConvexPolytope& ego,
                       const ConvexPolytope& obstacle) {
  const SdLP lp = build_sdlp(ego, obstacle);
  const int m = lp.rows();
  const int k = lp.d + 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  Assignment a;
  a.count = k;
  do {
    for (int i = 0; i < k; ++i) a.rows[i] = idx[i];
    SmallVector w;
    if (!solve_selected(lp, a, &w)) continue;
    if (!feasible_everywhere(lp, w)) continue;
    best = std::min(best, w(k - 1));
  } while (next_combination(idx, m));
  if (!std::isfinite(best))
    throw std::runtime_error(
        "signed_distance: no feasible assignment (degenerate geometry)");
  return best;
}

namespace {

// Nonemptiness of the intersection of the two scaled bodies at a fixed alpha,
// via basic points of the stacked d-dimensional system. A nonempty bounded
// intersection has a vertex, and every vertex solves some d-row subsystem.
bool scaled_intersection_nonempty(const Matrix& A, const Vector& beta, int d) {
  const int m = static_cast<int>(A.rows());
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;
  SmallMatrix sel(d, d);
  SmallVector rhs(d);
  do {
    for (int i = 0; i < d; ++i) {
      sel.row(i) = A.row(idx[i]);
      rhs(i) = -beta(idx[i]);
    }
    Eigen::FullPivLU<SmallMatrix> lu(sel);
    lu.setThreshold(1e-13);
    if (!lu.isInvertible()) continue;
    const SmallVector p = lu.solve(rhs);
    if (!p.allFinite()) continue;
    bool ok = true;
    for (int r = 0; r < m; ++r) {
      const double scale =
          std::max({1.0, A.row(r).cwiseAbs().maxCoeff(), std::abs(beta(r))});
      if (A.row(r).dot(p) + beta(r) < -1e-10 * scale) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (next_combination(idx, m));
  return false;
}

}  // namespace

double signed_distance_oracle(const ConvexPolytope& ego,
                              const ConvexPolytope& obstacle, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("oracle tolerance must be > 0");
  if (ego.dim() != obstacle.dim())
    throw DimensionError("ego and obstacle dimensions differ");
  const int d = ego.dim();
  const int m = ego.num_faces() + obstacle.num_faces();

  Matrix A(m, d);
  A.topRows(ego.num_faces()) = ego.A();
  A.bottomRows(obstacle.num_faces()) = obstacle.A();
  Vector base(m), gain(m);
  base.head(ego.num_faces()) = ego.b();
  base.tail(obstacle.num_faces()) = obstacle.b();
  gain.head(ego.num_faces()) = ego.A() * ego.c() + ego.b();
  gain.tail(obstacle.num_faces()) = obstacle.A() * obstacle.c() + obstacle.b();

  auto intersects = [&](double alpha) {
    return scaled_intersection_nonempty(A, base + alpha * gain, d);
  };

  if (intersects(-1.0)) return -1.0;
  double lo = -1.0;
  double hi = 1.0;
  while (!intersects(hi)) {
    hi *= 2.0;
    if (hi > 1e9)
      throw std::runtime_error("oracle: bodies never intersect under scaling");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (intersects(mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

EgoPoseContext make_ego_pose_context(const ConvexPolytope& body,
                                     const Pose& pose,
                                     const ConvexPolytope& obstacle) {
  if (body.dim() != pose.dim() || body.dim() != obstacle.dim())
    throw DimensionError("pose/body/obstacle dimensions differ");
  EgoPoseContext ctx;
  ctx.body = &body;
  ctx.obstacle = &obstacle;
  ctx.pose = pose;
  ctx.R = rotation_matrix(pose.angles, pose.dim());
  ctx.dR = rotation_derivatives(pose.angles, pose.dim());
  return ctx;
}

SdLP build_sdlp(const EgoPoseContext& ctx) {
  return build_sdlp(transform_polytope(*ctx.body, pose_transform(ctx.pose)),
                    *ctx.obstacle);
}

Vector sd_gradient(const SdLP& lp, const AssignmentPoint& pt,
                   const EgoPoseContext& ctx) {
  if (pt.singular)
    throw std::invalid_argument("sd_gradient: singular assignment point");
  if (!pt.feasible)
    throw std::invalid_argument("sd_gradient: infeasible assignment point");
  Vector g;
  if (!fixed_assignment_gradient(lp, pt.assignment, ctx, nullptr, &g))
    throw std::invalid_argument("sd_gradient: selected system is singular");
  return g;
}

bool assignment_value_gradient(const EgoPoseContext& ctx, const Assignment& a,
                               double* value, Vector* gradient) {
  const SdLP lp = build_sdlp(ctx);
  return fixed_assignment_gradient(lp, a, ctx, value, gradient);
}

bool assignment_value_gradient(const SdLP& lp, const EgoPoseContext& ctx,
                               const Assignment& a, double* value,
                               Vector* gradient) {
  return fixed_assignment_gradient(lp, a, ctx, value, gradient);
}

namespace {

struct Candidate {
  double alpha;
  Assignment assignment;
};

// Values closer than this are treated as tied when ordering slots.
constexpr double kSlotTieTol = 1e-9;

// Feasible assignments sorted ascending by value. Runs of values within
// kSlotTieTol order lexicographically by assignment index, so the slot ->
// assignment pairing is stable under perturbations smaller than the
// tolerance; packing contact sits exactly on tie manifolds and an unstable
// pairing would make the slot gradients flip under infinitesimal pose
// changes.
std::vector<Candidate> sorted_feasible(const SdLP& lp) {
  const int m = lp.rows();
  const int k = lp.d + 1;
  std::vector<Candidate> feasible;
  feasible.reserve(16);
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  Assignment a;
  a.count = k;
  do {
    for (int i = 0; i < k; ++i) a.rows[i] = idx[i];
    SmallVector w;
    if (!solve_selected(lp, a, &w)) continue;
    if (!feasible_everywhere(lp, w)) continue;
    feasible.push_back({w(k - 1), a});
  } while (next_combination(idx, m));
  std::sort(feasible.begin(), feasible.end(),
            [](const Candidate& x, const Candidate& y) {
              if (x.alpha != y.alpha) return x.alpha < y.alpha;
              return x.assignment < y.assignment;
            });
  // Vertices of the (upward unbounded) feasible region can sit at enormous
  // alpha when the selected system is close to singular. They are never
  // meaningfully active, but their gradients are as large as their values,
  // so slotting them makes the constraint set hypersensitive. Keep only
  // values within a generous band above the minimum.
  if (!feasible.empty()) {
    const double cap =
        std::max(1e3, 100.0 * (1.0 + std::abs(feasible.front().alpha)));
    while (feasible.size() > 1 && feasible.back().alpha > cap)
      feasible.pop_back();
  }
  // Lexicographic order inside each near-tie run.
  size_t lo = 0;
  while (lo < feasible.size()) {
    size_t hi = lo + 1;
    while (hi < feasible.size() &&
           feasible[hi].alpha - feasible[hi - 1].alpha <= kSlotTieTol)
      ++hi;
    if (hi - lo > 1)
      std::sort(feasible.begin() + lo, feasible.begin() + hi,
                [](const Candidate& x, const Candidate& y) {
                  return x.assignment < y.assignment;
                });
    lo = hi;
  }
  return feasible;
}

}  // namespace

SlotSet fill_slots(const SdLP& lp, int N, const EgoPoseContext& ctx) {
  if (N < 1) throw std::invalid_argument("slot count must be >= 1");
  const std::vector<Candidate> feasible = sorted_feasible(lp);
  if (feasible.empty())
    throw std::runtime_error("fill_slots: no feasible assignment");

  SlotSet out;
  out.feasible_count = static_cast<int>(feasible.size());
  out.slots.resize(N);
  for (int s = 0; s < N; ++s) {
    const Candidate& c =
        s < out.feasible_count ? feasible[s] : feasible[out.feasible_count - 1];
    Slot& slot = out.slots[s];
    slot.assignment = c.assignment;
    slot.sd_value = c.alpha;
    if (!fixed_assignment_gradient(lp, c.assignment, ctx, nullptr,
                                   &slot.gradient))
      slot.gradient = Vector::Zero(ctx.num_pose_coords());
  }
  return out;
}

std::vector<double> slot_values(const SdLP& lp, int N) {
  if (N < 1) throw std::invalid_argument("slot count must be >= 1");
  const std::vector<Candidate> feasible = sorted_feasible(lp);
  if (feasible.empty())
    throw std::runtime_error("slot_values: no feasible assignment");
  std::vector<double> out(N);
  const int K = static_cast<int>(feasible.size());
  for (int s = 0; s < N; ++s)
    out[s] = feasible[std::min(s, K - 1)].alpha;
  return out;
}

int default_slot_count(int d) { return d == 2 ? 4 : 8; }

std::string dump_assignments_json(const SdLP& lp) {
  nlohmann::json arr = nlohmann::json::array();
  for (const AssignmentPoint& pt : enumerate_assignments(lp)) {
    nlohmann::json j;
    j["rows"] = std::vector<int>(pt.assignment.rows.begin(),
                                 pt.assignment.rows.begin() + pt.assignment.count);
    j["singular"] = pt.singular;
    j["feasible"] = pt.feasible;
    if (!pt.singular) {
      j["w"] = std::vector<double>(pt.w.data(), pt.w.data() + pt.w.size());
      j["alpha"] = pt.alpha();
    }
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

}  // namespace polyplan
