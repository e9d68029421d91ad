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

#include <array>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace polyplan {

// Feasibility tolerance for assignment points, relative to row scale.
inline constexpr double kAssignmentFeasTol = 1e-9;
// Selected systems with a pivot ratio beyond this are treated as singular.
inline constexpr double kSingularCondLimit = 1e12;

// A choice of d+1 rows of the signed-distance LP forced to equality. Rows are
// kept sorted, so assignments compare lexicographically.
struct Assignment {
  std::array<int, 4> rows{};
  int count = 0;

  int operator[](int i) const { return rows[i]; }
  bool operator==(const Assignment& o) const {
    return count == o.count &&
           std::equal(rows.begin(), rows.begin() + count, o.rows.begin());
  }
  bool operator<(const Assignment& o) const {
    return std::lexicographical_compare(rows.begin(), rows.begin() + count,
                                        o.rows.begin(), o.rows.begin() + o.count);
  }
};

// Solution w = (p, alpha) of one assignment's (d+1)x(d+1) linear system
// A_sel w + b_sel = 0. `feasible` means w satisfies every LP row within
// tolerance; singular selections are flagged and never feasible.
struct AssignmentPoint {
  Assignment assignment;
  Vector w;
  bool feasible = false;
  bool singular = false;

  double alpha() const { return w(w.size() - 1); }
  Vector point() const { return w.head(w.size() - 1); }
};

// Solves all C(m_sd, d+1) assignment systems of `lp` and checks feasibility
// of each solution against the full row set.
std::vector<AssignmentPoint> enumerate_assignments(const SdLP& lp);

// Signed distance between two polytopes: the minimum alpha over feasible
// assignment points of their LP. Positive iff separated, zero iff touching,
// negative iff overlapping; never below -1. Throws std::runtime_error when no
// feasible assignment exists (impossible for valid bounded polytopes).
double signed_distance(const ConvexPolytope& ego,
                       const ConvexPolytope& obstacle);

// Independent check: bisection on alpha, deciding intersection of the two
// scaled bodies at each trial value by enumerating basic points of the
// combined d-dimensional constraint system. Returns the minimal intersecting
// alpha within `tol`. Shares no code path with enumerate_assignments.
double signed_distance_oracle(const ConvexPolytope& ego,
                              const ConvexPolytope& obstacle, double tol);

// Ego geometry pinned to a pose, with the rotation derivatives needed to
// differentiate LP rows by pose coordinates (translations first, then
// angles).
struct EgoPoseContext {
  const ConvexPolytope* body = nullptr;  // ego part, body frame
  const ConvexPolytope* obstacle = nullptr;
  Pose pose;
  Matrix R;
  std::vector<Matrix> dR;

  int num_pose_coords() const { return pose.num_coords(); }
};

EgoPoseContext make_ego_pose_context(const ConvexPolytope& body,
                                     const Pose& pose,
                                     const ConvexPolytope& obstacle);

// Builds the signed-distance LP for the context's posed ego against its
// obstacle.
SdLP build_sdlp(const EgoPoseContext& ctx);

// Gradient of the assignment-point alpha with respect to the ego pose, at the
// fixed assignment of `pt`: differentiates A_sel(x) w + b_sel(x) = 0 and
// returns the alpha row of dw. Throws std::invalid_argument when `pt` is
// singular or infeasible.
Vector sd_gradient(const SdLP& lp, const AssignmentPoint& pt,
                   const EgoPoseContext& ctx);

// Value and pose gradient of one fixed assignment evaluated at an arbitrary
// pose (used for tie analysis and finite-difference curvature). Returns false
// when the selected system is singular at that pose.
bool assignment_value_gradient(const EgoPoseContext& ctx, const Assignment& a,
                               double* value, Vector* gradient);
// Same, with the context's LP already built (hot loops evaluating several
// assignments at one pose).
bool assignment_value_gradient(const SdLP& lp, const EgoPoseContext& ctx,
                               const Assignment& a, double* value,
                               Vector* gradient);

struct Slot {
  Assignment assignment;
  double sd_value = 0.0;
  Vector gradient;  // over ego pose coordinates
};

// The N sorted signed-distance constraint expressions at one configuration.
// slots[0] always carries the true signed distance. When fewer than N
// feasible assignments exist, the last feasible entry is replicated.
struct SlotSet {
  std::vector<Slot> slots;
  int feasible_count = 0;  // K
};

SlotSet fill_slots(const SdLP& lp, int N, const EgoPoseContext& ctx);

// The N sorted slot values without gradients (cheap path for pure function
// evaluations). Identical ordering and fill rule as fill_slots.
std::vector<double> slot_values(const SdLP& lp, int N);

// Default slot count: the sum of the largest number of faces meeting at a
// vertex of each body (2 + 2 in 2D; 4 + 4 for tetrahedra in 3D).
int default_slot_count(int d);

// Debug dump of every assignment point as a JSON array.
std::string dump_assignments_json(const SdLP& lp);

}  // namespace polyplan
