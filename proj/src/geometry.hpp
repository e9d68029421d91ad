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

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace polyplan {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Thrown when an input document (JSON, CLI argument) cannot be interpreted.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when two geometric objects of different spatial dimension meet.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A bounded, full-dimensional convex polytope
//
//   { p in R^d : A p + b >= 0 componentwise },
//
// with inward-pointing face normals (rows of A) and a designated strictly
// interior point c. Construction validates d in {2, 3}, at least d+1 faces,
// strict interiority of c, and boundedness of the feasible set. Instances are
// immutable; sharing across threads needs no synchronization.
class ConvexPolytope {
 public:
  ConvexPolytope(Matrix A, Vector b, Vector c);

  // Rigid transforms and uniform scalings preserve the invariants, so the
  // operations below skip re-validation through this tag.
  struct Unchecked {};
  ConvexPolytope(Unchecked, Matrix A, Vector b, Vector c)
      : A_(std::move(A)), b_(std::move(b)), c_(std::move(c)) {}

  int dim() const { return static_cast<int>(c_.size()); }
  int num_faces() const { return static_cast<int>(b_.size()); }
  const Matrix& A() const { return A_; }
  const Vector& b() const { return b_; }
  const Vector& c() const { return c_; }

  // Face residuals A p + b; inside iff all entries >= 0.
  Vector residuals(const Vector& p) const;
  bool contains(const Vector& p, double tol = 1e-12) const;

  // All vertices, from feasibility-checked basic solutions of d-row
  // subsystems. Order is deterministic (subset enumeration order), duplicates
  // from degenerate vertices are merged.
  std::vector<Vector> vertices() const;

 private:
  Matrix A_;
  Vector b_;
  Vector c_;
};

// Membership in the uniformly scaled set O(alpha): true iff
// A p + b + alpha (A c + b) >= 0. alpha = 0 is the base body, alpha = -1 the
// singleton {c}. Throws std::invalid_argument for alpha < -1 (outside the
// scaling domain).
bool scaled_membership(const ConvexPolytope& poly, const Vector& p,
                       double alpha);

// Rigid transform p -> R p + l. R must be orthonormal with det +1
// (both within 1e-12).
struct RigidTransform {
  Vector translation;
  Matrix rotation;

  RigidTransform(Vector l, Matrix R);
  RigidTransform inverse() const;
};

// Image of `poly` under `pose`: A' = A R^T, b' = b - A R^T l, c' = R c + l.
ConvexPolytope transform_polytope(const ConvexPolytope& poly,
                                  const RigidTransform& pose);

// Data of the signed-distance LP for an (ego, obstacle) pair:
//
//   min  alpha   s.t.  A_sd w + b_sd >= 0,   w = (p, alpha) in R^{d+1},
//
// with the ego rows [A_1 | A_1 c_1 + b_1] stacked above the obstacle rows.
// The objective vector is implicitly (0, ..., 0, 1).
struct SdLP {
  Matrix A;  // m1 + m2 rows, d + 1 columns
  Vector b;
  int m1 = 0;  // ego row count
  int m2 = 0;  // obstacle row count
  int d = 0;

  int rows() const { return m1 + m2; }
};

SdLP build_sdlp(const ConvexPolytope& ego, const ConvexPolytope& obstacle);

// Pose of a rigid body: translation plus 1 (2D) or 3 (3D, roll-pitch-yaw with
// R = Rz Ry Rx) rotation coordinates. The flattened order used throughout is
// (translation..., angles...), giving 3 coordinates in 2D and 6 in 3D.
struct Pose {
  Vector translation;
  Vector angles;

  Pose() = default;
  Pose(Vector l, Vector a);
  static Pose from_flat(const Vector& coords, int d);

  int dim() const { return static_cast<int>(translation.size()); }
  int num_angles() const { return static_cast<int>(angles.size()); }
  int num_coords() const { return dim() + num_angles(); }
  Vector flat() const;
};

Matrix rotation_matrix(const Vector& angles, int d);
// Partial derivative of the rotation matrix with respect to each angle.
std::vector<Matrix> rotation_derivatives(const Vector& angles, int d);
RigidTransform pose_transform(const Pose& pose);

// Wrap an angle to (-pi, pi].
double wrap_angle(double theta);

// --- Shape library ---------------------------------------------------------

// Axis-aligned w-by-h rectangle centered on the origin.
ConvexPolytope make_rectangle(double w, double h);
// Regular n-gon with circumradius r, first vertex at angle 0.
ConvexPolytope make_regular_polygon(int n, double r);
// L-shaped body as two overlapping axis-aligned rectangles inside the
// bounding box [-w/2, w/2] x [-h/2, h/2]: a vertical arm of thickness t1 on
// the left and a horizontal arm of thickness t2 along the bottom. Both parts
// are expressed in the same body frame.
std::vector<ConvexPolytope> make_l_shape(double w, double h, double t1,
                                         double t2);
// Regular tetrahedron with the given edge length, centered on the origin.
ConvexPolytope make_tetrahedron(double edge);
// Random convex polygon with exactly n vertices: n polar samples
// (angle ~ U[0, 2pi), radius ~ U[0.5, 1.5]) redrawn until their hull keeps
// all n points. Deterministic for a fixed seed.
ConvexPolytope make_random_convex(std::uint64_t seed, int n);

// Translate a body-frame polytope by `offset` (no rotation).
ConvexPolytope translate_polytope(const ConvexPolytope& poly,
                                  const Vector& offset);

// Uniformly scale a polytope about its interior point c by factor s > 0.
ConvexPolytope scale_polytope(const ConvexPolytope& poly, double s);

}  // namespace polyplan
