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

#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rng.hpp"

namespace polyplan {
namespace {

constexpr double kOrthoTol = 1e-12;
constexpr double kRayTol = 1e-10;

// Iterates k-subsets of {0, ..., m-1} in lexicographic order.
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

// A polyhedron {A v >= 0} is unbounded iff its recession cone contains a
// nonzero ray. Rank deficiency of A gives a full line; otherwise any extreme
// ray has d-1 linearly independent active rows, so scanning the null
// directions of all (d-1)-row subsystems is exhaustive.
bool has_nontrivial_recession(const Matrix& A) {
  const int d = static_cast<int>(A.cols());
  const int m = static_cast<int>(A.rows());

  Eigen::FullPivLU<Matrix> full(A);
  full.setThreshold(1e-10);
  if (full.rank() < d) return true;

  std::vector<int> idx(d - 1);
  for (int i = 0; i < d - 1; ++i) idx[i] = i;
  do {
    Matrix sub(d - 1, d);
    for (int i = 0; i < d - 1; ++i) sub.row(i) = A.row(idx[i]);
    Eigen::FullPivLU<Matrix> lu(sub);
    lu.setThreshold(1e-10);
    if (lu.rank() < d - 1) continue;
    Matrix kernel = lu.kernel();
    for (int k = 0; k < kernel.cols(); ++k) {
      Vector v = kernel.col(k);
      const double vn = v.norm();
      if (vn < 1e-14) continue;
      v /= vn;
      for (double sign : {1.0, -1.0}) {
        bool ray = true;
        for (int r = 0; r < m; ++r) {
          if (sign * A.row(r).dot(v) < -kRayTol * std::max(1.0, A.row(r).norm())) {
            ray = false;
            break;
          }
        }
        if (ray) return true;
      }
    }
  } while (next_combination(idx, m));
  return false;
}

}  // namespace

ConvexPolytope::ConvexPolytope(Matrix A, Vector b, Vector c)
    : A_(std::move(A)), b_(std::move(b)), c_(std::move(c)) {
  const int d = static_cast<int>(c_.size());
  const int m = static_cast<int>(b_.size());
  if (d != 2 && d != 3)
    throw std::invalid_argument("polytope dimension must be 2 or 3");
  if (A_.rows() != m || A_.cols() != d)
    throw std::invalid_argument("polytope A/b/c sizes are inconsistent");
  if (m < d + 1)
    throw std::invalid_argument(
        "a bounded full-dimensional polytope needs at least d+1 faces");
  const Vector r = A_ * c_ + b_;
  for (int i = 0; i < m; ++i) {
    const double scale = std::max(1.0, A_.row(i).norm());
    if (!(r(i) > 1e-12 * scale))
      throw std::invalid_argument("interior point c is not strictly interior");
  }
  if (has_nontrivial_recession(A_))
    throw std::invalid_argument("polytope is unbounded");
}

Vector ConvexPolytope::residuals(const Vector& p) const {
  if (p.size() != dim()) throw DimensionError("point dimension mismatch");
  return A_ * p + b_;
}

bool ConvexPolytope::contains(const Vector& p, double tol) const {
  return residuals(p).minCoeff() >= -tol;
}

std::vector<Vector> ConvexPolytope::vertices() const {
  const int d = dim();
  const int m = num_faces();
  std::vector<Vector> verts;
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;
  Matrix sub(d, d);
  Vector rhs(d);
  do {
    for (int i = 0; i < d; ++i) {
      sub.row(i) = A_.row(idx[i]);
      rhs(i) = -b_(idx[i]);
    }
    Eigen::FullPivLU<Matrix> lu(sub);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) continue;
    const Vector p = lu.solve(rhs);
    if (!contains(p, 1e-9 * std::max(1.0, p.norm()))) continue;
    bool known = false;
    for (const Vector& q : verts) {
      if ((q - p).norm() <= 1e-9 * std::max(1.0, p.norm())) {
        known = true;
        break;
      }
    }
    if (!known) verts.push_back(p);
  } while (next_combination(idx, m));
  return verts;
}

bool scaled_membership(const ConvexPolytope& poly, const Vector& p,
                       double alpha) {
  if (alpha < -1.0)
    throw std::invalid_argument("scaling parameter alpha must be >= -1");
  if (p.size() != poly.dim()) throw DimensionError("point dimension mismatch");
  const Vector r =
      poly.A() * p + poly.b() + alpha * (poly.A() * poly.c() + poly.b());
  return r.minCoeff() >= 0.0;
}

RigidTransform::RigidTransform(Vector l, Matrix R)
    : translation(std::move(l)), rotation(std::move(R)) {
  const int d = static_cast<int>(translation.size());
  if (rotation.rows() != d || rotation.cols() != d)
    throw std::invalid_argument("rotation/translation sizes mismatch");
  const Matrix err = rotation.transpose() * rotation - Matrix::Identity(d, d);
  if (err.cwiseAbs().maxCoeff() > kOrthoTol)
    throw std::invalid_argument("rotation matrix is not orthonormal");
  if (std::abs(rotation.determinant() - 1.0) > kOrthoTol)
    throw std::invalid_argument("rotation matrix must have determinant +1");
}

RigidTransform RigidTransform::inverse() const {
  return RigidTransform(-(rotation.transpose() * translation),
                        rotation.transpose());
}

ConvexPolytope transform_polytope(const ConvexPolytope& poly,
                                  const RigidTransform& pose) {
  if (pose.translation.size() != poly.dim())
    throw DimensionError("transform dimension mismatch");
  const Matrix ART = poly.A() * pose.rotation.transpose();
  return ConvexPolytope(ConvexPolytope::Unchecked{}, ART,
                        poly.b() - ART * pose.translation,
                        pose.rotation * poly.c() + pose.translation);
}

SdLP build_sdlp(const ConvexPolytope& ego, const ConvexPolytope& obstacle) {
  if (ego.dim() != obstacle.dim())
    throw DimensionError("ego and obstacle dimensions differ");
  const int d = ego.dim();
  const int m1 = ego.num_faces();
  const int m2 = obstacle.num_faces();
  SdLP lp;
  lp.d = d;
  lp.m1 = m1;
  lp.m2 = m2;
  lp.A.resize(m1 + m2, d + 1);
  lp.b.resize(m1 + m2);
  lp.A.topLeftCorner(m1, d) = ego.A();
  lp.A.topRightCorner(m1, 1) = ego.A() * ego.c() + ego.b();
  lp.b.head(m1) = ego.b();
  lp.A.bottomLeftCorner(m2, d) = obstacle.A();
  lp.A.bottomRightCorner(m2, 1) = obstacle.A() * obstacle.c() + obstacle.b();
  lp.b.tail(m2) = obstacle.b();
  return lp;
}

Pose::Pose(Vector l, Vector a) : translation(std::move(l)), angles(std::move(a)) {
  const int d = dim();
  if (d != 2 && d != 3) throw std::invalid_argument("pose dimension must be 2 or 3");
  if (num_angles() != (d == 2 ? 1 : 3))
    throw std::invalid_argument("pose angle count mismatch");
}

Pose Pose::from_flat(const Vector& coords, int d) {
  const int na = d == 2 ? 1 : 3;
  if (coords.size() != d + na)
    throw std::invalid_argument("flattened pose has wrong size");
  return Pose(coords.head(d), coords.tail(na));
}

Vector Pose::flat() const {
  Vector out(num_coords());
  out.head(dim()) = translation;
  out.tail(num_angles()) = angles;
  return out;
}

Matrix rotation_matrix(const Vector& angles, int d) {
  if (d == 2) {
    const double c = std::cos(angles(0)), s = std::sin(angles(0));
    Matrix R(2, 2);
    R << c, -s, s, c;
    return R;
  }
  const double cr = std::cos(angles(0)), sr = std::sin(angles(0));
  const double cp = std::cos(angles(1)), sp = std::sin(angles(1));
  const double cy = std::cos(angles(2)), sy = std::sin(angles(2));
  Matrix Rx(3, 3), Ry(3, 3), Rz(3, 3);
  Rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
  Ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
  Rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  return Rz * Ry * Rx;
}

std::vector<Matrix> rotation_derivatives(const Vector& angles, int d) {
  std::vector<Matrix> out;
  if (d == 2) {
    const double c = std::cos(angles(0)), s = std::sin(angles(0));
    Matrix dR(2, 2);
    dR << -s, -c, c, -s;
    out.push_back(dR);
    return out;
  }
  const double cr = std::cos(angles(0)), sr = std::sin(angles(0));
  const double cp = std::cos(angles(1)), sp = std::sin(angles(1));
  const double cy = std::cos(angles(2)), sy = std::sin(angles(2));
  Matrix Rx(3, 3), Ry(3, 3), Rz(3, 3);
  Rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
  Ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
  Rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  Matrix dRx(3, 3), dRy(3, 3), dRz(3, 3);
  dRx << 0, 0, 0, 0, -sr, -cr, 0, cr, -sr;
  dRy << -sp, 0, cp, 0, 0, 0, -cp, 0, -sp;
  dRz << -sy, -cy, 0, cy, -sy, 0, 0, 0, 0;
  out.push_back(Rz * Ry * dRx);
  out.push_back(Rz * dRy * Rx);
  out.push_back(dRz * Ry * Rx);
  return out;
}

RigidTransform pose_transform(const Pose& pose) {
  return RigidTransform(pose.translation,
                        rotation_matrix(pose.angles, pose.dim()));
}

double wrap_angle(double theta) {
  const double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta + std::numbers::pi, two_pi);
  if (t <= 0.0) t += two_pi;
  return t - std::numbers::pi;
}

ConvexPolytope make_rectangle(double w, double h) {
  if (!(w > 0.0) || !(h > 0.0))
    throw std::invalid_argument("rectangle sides must be positive");
  Matrix A(4, 2);
  Vector b(4);
  A << 1, 0, -1, 0, 0, 1, 0, -1;
  b << w / 2, w / 2, h / 2, h / 2;
  return ConvexPolytope(A, b, Vector::Zero(2));
}

ConvexPolytope make_regular_polygon(int n, double r) {
  if (n < 3) throw std::invalid_argument("polygon needs at least 3 sides");
  if (!(r > 0.0)) throw std::invalid_argument("polygon radius must be positive");
  const double apothem = r * std::cos(std::numbers::pi / n);
  Matrix A(n, 2);
  Vector b(n);
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * (k + 0.5) / n;
    A(k, 0) = -std::cos(theta);
    A(k, 1) = -std::sin(theta);
    b(k) = apothem;
  }
  return ConvexPolytope(A, b, Vector::Zero(2));
}

std::vector<ConvexPolytope> make_l_shape(double w, double h, double t1,
                                         double t2) {
  if (!(w > 0.0) || !(h > 0.0) || !(t1 > 0.0) || !(t2 > 0.0))
    throw std::invalid_argument("L-shape parameters must be positive");
  if (t1 >= w || t2 >= h)
    throw std::invalid_argument("L-shape arm thickness must be below the box");
  Vector arm1_center(2), arm2_center(2);
  arm1_center << -w / 2 + t1 / 2, 0.0;  // vertical arm, full height
  arm2_center << 0.0, -h / 2 + t2 / 2;  // horizontal arm, full width
  return {translate_polytope(make_rectangle(t1, h), arm1_center),
          translate_polytope(make_rectangle(w, t2), arm2_center)};
}

ConvexPolytope make_tetrahedron(double edge) {
  if (!(edge > 0.0)) throw std::invalid_argument("edge length must be positive");
  const double s = edge / (2.0 * std::sqrt(2.0));
  Matrix verts(4, 3);
  verts << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
  verts *= s;
  // Face j lies opposite vertex j; with the centroid at the origin its inward
  // normal is vertex j's direction.
  Matrix A(4, 3);
  Vector b(4);
  for (int j = 0; j < 4; ++j) {
    const Vector n = verts.row(j).normalized();
    A.row(j) = n;
    int other = (j + 1) % 4;
    b(j) = -n.dot(verts.row(other));
  }
  return ConvexPolytope(A, b, Vector::Zero(3));
}

namespace {

// Andrew monotone chain; returns hull vertices in counter-clockwise order.
std::vector<Eigen::Vector2d> convex_hull_2d(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                  const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  const int n = static_cast<int>(pts.size());
  std::vector<Eigen::Vector2d> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-12) --k;
    hull[k++] = pts[i];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-12) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

ConvexPolytope make_random_convex(std::uint64_t seed, int n) {
  if (n < 3) throw std::invalid_argument("random polygon needs n >= 3");
  SplitMix64 rng(seed);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Eigen::Vector2d> pts(n);
    for (int i = 0; i < n; ++i) {
      const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double radius = rng.uniform(0.5, 1.5);
      pts[i] = {radius * std::cos(angle), radius * std::sin(angle)};
    }
    auto hull = convex_hull_2d(pts);
    if (static_cast<int>(hull.size()) != n) continue;
    bool short_edge = false;
    for (size_t i = 0; i < hull.size(); ++i) {
      if ((hull[(i + 1) % hull.size()] - hull[i]).norm() < 1e-3)
        short_edge = true;
    }
    if (short_edge) continue;
    Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
    for (const auto& p : hull) centroid += p;
    centroid /= static_cast<double>(hull.size());
    Matrix A(n, 2);
    Vector b(n);
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2d e = hull[(i + 1) % n] - hull[i];
      Eigen::Vector2d inward(-e.y(), e.x());  // CCW order: left side is inside
      inward.normalize();
      A.row(i) = inward;
      b(i) = -inward.dot(hull[i]);
    }
    Vector c(2);
    c << centroid.x(), centroid.y();
    return ConvexPolytope(A, b, c);
  }
  throw std::runtime_error("random polygon generation failed to converge");
}

ConvexPolytope translate_polytope(const ConvexPolytope& poly,
                                  const Vector& offset) {
  return transform_polytope(
      poly, RigidTransform(offset, Matrix::Identity(poly.dim(), poly.dim())));
}

ConvexPolytope scale_polytope(const ConvexPolytope& poly, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("scale factor must be positive");
  // p -> c + s (p - c): rows become (A/s) p + b + (1 - 1/s) A c >= 0.
  return ConvexPolytope(ConvexPolytope::Unchecked{}, poly.A() / s,
                        poly.b() + (1.0 - 1.0 / s) * (poly.A() * poly.c()),
                        poly.c());
}

}  // namespace polyplan
