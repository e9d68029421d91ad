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

#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace polyplan {
namespace {

using Point2 = Eigen::Vector2d;

// 2D outline of a polytope: its vertices (xy projection in 3D) ordered
// counter-clockwise around their centroid.
std::vector<Point2> outline(const ConvexPolytope& poly) {
  std::vector<Point2> pts;
  for (const Vector& v : poly.vertices()) pts.emplace_back(v(0), v(1));
  if (poly.dim() == 3) {
    // Keep only hull points of the projection.
    std::vector<Point2> uniq;
    for (const auto& p : pts) {
      bool dup = false;
      for (const auto& q : uniq)
        if ((p - q).norm() < 1e-9) dup = true;
      if (!dup) uniq.push_back(p);
    }
    pts = std::move(uniq);
  }
  Point2 centroid = Point2::Zero();
  for (const auto& p : pts) centroid += p;
  centroid /= std::max<size_t>(1, pts.size());
  std::sort(pts.begin(), pts.end(), [&](const Point2& a, const Point2& b) {
    return std::atan2(a.y() - centroid.y(), a.x() - centroid.x()) <
           std::atan2(b.y() - centroid.y(), b.x() - centroid.x());
  });
  if (poly.dim() == 3) {
    // Drop interior points of the projection so the outline is convex.
    std::vector<Point2> hull;
    for (const auto& p : pts) {
      while (hull.size() >= 2) {
        const Point2 a = hull[hull.size() - 2], b = hull.back();
        if ((b.x() - a.x()) * (p.y() - a.y()) -
                (b.y() - a.y()) * (p.x() - a.x()) <=
            1e-12)
          hull.pop_back();
        else
          break;
      }
      hull.push_back(p);
    }
    if (hull.size() >= 3) pts = std::move(hull);
  }
  return pts;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

std::string render_svg(const SolveReport& report) {
  const TrajectoryProblem& prob = report.problem;

  std::vector<std::vector<Point2>> obstacle_polys;
  for (const auto& obs : prob.obstacles) obstacle_polys.push_back(outline(obs));

  // Ego outlines per timestep.
  std::vector<std::vector<std::vector<Point2>>> ego_polys(report.states.size());
  for (size_t t = 0; t < report.states.size(); ++t) {
    const RigidState st = RigidState::from_stacked(report.states[t], prob.d);
    const RigidTransform tf = pose_transform(st.rigid_pose());
    for (const auto& part : prob.ego_parts)
      ego_polys[t].push_back(outline(transform_polytope(part, tf)));
  }

  double min_x = report.problem.goal_pose(0), max_x = min_x;
  double min_y = report.problem.goal_pose(1), max_y = min_y;
  auto grow = [&](const Point2& p) {
    min_x = std::min(min_x, p.x());
    max_x = std::max(max_x, p.x());
    min_y = std::min(min_y, p.y());
    max_y = std::max(max_y, p.y());
  };
  for (const auto& poly : obstacle_polys)
    for (const auto& p : poly) grow(p);
  for (const auto& per_t : ego_polys)
    for (const auto& poly : per_t)
      for (const auto& p : poly) grow(p);

  const double margin = 0.12 * std::max({max_x - min_x, max_y - min_y, 1.0});
  min_x -= margin;
  max_x += margin;
  min_y -= margin;
  max_y += margin;
  const double scale = 640.0 / std::max(max_x - min_x, 1e-9);
  const double width = 640.0;
  const double height = scale * (max_y - min_y);

  auto sx = [&](double x) { return (x - min_x) * scale; };
  auto sy = [&](double y) { return (max_y - y) * scale; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width)
      << ' ' << fmt(height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  auto emit_poly = [&](const std::vector<Point2>& pts, const char* style) {
    out << "<polygon points=\"";
    for (size_t i = 0; i < pts.size(); ++i) {
      if (i) out << ' ';
      out << fmt(sx(pts[i].x())) << ',' << fmt(sy(pts[i].y()));
    }
    out << "\" " << style << "/>\n";
  };

  for (const auto& poly : obstacle_polys)
    emit_poly(poly,
              "fill=\"#c8c8c8\" stroke=\"#555555\" stroke-width=\"1.2\"");

  const size_t last = ego_polys.empty() ? 0 : ego_polys.size() - 1;
  for (size_t t = 0; t < ego_polys.size(); ++t) {
    const bool final_step = t == last;
    const char* style =
        final_step
            ? "fill=\"#1f77b4\" fill-opacity=\"0.25\" stroke=\"#1f77b4\" "
              "stroke-width=\"2.5\""
            : "fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" "
              "stroke-dasharray=\"4 3\" stroke-opacity=\"0.7\"";
    for (const auto& poly : ego_polys[t]) emit_poly(poly, style);
  }

  // Goal marker: a red cross.
  const double gx = sx(prob.goal_pose(0)), gy = sy(prob.goal_pose(1));
  const double r = 6.0;
  out << "<line x1=\"" << fmt(gx - r) << "\" y1=\"" << fmt(gy - r)
      << "\" x2=\"" << fmt(gx + r) << "\" y2=\"" << fmt(gy + r)
      << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
  out << "<line x1=\"" << fmt(gx - r) << "\" y1=\"" << fmt(gy + r)
      << "\" x2=\"" << fmt(gx + r) << "\" y2=\"" << fmt(gy - r)
      << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace polyplan
