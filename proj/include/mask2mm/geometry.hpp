// Copyright 2026 The mask2mm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "mask2mm/error.hpp"

namespace mask2mm {

// Image coordinates are y-down throughout: x grows right, y grows down.

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }

// Axis-aligned box, (x1, y1) top-left, (x2, y2) bottom-right.
struct Box {
  double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;
  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }
};

// A polygon annotation; implicitly closed (last vertex connects to first).
struct PolygonMask {
  std::vector<Point> vertices;
};

// Exact extremes of the vertex set.
Box bbox_of(const PolygonMask& mask);
Box bbox_of(const std::vector<PolygonMask>& parts);

// Signed shoelace area in y-down coordinates. Positive for the
// TL->TR->BR->BL traversal of an upright rectangle.
double signed_area(const PolygonMask& mask);

// A line in normal form: x*cos(theta) + y*sin(theta) = rho.
// Canonical representative has theta in [0, pi); (rho, theta) and
// (-rho, theta +/- pi) denote the same line.
struct PolarLine {
  double rho = 0.0;
  double theta = 0.0;

  static PolarLine make(double rho, double theta);
};

// Signed distance of point to line: x*cos(theta) + y*sin(theta) - rho.
double line_eval(const PolarLine& line, Point p);

// Intersection point of two non-parallel lines.
// Throws kNoIntersection when |sin(theta1 - theta2)| <= 1e-9.
Point intersect(const PolarLine& a, const PolarLine& b);

// 3x3 projective transform, row-major, normalized so m[8] == 1.
class Homography {
 public:
  Homography() = default;  // identity

  static Homography identity();
  static Homography from_row_major(const std::array<double, 9>& m);
  static Homography translation(double tx, double ty);
  static Homography scaling(double sx, double sy);

  Homography inverse() const;
  Homography compose(const Homography& rhs) const;  // this after rhs

  Point apply(Point p) const;
  Point apply_inverse(Point p) const;

  double at(int row, int col) const { return m_[row * 3 + col]; }
  const std::array<double, 9>& row_major() const { return m_; }

 private:
  std::array<double, 9> m_{1, 0, 0, 0, 1, 0, 0, 0, 1};
};

// Convex quadrilateral with corners ordered top-left, top-right,
// bottom-right, bottom-left.
struct Quadrilateral {
  std::array<Point, 4> corners;

  // Validates strict convexity, positive area, and cyclic corner order.
  // Throws kDegenerateQuad otherwise.
  static Quadrilateral make(Point tl, Point tr, Point br, Point bl);
};

// DLT from the 4 correspondences quad -> (0,0),(W,0),(W,H),(0,H).
Homography homography_from_quad(const Quadrilateral& src, double dst_width,
                                double dst_height);

// Vertex-wise application; vertex count preserved.
PolygonMask warp_polygon(const Homography& h, const PolygonMask& mask);

}  // namespace mask2mm
