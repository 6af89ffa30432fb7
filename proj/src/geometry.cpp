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
#include "mask2mm/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

namespace mask2mm {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_point(Point p) {
  std::ostringstream os;
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

}  // namespace

Box bbox_of(const PolygonMask& mask) {
  Box b{std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity()};
  for (const Point& v : mask.vertices) {
    b.x1 = std::min(b.x1, v.x);
    b.y1 = std::min(b.y1, v.y);
    b.x2 = std::max(b.x2, v.x);
    b.y2 = std::max(b.y2, v.y);
  }
  return b;
}

Box bbox_of(const std::vector<PolygonMask>& parts) {
  Box b{std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity()};
  for (const PolygonMask& part : parts) {
    Box pb = bbox_of(part);
    b.x1 = std::min(b.x1, pb.x1);
    b.y1 = std::min(b.y1, pb.y1);
    b.x2 = std::max(b.x2, pb.x2);
    b.y2 = std::max(b.y2, pb.y2);
  }
  return b;
}

double signed_area(const PolygonMask& mask) {
  const auto& v = mask.vertices;
  const std::size_t n = v.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    sum += a.x * b.y - b.x * a.y;
  }
  return 0.5 * sum;
}

PolarLine PolarLine::make(double rho, double theta) {
  if (!std::isfinite(rho) || !std::isfinite(theta)) {
    throw Error(ErrorKind::kValidation, "non-finite polar line parameters");
  }
  // Shifting theta by pi flips the normal, so rho changes sign per shift.
  long long k = static_cast<long long>(std::floor(theta / kPi));
  double t = theta - static_cast<double>(k) * kPi;
  double r = (k & 1LL) ? -rho : rho;
  if (t >= kPi) {  // rounding guard
    t -= kPi;
    r = -r;
  }
  if (t < 0.0) {
    t += kPi;
    r = -r;
  }
  return PolarLine{r, t};
}

double line_eval(const PolarLine& line, Point p) {
  return p.x * std::cos(line.theta) + p.y * std::sin(line.theta) - line.rho;
}

Point intersect(const PolarLine& a, const PolarLine& b) {
  const double det = std::sin(b.theta - a.theta);
  if (std::abs(det) <= 1e-9) {
    std::ostringstream os;
    os << "near-parallel lines, |sin(dtheta)| = " << std::abs(det);
    throw Error(ErrorKind::kNoIntersection, os.str());
  }
  const double c1 = std::cos(a.theta), s1 = std::sin(a.theta);
  const double c2 = std::cos(b.theta), s2 = std::sin(b.theta);
  return Point{(a.rho * s2 - b.rho * s1) / det, (b.rho * c1 - a.rho * c2) / det};
}

Homography Homography::identity() { return Homography(); }

Homography Homography::from_row_major(const std::array<double, 9>& m) {
  for (double v : m) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kValidation, "non-finite homography entry");
    }
  }
  if (std::abs(m[8]) <= 1e-12) {
    throw Error(ErrorKind::kValidation,
                "homography cannot be normalized: |h33| <= 1e-12");
  }
  Homography h;
  for (int i = 0; i < 9; ++i) h.m_[i] = m[i] / m[8];
  const auto& a = h.m_;
  const double det = a[0] * (a[4] * a[8] - a[5] * a[7]) -
                     a[1] * (a[3] * a[8] - a[5] * a[6]) +
                     a[2] * (a[3] * a[7] - a[4] * a[6]);
  if (std::abs(det) <= 1e-12) {
    throw Error(ErrorKind::kValidation, "singular homography");
  }
  return h;
}

Homography Homography::translation(double tx, double ty) {
  return from_row_major({1, 0, tx, 0, 1, ty, 0, 0, 1});
}

Homography Homography::scaling(double sx, double sy) {
  return from_row_major({sx, 0, 0, 0, sy, 0, 0, 0, 1});
}

Homography Homography::inverse() const {
  const auto& a = m_;
  std::array<double, 9> adj;
  adj[0] = a[4] * a[8] - a[5] * a[7];
  adj[1] = a[2] * a[7] - a[1] * a[8];
  adj[2] = a[1] * a[5] - a[2] * a[4];
  adj[3] = a[5] * a[6] - a[3] * a[8];
  adj[4] = a[0] * a[8] - a[2] * a[6];
  adj[5] = a[2] * a[3] - a[0] * a[5];
  adj[6] = a[3] * a[7] - a[4] * a[6];
  adj[7] = a[1] * a[6] - a[0] * a[7];
  adj[8] = a[0] * a[4] - a[1] * a[3];
  return from_row_major(adj);
}

Homography Homography::compose(const Homography& rhs) const {
  std::array<double, 9> out{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += m_[i * 3 + k] * rhs.m_[k * 3 + j];
      out[i * 3 + j] = s;
    }
  }
  return from_row_major(out);
}

Point Homography::apply(Point p) const {
  const double w = m_[6] * p.x + m_[7] * p.y + m_[8];
  if (std::abs(w) <= 1e-12) {
    throw Error(ErrorKind::kProjection,
                "point maps to infinity: " + format_point(p));
  }
  return Point{(m_[0] * p.x + m_[1] * p.y + m_[2]) / w,
               (m_[3] * p.x + m_[4] * p.y + m_[5]) / w};
}

Point Homography::apply_inverse(Point p) const { return inverse().apply(p); }

Quadrilateral Quadrilateral::make(Point tl, Point tr, Point br, Point bl) {
  Quadrilateral q{{tl, tr, br, bl}};
  for (const Point& c : q.corners) {
    if (!std::isfinite(c.x) || !std::isfinite(c.y)) {
      throw Error(ErrorKind::kDegenerateQuad, "non-finite quad corner");
    }
  }
  PolygonMask poly{{tl, tr, br, bl}};
  const double area = signed_area(poly);
  if (!(area > 0.0)) {
    throw Error(ErrorKind::kDegenerateQuad,
                "quad has non-positive area in TL/TR/BR/BL order");
  }
  for (int i = 0; i < 4; ++i) {
    const Point& a = q.corners[i];
    const Point& b = q.corners[(i + 1) % 4];
    const Point& c = q.corners[(i + 2) % 4];
    if (!(cross(b - a, c - b) > 0.0)) {
      throw Error(ErrorKind::kDegenerateQuad, "quad is not strictly convex");
    }
  }
  // Corner angular order about the centroid must match the given order.
  Point centroid = 0.25 * (tl + tr + br + bl);
  std::array<double, 4> ang;
  for (int i = 0; i < 4; ++i) {
    Point d = q.corners[i] - centroid;
    ang[i] = std::atan2(d.y, d.x);
  }
  int wraps = 0;
  for (int i = 0; i < 4; ++i) {
    if (ang[(i + 1) % 4] <= ang[i]) ++wraps;
  }
  if (wraps != 1) {
    throw Error(ErrorKind::kDegenerateQuad, "quad corners out of cyclic order");
  }
  return q;
}

namespace {

// Solves the 8x8 system by Gaussian elimination with partial pivoting.
std::array<double, 8> solve8(std::array<std::array<double, 9>, 8>& a) {
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-10) {
      throw Error(ErrorKind::kDegenerateQuad,
                  "singular correspondence system");
    }
    std::swap(a[col], a[pivot]);
    for (int r = col + 1; r < 8; ++r) {
      const double f = a[r][col] / a[col][col];
      for (int c = col; c < 9; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::array<double, 8> x{};
  for (int r = 7; r >= 0; --r) {
    double s = a[r][8];
    for (int c = r + 1; c < 8; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

}  // namespace

Homography homography_from_quad(const Quadrilateral& src, double dst_width,
                                double dst_height) {
  if (!(dst_width > 0.0) || !(dst_height > 0.0)) {
    throw Error(ErrorKind::kValidation, "destination size must be positive");
  }
  // Condition the solve: move the source centroid to the origin and scale
  // the mean corner distance to sqrt(2), then undo the transform after.
  Point centroid =
      0.25 * (src.corners[0] + src.corners[1] + src.corners[2] + src.corners[3]);
  double mean_dist = 0.0;
  for (const Point& c : src.corners) mean_dist += norm(c - centroid);
  mean_dist *= 0.25;
  const double s = mean_dist > 1e-12 ? std::sqrt(2.0) / mean_dist : 1.0;

  std::array<Point, 4> sn;
  for (int i = 0; i < 4; ++i) sn[i] = s * (src.corners[i] - centroid);
  const std::array<Point, 4> dst{Point{0, 0}, Point{dst_width, 0},
                                 Point{dst_width, dst_height},
                                 Point{0, dst_height}};

  std::array<std::array<double, 9>, 8> a{};
  for (int i = 0; i < 4; ++i) {
    const double x = sn[i].x, y = sn[i].y;
    const double u = dst[i].x, v = dst[i].y;
    a[2 * i] = {x, y, 1, 0, 0, 0, -u * x, -u * y, u};
    a[2 * i + 1] = {0, 0, 0, x, y, 1, -v * x, -v * y, v};
  }
  const std::array<double, 8> h = solve8(a);
  Homography hn = Homography::from_row_major(
      {h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], 1.0});
  Homography norm_src = Homography::from_row_major(
      {s, 0, -s * centroid.x, 0, s, -s * centroid.y, 0, 0, 1});
  return hn.compose(norm_src);
}

PolygonMask warp_polygon(const Homography& h, const PolygonMask& mask) {
  PolygonMask out;
  out.vertices.reserve(mask.vertices.size());
  for (const Point& v : mask.vertices) out.vertices.push_back(h.apply(v));
  return out;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kNoIntersection: return "no_intersection";
    case ErrorKind::kDegenerateQuad: return "degenerate_quad";
    case ErrorKind::kProjection: return "projection";
    case ErrorKind::kInsufficientBricks: return "insufficient_bricks";
    case ErrorKind::kInsufficientLines: return "insufficient_lines";
    case ErrorKind::kNoAnchorBricks: return "no_anchor_bricks";
    case ErrorKind::kScaleMismatch: return "scale_mismatch";
    case ErrorKind::kNoCracks: return "no_cracks";
    case ErrorKind::kDivisionByZero: return "division_by_zero";
    case ErrorKind::kAlignment: return "alignment";
    case ErrorKind::kOutOfBounds: return "out_of_bounds";
  }
  return "unknown";
}

}  // namespace mask2mm
