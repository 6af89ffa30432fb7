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
#include "mask2mm/synthwall.hpp"

#include <algorithm>
#include <cmath>

namespace mask2mm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// splitmix64 with Box-Muller; kept self-contained so streams are stable
// across standard-library versions.
struct Rng {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  double uniform() {  // [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  double uniform_pos() {  // (0, 1]
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }
  double gaussian() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }
};

Point perp_unit(Point d) {
  const double n = norm(d);
  return Point{-d.y / n, d.x / n};
}

// Thickens a polyline to half-width h: mitered joins, square end caps
// (each end extends h along the segment so the bbox grows by the opening).
PolygonMask thicken_polyline(const std::vector<Point>& line, double h) {
  const std::size_t m = line.size();
  std::vector<Point> anchors(m);
  std::vector<Point> offsets(m);
  for (std::size_t i = 0; i < m; ++i) {
    anchors[i] = line[i];
    if (i == 0) {
      const Point d = line[1] - line[0];
      anchors[i] = line[0] - (h / norm(d)) * d;
      offsets[i] = h * perp_unit(d);
    } else if (i == m - 1) {
      const Point d = line[m - 1] - line[m - 2];
      anchors[i] = line[m - 1] + (h / norm(d)) * d;
      offsets[i] = h * perp_unit(d);
    } else {
      const Point n0 = perp_unit(line[i] - line[i - 1]);
      const Point n1 = perp_unit(line[i + 1] - line[i]);
      Point miter = n0 + n1;
      const double len = norm(miter);
      if (len < 1e-9) {  // U-turn; fall back to the incoming normal
        offsets[i] = h * n0;
        continue;
      }
      miter = (1.0 / len) * miter;
      const double scale = std::min(h / dot(miter, n1), 4.0 * h);
      offsets[i] = scale * miter;
    }
  }
  PolygonMask poly;
  poly.vertices.reserve(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    poly.vertices.push_back(anchors[i] + offsets[i]);
  }
  for (std::size_t i = m; i-- > 0;) {
    poly.vertices.push_back(anchors[i] - offsets[i]);
  }
  return poly;
}

bool point_in_polygon(Point p, const PolygonMask& poly) {
  bool inside = false;
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    if ((a.y > p.y) == (b.y > p.y)) continue;
    const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
    if (x > p.x) inside = !inside;
  }
  return inside;
}

bool segments_cross(Point a, Point b, Point c, Point d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool polygons_touch(const PolygonMask& a, const PolygonMask& b) {
  for (const Point& p : a.vertices) {
    if (point_in_polygon(p, b)) return true;
  }
  for (const Point& p : b.vertices) {
    if (point_in_polygon(p, a)) return true;
  }
  const std::size_t na = a.vertices.size(), nb = b.vertices.size();
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      if (segments_cross(a.vertices[i], a.vertices[(i + 1) % na],
                         b.vertices[j], b.vertices[(j + 1) % nb])) {
        return true;
      }
    }
  }
  return false;
}

// Horizontal slice of the polygon at level y: leftmost-to-rightmost extent
// over all edge crossings.
double slice_extent(const PolygonMask& poly, double y) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  int crossings = 0;
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    if ((a.y > y) == (b.y > y)) continue;
    const double x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
    ++crossings;
  }
  return crossings >= 2 ? hi - lo : 0.0;
}

// The extent is convex between adjacent vertex levels, so its maximum sits
// at a vertex level; sampling both sides dodges horizontal-edge cases.
double max_transverse_extent(const PolygonMask& poly) {
  const Box b = bbox_of(poly);
  const double eps = 1e-7 * (b.height() + 1.0);
  double best = 0.0;
  for (const Point& v : poly.vertices) {
    best = std::max(best, slice_extent(poly, v.y - eps));
    best = std::max(best, slice_extent(poly, v.y + eps));
  }
  return best;
}

PolygonMask rect_polygon(double x0, double y0, double x1, double y1) {
  return PolygonMask{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

}  // namespace

void WallSpec::validate() const {
  brick.validate();
  if (mortar_mm < 0.0 || rows < 1 || cols < 1 || !(mm_per_px > 0.0) ||
      jitter_sigma_px < 0.0) {
    throw Error(ErrorKind::kValidation, "bad wall spec");
  }
  if (crack) {
    if (crack->polyline_mm.size() < 2 || !(crack->opening_mm > 0.0)) {
      throw Error(ErrorKind::kValidation,
                  "crack needs >= 2 polyline points and a positive opening");
    }
  }
}

SynthResult generate(const WallSpec& spec) {
  spec.validate();
  const double unit_w = spec.brick.face_width_mm + spec.mortar_mm;
  const double unit_h = spec.brick.face_height_mm + spec.mortar_mm;
  const double wall_w = spec.cols * spec.brick.face_width_mm +
                        (spec.cols - 1) * spec.mortar_mm;
  const double wall_h = spec.rows * spec.brick.face_height_mm +
                        (spec.rows - 1) * spec.mortar_mm;

  std::optional<PolygonMask> crack_mm;
  if (spec.crack) {
    crack_mm = thicken_polyline(spec.crack->polyline_mm,
                                0.5 * spec.crack->opening_mm);
    const Box cb = bbox_of(*crack_mm);
    if (cb.x1 < 0.0 || cb.y1 < 0.0 || cb.x2 > wall_w || cb.y2 > wall_h) {
      throw Error(ErrorKind::kOutOfBounds, "crack exits the wall extents");
    }
  }

  struct Piece {
    ClassLabel label;
    PolygonMask poly_mm;
  };
  std::vector<Piece> pieces;
  for (int r = 0; r < spec.rows; ++r) {
    const double y0 = r * unit_h;
    const bool offset_row = r % 2 == 1;
    const int n = offset_row ? spec.cols - 1 : spec.cols;
    for (int c = 0; c < n; ++c) {
      const double x0 = (offset_row ? c + 0.5 : c) * unit_w;
      PolygonMask rect =
          rect_polygon(x0, y0, x0 + spec.brick.face_width_mm,
                       y0 + spec.brick.face_height_mm);
      ClassLabel label = ClassLabel::kBrick;
      if (crack_mm && polygons_touch(rect, *crack_mm)) {
        label = ClassLabel::kBrokenBrick;
      }
      pieces.push_back({label, std::move(rect)});
    }
  }
  if (crack_mm) {
    pieces.push_back({ClassLabel::kCrack, *crack_mm});
  }

  const Homography warp =
      spec.distortion ? *spec.distortion : Homography::identity();

  // Canvas: warped wall rectangle plus a margin absorbing the jitter.
  const double inv = 1.0 / spec.mm_per_px;
  const std::array<Point, 4> rect_px{
      Point{0, 0}, Point{wall_w * inv, 0}, Point{wall_w * inv, wall_h * inv},
      Point{0, wall_h * inv}};
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_x;
  for (const Point& c : rect_px) {
    const Point w = warp.apply(c);
    min_x = std::min(min_x, w.x);
    min_y = std::min(min_y, w.y);
    max_x = std::max(max_x, w.x);
    max_y = std::max(max_y, w.y);
  }
  const double margin = std::ceil(3.0 * spec.jitter_sigma_px) + 2.0;
  const int img_w = static_cast<int>(std::ceil(max_x - min_x + 2.0 * margin));
  const int img_h = static_cast<int>(std::ceil(max_y - min_y + 2.0 * margin));

  Rng rng{spec.seed * 0x2545F4914F6CDD1Dull + 0x9E3779B97F4A7C15ull};
  ImageRecord gt;
  gt.image_id = "synthwall_" + std::to_string(spec.seed);
  gt.width = img_w;
  gt.height = img_h;
  for (const Piece& piece : pieces) {
    PolygonMask poly;
    poly.vertices.reserve(piece.poly_mm.vertices.size());
    for (const Point& v : piece.poly_mm.vertices) {
      Point p = warp.apply(Point{v.x * inv, v.y * inv});
      p.x += -min_x + margin + spec.jitter_sigma_px * rng.gaussian();
      p.y += -min_y + margin + spec.jitter_sigma_px * rng.gaussian();
      p.x = std::clamp(p.x, 0.0, static_cast<double>(img_w));
      p.y = std::clamp(p.y, 0.0, static_cast<double>(img_h));
      poly.vertices.push_back(p);
    }
    gt.instances.push_back(make_instance(piece.label, {std::move(poly)},
                                         std::nullopt, img_w, img_h,
                                         gt.image_id));
  }

  SynthResult result;
  result.predictions = gt;
  for (Instance& inst : result.predictions.instances) inst.score = 1.0;
  result.ground_truth = std::move(gt);

  result.truth.distortion = warp;
  result.truth.mm_per_px_x = spec.mm_per_px;
  result.truth.mm_per_px_y = spec.mm_per_px;
  if (crack_mm) {
    const Box cb = bbox_of(*crack_mm);
    CrackTruth ct;
    ct.total_width_mm = cb.width();
    ct.total_height_mm = cb.height();
    ct.max_transverse_width_mm = max_transverse_extent(*crack_mm);
    result.truth.crack = ct;
  }
  return result;
}

double OracleDeltas::worst_crack_delta() const {
  return std::max({total_width, total_height, max_transverse});
}

bool OracleDeltas::pass(double crack_tolerance) const {
  return worst_crack_delta() <= crack_tolerance;
}

OracleDeltas oracle_check(const WallTruth& truth, const PixelScale& scale,
                          const CrackMeasurement& measurement) {
  auto rel = [](double measured, double expected) {
    return std::abs(measured - expected) / expected;
  };
  OracleDeltas d;
  d.scale_x = rel(scale.mm_per_px_x, truth.mm_per_px_x);
  d.scale_y = rel(scale.mm_per_px_y, truth.mm_per_px_y);
  if (truth.crack) {
    d.total_width =
        rel(measurement.total_width_mm_exact, truth.crack->total_width_mm);
    d.total_height =
        rel(measurement.total_height_mm_exact, truth.crack->total_height_mm);
    d.max_transverse = rel(measurement.max_transverse_width_mm_exact,
                           truth.crack->max_transverse_width_mm);
  }
  return d;
}

Homography random_perspective(double width, double height, double max_frac,
                              std::uint64_t seed) {
  Rng rng{seed * 0xD1342543DE82EF95ull + 0x9E3779B97F4A7C15ull};
  const std::array<Point, 4> base{Point{0, 0}, Point{width, 0},
                                  Point{width, height}, Point{0, height}};
  const double radius = max_frac * std::min(width, height);
  for (int attempt = 0; attempt < 256; ++attempt) {
    std::array<Point, 4> moved;
    for (int i = 0; i < 4; ++i) {
      const double r = radius * rng.uniform();
      const double a = kTwoPi * rng.uniform();
      moved[i] = base[i] + Point{r * std::cos(a), r * std::sin(a)};
    }
    try {
      const Quadrilateral quad =
          Quadrilateral::make(moved[0], moved[1], moved[2], moved[3]);
      return homography_from_quad(quad, width, height).inverse();
    } catch (const Error&) {
      continue;
    }
  }
  throw Error(ErrorKind::kValidation,
              "could not draw a convex displaced quad");
}

WallSpec wall_spec_from_json(const nlohmann::json& doc) {
  WallSpec spec;
  try {
    if (doc.contains("brick")) {
      spec.brick.face_width_mm = doc.at("brick").at("face_width_mm");
      spec.brick.face_height_mm = doc.at("brick").at("face_height_mm");
    }
    spec.mortar_mm = doc.value("mortar_mm", spec.mortar_mm);
    spec.rows = doc.value("rows", spec.rows);
    spec.cols = doc.value("cols", spec.cols);
    if (doc.value("bond", "running") != std::string("running")) {
      throw Error(ErrorKind::kValidation, "only running bond is supported");
    }
    spec.mm_per_px = doc.value("mm_per_px", spec.mm_per_px);
    spec.jitter_sigma_px = doc.value("jitter_sigma_px", spec.jitter_sigma_px);
    spec.seed = doc.value("seed", spec.seed);
    if (doc.contains("crack") && !doc.at("crack").is_null()) {
      CrackSpec crack;
      for (const auto& pt : doc.at("crack").at("polyline_mm")) {
        crack.polyline_mm.push_back(
            Point{pt.at(0).get<double>(), pt.at(1).get<double>()});
      }
      crack.opening_mm = doc.at("crack").at("opening_mm");
      spec.crack = std::move(crack);
    }
    if (doc.contains("distortion") && !doc.at("distortion").is_null()) {
      std::array<double, 9> m{};
      const auto& arr = doc.at("distortion");
      if (!arr.is_array() || arr.size() != 9) {
        throw Error(ErrorKind::kParse,
                    "distortion must be a 9-element row-major array");
      }
      for (int i = 0; i < 9; ++i) m[i] = arr[i].get<double>();
      spec.distortion = Homography::from_row_major(m);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("bad wall spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::json wall_spec_to_json(const WallSpec& spec) {
  nlohmann::json doc{
      {"brick",
       {{"face_width_mm", spec.brick.face_width_mm},
        {"face_height_mm", spec.brick.face_height_mm}}},
      {"mortar_mm", spec.mortar_mm},
      {"rows", spec.rows},
      {"cols", spec.cols},
      {"bond", "running"},
      {"mm_per_px", spec.mm_per_px},
      {"jitter_sigma_px", spec.jitter_sigma_px},
      {"seed", spec.seed},
  };
  if (spec.crack) {
    nlohmann::json polyline = nlohmann::json::array();
    for (const Point& p : spec.crack->polyline_mm) {
      polyline.push_back({p.x, p.y});
    }
    doc["crack"] = {{"polyline_mm", std::move(polyline)},
                    {"opening_mm", spec.crack->opening_mm}};
  }
  if (spec.distortion) {
    doc["distortion"] = spec.distortion->row_major();
  }
  return doc;
}

nlohmann::json wall_truth_to_json(const WallTruth& truth) {
  nlohmann::json doc{
      {"distortion", truth.distortion.row_major()},
      {"mm_per_px_x", truth.mm_per_px_x},
      {"mm_per_px_y", truth.mm_per_px_y},
  };
  if (truth.crack) {
    doc["crack"] = {
        {"total_width_mm", truth.crack->total_width_mm},
        {"total_height_mm", truth.crack->total_height_mm},
        {"max_transverse_width_mm", truth.crack->max_transverse_width_mm}};
  }
  return doc;
}

}  // namespace mask2mm
