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
#include "mask2mm/rectify.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <sstream>

namespace mask2mm {

namespace {

constexpr double kPi = std::numbers::pi;

// Bbox-ratio window that keeps stretcher faces and rejects vertically laid
// units and broken fragments.
constexpr double kMinAnchorRatio = 1.5;
constexpr double kMaxAnchorRatio = 6.0;

double median(std::vector<double> values) {
  assert(!values.empty());
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

void BrickSpec::validate() const {
  if (!(face_width_mm > 0.0) || !(face_height_mm > 0.0)) {
    throw Error(ErrorKind::kValidation, "brick dimensions must be positive");
  }
  if (!(face_width_mm > face_height_mm)) {
    throw Error(ErrorKind::kValidation,
                "brick face width must exceed face height");
  }
}

PixelScale PixelScale::make(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y) || x <= 0.0 || y <= 0.0) {
    throw Error(ErrorKind::kValidation, "pixel scale must be finite positive");
  }
  if (std::abs(x - y) / x >= 0.01) {
    std::ostringstream os;
    os << "pixel scale mismatch after aspect correction: " << x << " vs " << y;
    throw Error(ErrorKind::kScaleMismatch, os.str());
  }
  return PixelScale{x, y};
}

std::vector<PolygonMask> filter_brick_masks(const ImageRecord& record) {
  std::vector<PolygonMask> masks;
  int brick_instances = 0;
  for (const Instance& inst : record.instances) {
    if (inst.label != ClassLabel::kBrick) continue;
    ++brick_instances;
    for (const PolygonMask& part : inst.parts) masks.push_back(part);
  }
  if (brick_instances < 4) {
    throw Error(ErrorKind::kInsufficientBricks,
                "image " + record.image_id + ": " +
                    std::to_string(brick_instances) +
                    " brick instances, need at least 4");
  }
  return masks;
}

namespace {

double y_intercept(const PolarLine& line) {
  const double s = std::sin(line.theta);
  assert(std::abs(s) > 1e-6 && "horizontal class guarantees |sin| >= sin(45deg)");
  return line.rho / s;
}

double x_intercept(const PolarLine& line) {
  const double c = std::cos(line.theta);
  assert(std::abs(c) > 1e-6 && "vertical class guarantees |cos| >= cos(45deg)");
  return line.rho / c;
}

}  // namespace

LinePairSelection select_farthest_pairs(
    const std::vector<DetectedLine>& horizontal,
    const std::vector<DetectedLine>& vertical) {
  if (horizontal.size() < 2 || vertical.size() < 2) {
    std::ostringstream os;
    os << "need 2 horizontal and 2 vertical lines, got "
       << horizontal.size() << " and " << vertical.size();
    throw Error(ErrorKind::kInsufficientLines, os.str());
  }

  // All lines in one class have near-equal slopes, so the farthest pair is
  // the one with the largest intercept difference.
  auto farthest = [](const std::vector<DetectedLine>& lines,
                     double (*intercept)(const PolarLine&)) {
    std::size_t best_i = 0, best_j = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        const double d =
            std::abs(intercept(lines[i].line) - intercept(lines[j].line));
        if (d > best) {
          best = d;
          best_i = i;
          best_j = j;
        }
      }
    }
    return std::make_pair(lines[best_i].line, lines[best_j].line);
  };

  auto [h1, h2] = farthest(horizontal, &y_intercept);
  auto [v1, v2] = farthest(vertical, &x_intercept);

  LinePairSelection sel;
  sel.top = y_intercept(h1) <= y_intercept(h2) ? h1 : h2;
  sel.bottom = y_intercept(h1) <= y_intercept(h2) ? h2 : h1;
  sel.left = x_intercept(v1) <= x_intercept(v2) ? v1 : v2;
  sel.right = x_intercept(v1) <= x_intercept(v2) ? v2 : v1;
  sel.quad = Quadrilateral::make(
      intersect(sel.top, sel.left), intersect(sel.top, sel.right),
      intersect(sel.bottom, sel.right), intersect(sel.bottom, sel.left));
  return sel;
}

std::pair<int, int> initial_rectangle(const Quadrilateral& quad) {
  const Point& tl = quad.corners[0];
  const Point& br = quad.corners[2];
  const Point& bl = quad.corners[3];
  const int width = std::max<long long>(1, std::llround(norm(br - bl)));
  const int height = std::max<long long>(1, std::llround(norm(bl - tl)));
  return {width, height};
}

AspectCorrection aspect_correct(const std::vector<PolygonMask>& warped_bricks,
                                const BrickSpec& spec, int dst_width,
                                int dst_height) {
  spec.validate();
  (void)dst_width;
  std::vector<double> ratios, widths, heights;
  for (const PolygonMask& mask : warped_bricks) {
    const Box b = bbox_of(mask);
    if (!(b.height() > 0.0)) continue;
    const double ratio = b.width() / b.height();
    if (ratio < kMinAnchorRatio || ratio > kMaxAnchorRatio) continue;
    ratios.push_back(ratio);
    widths.push_back(b.width());
    heights.push_back(b.height());
  }
  if (ratios.empty()) {
    throw Error(ErrorKind::kNoAnchorBricks,
                "no warped brick with bbox ratio in [1.5, 6.0]");
  }

  AspectCorrection out;
  const double observed = median(ratios);
  out.factor = observed / spec.ratio();
  out.corrected_height =
      std::max<long long>(1, std::llround(dst_height * out.factor));
  const double mm_per_px_x = spec.face_width_mm / median(widths);
  const double mm_per_px_y =
      spec.face_height_mm / (median(heights) * out.factor);
  out.scale = PixelScale::make(mm_per_px_x, mm_per_px_y);
  return out;
}

RectifyResult rectify_image(const ImageRecord& record, const HoughConfig& cfg,
                            const BrickSpec& spec) {
  const std::vector<PolygonMask> bricks = filter_brick_masks(record);
  const BinaryGrid edges = rasterize_edges(bricks, record.width, record.height);
  const HoughConfig resolved = resolve_thresholds(cfg, edges);
  const HoughAccumulator acc = accumulate(edges, resolved);
  const LineSets lines = extract_lines(acc, resolved);
  LinePairSelection sel = select_farthest_pairs(lines.horizontal, lines.vertical);

  const auto [dst_w, dst_h] = initial_rectangle(sel.quad);
  const Homography first_pass = homography_from_quad(sel.quad, dst_w, dst_h);

  std::vector<PolygonMask> warped_bricks;
  warped_bricks.reserve(bricks.size());
  for (const PolygonMask& mask : bricks) {
    warped_bricks.push_back(warp_polygon(first_pass, mask));
  }
  const AspectCorrection corr =
      aspect_correct(warped_bricks, spec, dst_w, dst_h);

  // Rebuild the transform with the corrected height and re-warp every
  // polygon, keeping all geometry in polygon space.
  const Homography rectifier =
      homography_from_quad(sel.quad, dst_w, corr.corrected_height);

  double min_x = 0.0, min_y = 0.0;
  double max_x = dst_w, max_y = corr.corrected_height;
  std::vector<std::vector<PolygonMask>> warped_parts(record.instances.size());
  for (std::size_t i = 0; i < record.instances.size(); ++i) {
    for (const PolygonMask& part : record.instances[i].parts) {
      PolygonMask warped = warp_polygon(rectifier, part);
      for (const Point& v : warped.vertices) {
        min_x = std::min(min_x, v.x);
        min_y = std::min(min_y, v.y);
        max_x = std::max(max_x, v.x);
        max_y = std::max(max_y, v.y);
      }
      warped_parts[i].push_back(std::move(warped));
    }
  }

  if (max_x - min_x > 64.0 * dst_w ||
      max_y - min_y > 64.0 * corr.corrected_height) {
    throw Error(ErrorKind::kProjection,
                "image " + record.image_id +
                    ": warped polygons explode past the target frame");
  }

  RectifyResult result;
  result.lines = sel;
  result.initial_size = {dst_w, dst_h};
  result.aspect_factor = corr.factor;
  result.scale = corr.scale;
  result.homography =
      Homography::translation(-min_x, -min_y).compose(rectifier);

  ImageRecord warped;
  warped.image_id = record.image_id;
  warped.width = static_cast<int>(std::ceil(max_x - min_x));
  warped.height = static_cast<int>(std::ceil(max_y - min_y));
  for (std::size_t i = 0; i < record.instances.size(); ++i) {
    const Instance& inst = record.instances[i];
    for (PolygonMask& part : warped_parts[i]) {
      for (Point& v : part.vertices) {
        v.x -= min_x;
        v.y -= min_y;
      }
    }
    warped.instances.push_back(make_instance(
        inst.label, std::move(warped_parts[i]), inst.score, warped.width,
        warped.height, "warped " + record.image_id));
  }
  result.warped = std::move(warped);
  return result;
}

namespace {

nlohmann::json line_json(const PolarLine& line) {
  return {{"rho", line.rho}, {"theta_deg", line.theta * 180.0 / kPi}};
}

}  // namespace

nlohmann::json rectify_report_json(const RectifyResult& result) {
  nlohmann::json corners = nlohmann::json::array();
  for (const Point& c : result.lines.quad.corners) {
    corners.push_back({c.x, c.y});
  }
  return {
      {"lines",
       {{"top", line_json(result.lines.top)},
        {"bottom", line_json(result.lines.bottom)},
        {"left", line_json(result.lines.left)},
        {"right", line_json(result.lines.right)}}},
      {"quad_corners", corners},
      {"homography", result.homography.row_major()},
      {"initial_size", {result.initial_size.first, result.initial_size.second}},
      {"aspect_factor", result.aspect_factor},
      {"scale",
       {{"mm_per_px_x", result.scale.mm_per_px_x},
        {"mm_per_px_y", result.scale.mm_per_px_y}}},
      {"warped_size", {result.warped.width, result.warped.height}},
  };
}

}  // namespace mask2mm
