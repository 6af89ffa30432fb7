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

#include <json.hpp>

#include "mask2mm/annotations.hpp"
#include "mask2mm/hough.hpp"

namespace mask2mm {

// Known face dimensions of one brick unit, in millimeters.
struct BrickSpec {
  double face_width_mm = 220.0;
  double face_height_mm = 60.0;

  double ratio() const { return face_width_mm / face_height_mm; }
  void validate() const;
};

// Millimeters per pixel in the rectified frame. After aspect correction the
// two components agree to within 1%.
struct PixelScale {
  double mm_per_px_x = 0.0;
  double mm_per_px_y = 0.0;

  static PixelScale make(double x, double y);  // enforces the 1% agreement
};

// The two farthest horizontal lines, the two farthest vertical lines, and
// the quadrilateral of their four intersections.
struct LinePairSelection {
  PolarLine top, bottom, left, right;
  Quadrilateral quad;
};

// Masks of instances labeled brick, order preserved. Throws
// kInsufficientBricks when fewer than 4 brick instances are present.
std::vector<PolygonMask> filter_brick_masks(const ImageRecord& record);

// Picks the horizontal pair with maximum |y-intercept| difference
// (b = rho / sin theta) and the vertical pair with maximum |x-intercept|
// difference (a = rho / cos theta).
LinePairSelection select_farthest_pairs(
    const std::vector<DetectedLine>& horizontal,
    const std::vector<DetectedLine>& vertical);

// Target rectangle whose sides equal the quad's bottom (BL->BR) and left
// (TL->BL) edge lengths, rounded to integers >= 1.
std::pair<int, int> initial_rectangle(const Quadrilateral& quad);

struct AspectCorrection {
  int corrected_height = 0;
  double factor = 1.0;  // observed brick ratio / known brick ratio
  PixelScale scale;
};

// Restores the y scale from the warped brick aspect ratios: bricks whose
// bbox ratio falls in [1.5, 6.0] anchor the correction (medians, so
// vertically laid units and fragments do not bias it).
AspectCorrection aspect_correct(const std::vector<PolygonMask>& warped_bricks,
                                const BrickSpec& spec, int dst_width,
                                int dst_height);

struct RectifyResult {
  Homography homography;  // source pixels -> warped record pixels
  PixelScale scale;
  ImageRecord warped;
  LinePairSelection lines;
  std::pair<int, int> initial_size;
  double aspect_factor = 1.0;
};

// Full pipeline: brick filter -> edge raster -> Hough -> farthest pairs ->
// quad homography -> aspect correction -> re-warp of every instance.
RectifyResult rectify_image(const ImageRecord& record, const HoughConfig& cfg,
                            const BrickSpec& spec);

nlohmann::json rectify_report_json(const RectifyResult& result);

}  // namespace mask2mm
