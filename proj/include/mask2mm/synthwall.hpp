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

#include <cstdint>
#include <optional>

#include <json.hpp>

#include "mask2mm/annotations.hpp"
#include "mask2mm/measure.hpp"
#include "mask2mm/rectify.hpp"

namespace mask2mm {

// A crack as a polyline in wall millimeter coordinates, thickened to the
// given opening width.
struct CrackSpec {
  std::vector<Point> polyline_mm;
  double opening_mm = 20.0;
};

struct WallSpec {
  BrickSpec brick;
  double mortar_mm = 10.0;
  int rows = 6;
  int cols = 8;
  // Only running bond: alternate rows offset by half a unit, half bricks at
  // row ends dropped.
  double mm_per_px = 1.0;
  std::optional<CrackSpec> crack;
  std::optional<Homography> distortion;  // pixel-space warp
  double jitter_sigma_px = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CrackTruth {
  double total_width_mm = 0.0;
  double total_height_mm = 0.0;
  double max_transverse_width_mm = 0.0;
};

struct WallTruth {
  Homography distortion;
  double mm_per_px_x = 0.0;
  double mm_per_px_y = 0.0;
  std::optional<CrackTruth> crack;
};

struct SynthResult {
  ImageRecord ground_truth;
  ImageRecord predictions;  // ground truth with all scores at 1.0
  WallTruth truth;
};

// Lays bricks in running bond, thickens the crack polyline into a polygon,
// relabels bricks the crack touches as broken, warps everything by the
// distortion, and jitters vertices with seeded Gaussian noise.
SynthResult generate(const WallSpec& spec);

struct OracleDeltas {
  double scale_x = 0.0;  // relative error of recovered mm/px vs truth
  double scale_y = 0.0;
  double total_width = 0.0;
  double total_height = 0.0;
  double max_transverse = 0.0;

  double worst_crack_delta() const;
  bool pass(double crack_tolerance) const;
};

// Relative deltas between the recovered scale/measurement and the truth.
OracleDeltas oracle_check(const WallTruth& truth, const PixelScale& scale,
                          const CrackMeasurement& measurement);

// Homography that displaces the corners of a w x h rectangle by up to
// max_frac * min(w, h) each (seeded; retries until the quad is convex).
Homography random_perspective(double width, double height, double max_frac,
                              std::uint64_t seed);

WallSpec wall_spec_from_json(const nlohmann::json& doc);
nlohmann::json wall_spec_to_json(const WallSpec& spec);
nlohmann::json wall_truth_to_json(const WallTruth& truth);

}  // namespace mask2mm
