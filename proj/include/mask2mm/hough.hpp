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
#include <numbers>
#include <vector>

#include "mask2mm/geometry.hpp"
#include "mask2mm/raster.hpp"

namespace mask2mm {

struct HoughConfig {
  double theta_step = std::numbers::pi / 180.0;  // radians per bin
  double rho_step = 1.0;                         // pixels per bin
  // Thresholds of 0 mean "derive from the grid via default_thresholds".
  std::uint32_t threshold_vertical = 0;
  std::uint32_t threshold_horizontal = 0;
  int nms_window_rho = 2;
  int nms_window_theta = 2;
  int max_lines_per_class = 32;
};

struct HoughAccumulator {
  int n_rho = 0;
  int n_theta = 0;
  double rho_min = 0.0;  // rho of bin 0; bins are rho_min + i * rho_step
  double rho_step = 1.0;
  double theta_step = 0.0;
  std::vector<std::uint32_t> votes;  // n_rho x n_theta, theta minor

  std::uint32_t at(int rho_idx, int theta_idx) const {
    return votes[static_cast<std::size_t>(rho_idx) * n_theta + theta_idx];
  }
  double rho_at(int rho_idx) const { return rho_min + rho_idx * rho_step; }
  double theta_at(int theta_idx) const { return theta_idx * theta_step; }
  std::uint64_t total_votes() const;
};

struct DetectedLine {
  PolarLine line;
  std::uint32_t votes = 0;
  bool horizontal = false;  // direction within 45 deg of the x-axis
};

struct LineSets {
  std::vector<DetectedLine> horizontal;
  std::vector<DetectedLine> vertical;
};

// One vote per set pixel per theta bin at the nearest rho bin of
// rho = x*cos(theta) + y*sin(theta). Theta bins run in parallel; the serial
// variant is the bit-identical reference.
HoughAccumulator accumulate(const BinaryGrid& edges, const HoughConfig& cfg);
HoughAccumulator accumulate_serial(const BinaryGrid& edges,
                                   const HoughConfig& cfg);

// Local-maximum peaks over the configured window, split at 45 deg into
// horizontal (normal theta in [45, 135) deg) and vertical lines, each list
// capped and ordered by descending votes.
LineSets extract_lines(const HoughAccumulator& acc, const HoughConfig& cfg);

// t_vertical = max(20, round(0.25 * grid height)); t_horizontal = 2x that.
// Brick courses repeat every other layer, so horizontal lines accumulate
// roughly twice the votes of head-joint verticals.
std::pair<std::uint32_t, std::uint32_t> default_thresholds(
    const BinaryGrid& edges);

// Copy of cfg with zero thresholds replaced by the grid defaults.
HoughConfig resolve_thresholds(const HoughConfig& cfg, const BinaryGrid& edges);

}  // namespace mask2mm
