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

#include <filesystem>

#include "mask2mm/hough.hpp"
#include "mask2mm/raster.hpp"

namespace mask2mm {

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // RGB, row-major

  RgbImage(int w, int h)
      : width(w), height(h),
        pixels(static_cast<std::size_t>(w) * h * 3, 0) {}
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
};

// Accumulator heatmap, votes scaled to 0..255. Binary (P5) PGM.
void write_accumulator_pgm(const std::filesystem::path& path,
                           const HoughAccumulator& acc);

void write_png(const std::filesystem::path& path, const RgbImage& image);

// Edge pixels in white, horizontal lines red, vertical lines green.
RgbImage render_line_overlay(const BinaryGrid& edges,
                             const std::vector<DetectedLine>& horizontal,
                             const std::vector<DetectedLine>& vertical);

}  // namespace mask2mm
