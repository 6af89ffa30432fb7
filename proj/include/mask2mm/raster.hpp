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
#include <vector>

#include "mask2mm/geometry.hpp"

namespace mask2mm {

struct BinaryGrid {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> cells;  // row-major, 1 = set

  BinaryGrid() = default;
  BinaryGrid(int w, int h)
      : width(w), height(h),
        cells(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0) {}

  std::uint8_t at(int x, int y) const {
    return cells[static_cast<std::size_t>(y) * width + x];
  }
  void set(int x, int y, std::uint8_t v = 1) {
    cells[static_cast<std::size_t>(y) * width + x] = v;
  }
  std::size_t count_set() const;
};

// Even-odd scanline fill: pixel (x, y) is set iff its center
// (x + 0.5, y + 0.5) lies inside the polygon. Rows run in parallel; the
// serial variant is the reference used by the tests and benchmark.
BinaryGrid rasterize_fill(const PolygonMask& mask, int width, int height);
BinaryGrid rasterize_fill_serial(const PolygonMask& mask, int width,
                                 int height);

// Union of the even-odd fills of all parts of one instance.
BinaryGrid rasterize_parts(const std::vector<PolygonMask>& parts, int width,
                           int height);

// Draws every polygon edge as an 8-connected 1-px Bresenham line; union
// over all masks. Vertices are rounded to the nearest pixel.
BinaryGrid rasterize_edges(const std::vector<PolygonMask>& masks, int width,
                           int height);

// Single Bresenham segment into an existing grid (pixels outside are skipped).
void draw_line(BinaryGrid& grid, int x0, int y0, int x1, int y1);

}  // namespace mask2mm
