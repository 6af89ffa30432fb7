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
#include "mask2mm/raster.hpp"

#include <algorithm>
#include <cmath>

namespace mask2mm {

std::size_t BinaryGrid::count_set() const {
  std::size_t n = 0;
  for (std::uint8_t c : cells) n += c;
  return n;
}

namespace {

// Fills one scanline at y + 0.5 with even-odd parity. A pixel center is
// inside iff the number of edge crossings strictly to its right is odd,
// which reduces to half-open spans between sorted crossings.
void fill_row(const std::vector<Point>& v, int y, int width,
              std::uint8_t* row, std::vector<double>& xs) {
  const double py = y + 0.5;
  xs.clear();
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = v[i];
    const Point& b = v[(i + 1) % n];
    if ((a.y > py) == (b.y > py)) continue;
    xs.push_back(a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y));
  }
  std::sort(xs.begin(), xs.end());
  for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
    // Centers in [xs[k], xs[k+1]): first x with x + 0.5 >= xs[k].
    int x_begin = static_cast<int>(std::ceil(xs[k] - 0.5));
    int x_end = static_cast<int>(std::ceil(xs[k + 1] - 0.5));
    x_begin = std::max(x_begin, 0);
    x_end = std::min(x_end, width);
    for (int x = x_begin; x < x_end; ++x) row[x] = 1;
  }
}

}  // namespace

BinaryGrid rasterize_fill(const PolygonMask& mask, int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::kValidation, "rasterize_fill: empty grid");
  }
  BinaryGrid grid(width, height);
  const auto& v = mask.vertices;
  if (v.size() < 3) return grid;
#pragma omp parallel
  {
    std::vector<double> xs;
#pragma omp for schedule(static)
    for (int y = 0; y < height; ++y) {
      fill_row(v, y, width, &grid.cells[static_cast<std::size_t>(y) * width],
               xs);
    }
  }
  return grid;
}

BinaryGrid rasterize_fill_serial(const PolygonMask& mask, int width,
                                 int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::kValidation, "rasterize_fill: empty grid");
  }
  BinaryGrid grid(width, height);
  const auto& v = mask.vertices;
  if (v.size() < 3) return grid;
  std::vector<double> xs;
  for (int y = 0; y < height; ++y) {
    fill_row(v, y, width, &grid.cells[static_cast<std::size_t>(y) * width], xs);
  }
  return grid;
}

BinaryGrid rasterize_parts(const std::vector<PolygonMask>& parts, int width,
                           int height) {
  BinaryGrid grid(width, height);
  std::vector<double> xs;
  for (const PolygonMask& part : parts) {
    if (part.vertices.size() < 3) continue;
    BinaryGrid one(width, height);
    for (int y = 0; y < height; ++y) {
      fill_row(part.vertices, y, width,
               &one.cells[static_cast<std::size_t>(y) * width], xs);
    }
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
      grid.cells[i] |= one.cells[i];
    }
  }
  return grid;
}

void draw_line(BinaryGrid& grid, int x0, int y0, int x1, int y1) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  int x = x0, y = y0;
  while (true) {
    if (x >= 0 && x < grid.width && y >= 0 && y < grid.height) grid.set(x, y);
    if (x == x1 && y == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

BinaryGrid rasterize_edges(const std::vector<PolygonMask>& masks, int width,
                           int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::kValidation, "rasterize_edges: empty grid");
  }
  BinaryGrid grid(width, height);
  for (const PolygonMask& mask : masks) {
    const auto& v = mask.vertices;
    const std::size_t n = v.size();
    if (n < 2) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Point& a = v[i];
      const Point& b = v[(i + 1) % n];
      draw_line(grid, static_cast<int>(std::llround(a.x)),
                static_cast<int>(std::llround(a.y)),
                static_cast<int>(std::llround(b.x)),
                static_cast<int>(std::llround(b.y)));
    }
  }
  return grid;
}

}  // namespace mask2mm
