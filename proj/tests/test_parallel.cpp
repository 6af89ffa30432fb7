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
//
// The parallel kernels must be bit-identical to their serial references.
#include <doctest.h>

#include <random>

#include "mask2mm/hough.hpp"
#include "mask2mm/raster.hpp"

using namespace mask2mm;

namespace {

PolygonMask random_polygon(std::mt19937_64& rng, double max_coord, int max_n) {
  std::uniform_int_distribution<int> n_verts(3, max_n);
  std::uniform_real_distribution<double> coord(0.0, max_coord);
  PolygonMask poly;
  const int n = n_verts(rng);
  for (int i = 0; i < n; ++i) poly.vertices.push_back({coord(rng), coord(rng)});
  return poly;
}

}  // namespace

TEST_CASE("parallel fill matches serial fill bit for bit") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const PolygonMask poly = random_polygon(rng, 200.0, 14);
    const BinaryGrid a = rasterize_fill(poly, 200, 200);
    const BinaryGrid b = rasterize_fill_serial(poly, 200, 200);
    REQUIRE(a.cells == b.cells);
  }
}

TEST_CASE("parallel accumulate matches serial accumulate bit for bit") {
  std::mt19937_64 rng(2025);
  std::uniform_int_distribution<int> coord(0, 255);
  HoughConfig cfg;
  cfg.threshold_vertical = 10;
  cfg.threshold_horizontal = 10;
  for (int trial = 0; trial < 10; ++trial) {
    BinaryGrid grid(256, 256);
    for (int i = 0; i < 4000; ++i) grid.set(coord(rng), coord(rng));
    const HoughAccumulator a = accumulate(grid, cfg);
    const HoughAccumulator b = accumulate_serial(grid, cfg);
    REQUIRE(a.n_rho == b.n_rho);
    REQUIRE(a.n_theta == b.n_theta);
    REQUIRE(a.votes == b.votes);
  }
}
