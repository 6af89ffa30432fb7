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
// Compares the OpenMP kernels against their serial references and checks
// that both produce identical results.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mask2mm/hough.hpp"
#include "mask2mm/raster.hpp"

using namespace mask2mm;

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
  fn();  // warm-up
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() /
         repeats;
}

PolygonMask star_polygon(int n_points, double cx, double cy, double r_outer,
                         double r_inner) {
  PolygonMask poly;
  for (int i = 0; i < 2 * n_points; ++i) {
    const double r = i % 2 == 0 ? r_outer : r_inner;
    const double a = std::numbers::pi * i / n_points;
    poly.vertices.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
  }
  return poly;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled (serial build)\n");
#endif

  {
    const int kSize = 2048;
    const PolygonMask poly =
        star_polygon(60, kSize / 2.0, kSize / 2.0, kSize * 0.48, kSize * 0.2);
    const double serial = time_ms(
        [&] { rasterize_fill_serial(poly, kSize, kSize); }, 5);
    const double parallel =
        time_ms([&] { rasterize_fill(poly, kSize, kSize); }, 5);
    const bool equal = rasterize_fill(poly, kSize, kSize).cells ==
                       rasterize_fill_serial(poly, kSize, kSize).cells;
    std::printf(
        "rasterize_fill %dx%d      serial %8.2f ms   parallel %8.2f ms   "
        "speedup %.2fx   identical: %s\n",
        kSize, kSize, serial, parallel, serial / parallel,
        equal ? "yes" : "NO");
  }

  {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> coord(0, 1023);
    BinaryGrid grid(1024, 1024);
    for (int i = 0; i < 30000; ++i) grid.set(coord(rng), coord(rng));
    HoughConfig cfg;
    cfg.threshold_vertical = 50;
    cfg.threshold_horizontal = 100;
    const double serial = time_ms([&] { accumulate_serial(grid, cfg); }, 3);
    const double parallel = time_ms([&] { accumulate(grid, cfg); }, 3);
    const bool equal =
        accumulate(grid, cfg).votes == accumulate_serial(grid, cfg).votes;
    std::printf(
        "hough_accumulate 30k px    serial %8.2f ms   parallel %8.2f ms   "
        "speedup %.2fx   identical: %s\n",
        serial, parallel, serial / parallel, equal ? "yes" : "NO");
  }

  return 0;
}
