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
#include "mask2mm/render.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace mask2mm {

void RgbImage::set(int x, int y, std::uint8_t r, std::uint8_t g,
                   std::uint8_t b) {
  if (x < 0 || x >= width || y < 0 || y >= height) return;
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  pixels[i] = r;
  pixels[i + 1] = g;
  pixels[i + 2] = b;
}

void write_accumulator_pgm(const std::filesystem::path& path,
                           const HoughAccumulator& acc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot write " + path.string());
  }
  std::uint32_t max_vote = 1;
  for (std::uint32_t v : acc.votes) max_vote = std::max(max_vote, v);
  out << "P5\n" << acc.n_theta << " " << acc.n_rho << "\n255\n";
  std::vector<std::uint8_t> row(acc.n_theta);
  for (int r = 0; r < acc.n_rho; ++r) {
    for (int t = 0; t < acc.n_theta; ++t) {
      row[t] = static_cast<std::uint8_t>(255u * acc.at(r, t) / max_vote);
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
}

void write_png(const std::filesystem::path& path, const RgbImage& image) {
  FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) {
    throw Error(ErrorKind::kIo, "cannot write " + path.string());
  }
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    std::fclose(fp);
    throw Error(ErrorKind::kIo, "png encoding failed for " + path.string());
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(
                           &image.pixels[static_cast<std::size_t>(y) *
                                         image.width * 3]));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

namespace {

void draw_polar_line(RgbImage& img, const PolarLine& line, std::uint8_t r,
                     std::uint8_t g, std::uint8_t b) {
  // Walk along the line direction from its foot point far enough to cross
  // the whole frame.
  const double c = std::cos(line.theta), s = std::sin(line.theta);
  const Point foot{line.rho * c, line.rho * s};
  const Point dir{-s, c};
  const double reach = std::hypot(img.width, img.height) + 2.0;
  Point a = foot - reach * dir;
  Point b2 = foot + reach * dir;
  const int steps = static_cast<int>(2.0 * reach) + 1;
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const Point p = a + t * (b2 - a);
    img.set(static_cast<int>(std::llround(p.x)),
            static_cast<int>(std::llround(p.y)), r, g, b);
  }
}

}  // namespace

RgbImage render_line_overlay(const BinaryGrid& edges,
                             const std::vector<DetectedLine>& horizontal,
                             const std::vector<DetectedLine>& vertical) {
  RgbImage img(edges.width, edges.height);
  for (int y = 0; y < edges.height; ++y) {
    for (int x = 0; x < edges.width; ++x) {
      if (edges.at(x, y)) img.set(x, y, 255, 255, 255);
    }
  }
  for (const DetectedLine& line : horizontal) {
    draw_polar_line(img, line.line, 255, 0, 0);
  }
  for (const DetectedLine& line : vertical) {
    draw_polar_line(img, line.line, 0, 255, 0);
  }
  return img;
}

}  // namespace mask2mm
