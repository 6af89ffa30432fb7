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
#include "mask2mm/hough.hpp"

#include <algorithm>
#include <cmath>

namespace mask2mm {

namespace {

constexpr double kPi = std::numbers::pi;

void check_config(const HoughConfig& cfg) {
  if (!(cfg.theta_step > 0.0) || !(cfg.rho_step > 0.0)) {
    throw Error(ErrorKind::kValidation, "hough steps must be positive");
  }
  if (cfg.nms_window_rho < 0 || cfg.nms_window_theta < 0 ||
      cfg.max_lines_per_class < 1) {
    throw Error(ErrorKind::kValidation, "bad hough window configuration");
  }
}

void check_thresholds(const HoughConfig& cfg) {
  if (cfg.threshold_vertical < 1 || cfg.threshold_horizontal < 1) {
    throw Error(ErrorKind::kValidation, "hough thresholds must be >= 1");
  }
  if (cfg.threshold_horizontal < cfg.threshold_vertical) {
    throw Error(ErrorKind::kValidation,
                "horizontal threshold must be >= vertical threshold");
  }
}

struct Pixel {
  int x, y;
};

std::vector<Pixel> collect_set_pixels(const BinaryGrid& grid) {
  std::vector<Pixel> pixels;
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      if (grid.at(x, y)) pixels.push_back({x, y});
    }
  }
  return pixels;
}

HoughAccumulator make_accumulator(const BinaryGrid& grid,
                                  const HoughConfig& cfg) {
  if (grid.width <= 0 || grid.height <= 0) {
    throw Error(ErrorKind::kValidation, "accumulate: empty grid");
  }
  HoughAccumulator acc;
  // Rho covers [-D, D] so every in-grid pixel lands inside the table.
  const double diag = std::ceil(std::hypot(grid.width, grid.height));
  acc.rho_step = cfg.rho_step;
  acc.theta_step = cfg.theta_step;
  acc.n_theta =
      std::max(1, static_cast<int>(std::floor(kPi / cfg.theta_step + 1e-9)));
  acc.n_rho = 2 * static_cast<int>(std::ceil(diag / cfg.rho_step)) + 1;
  acc.rho_min = -std::ceil(diag / cfg.rho_step) * cfg.rho_step;
  acc.votes.assign(
      static_cast<std::size_t>(acc.n_rho) * static_cast<std::size_t>(acc.n_theta),
      0);
  return acc;
}

// Each thread owns a disjoint set of theta columns, so the parallel result
// is bit-identical to the serial one.
void vote(HoughAccumulator& acc, const std::vector<Pixel>& pixels,
          bool parallel) {
  std::vector<double> cos_t(acc.n_theta), sin_t(acc.n_theta);
  for (int t = 0; t < acc.n_theta; ++t) {
    cos_t[t] = std::cos(acc.theta_at(t));
    sin_t[t] = std::sin(acc.theta_at(t));
  }
#pragma omp parallel for schedule(static) if (parallel)
  for (int t = 0; t < acc.n_theta; ++t) {
    const double c = cos_t[t], s = sin_t[t];
    for (const Pixel& p : pixels) {
      const double rho = p.x * c + p.y * s;
      const int ri = static_cast<int>(std::llround((rho - acc.rho_min) /
                                                   acc.rho_step));
      ++acc.votes[static_cast<std::size_t>(ri) * acc.n_theta + t];
    }
  }
}

}  // namespace

std::uint64_t HoughAccumulator::total_votes() const {
  std::uint64_t sum = 0;
  for (std::uint32_t v : votes) sum += v;
  return sum;
}

HoughAccumulator accumulate(const BinaryGrid& edges, const HoughConfig& cfg) {
  check_config(cfg);
  HoughAccumulator acc = make_accumulator(edges, cfg);
  vote(acc, collect_set_pixels(edges), true);
  return acc;
}

HoughAccumulator accumulate_serial(const BinaryGrid& edges,
                                   const HoughConfig& cfg) {
  check_config(cfg);
  HoughAccumulator acc = make_accumulator(edges, cfg);
  vote(acc, collect_set_pixels(edges), false);
  return acc;
}

LineSets extract_lines(const HoughAccumulator& acc, const HoughConfig& cfg) {
  check_config(cfg);
  check_thresholds(cfg);
  struct Peak {
    int ri, ti;
    std::uint32_t votes;
  };
  std::vector<Peak> horizontal, vertical;

  const std::uint32_t min_threshold =
      std::min(cfg.threshold_vertical, cfg.threshold_horizontal);
  for (int ri = 0; ri < acc.n_rho; ++ri) {
    for (int ti = 0; ti < acc.n_theta; ++ti) {
      const std::uint32_t v = acc.at(ri, ti);
      if (v < min_threshold) continue;

      const double theta = acc.theta_at(ti);
      const bool is_horizontal = theta >= kPi / 4 && theta < 3 * kPi / 4;
      const std::uint32_t threshold =
          is_horizontal ? cfg.threshold_horizontal : cfg.threshold_vertical;
      if (v < threshold) continue;

      // Window maximum; ties go to the lexicographically smaller bin.
      bool peak = true;
      for (int dr = -cfg.nms_window_rho; peak && dr <= cfg.nms_window_rho;
           ++dr) {
        const int nr = ri + dr;
        if (nr < 0 || nr >= acc.n_rho) continue;
        for (int dt = -cfg.nms_window_theta; dt <= cfg.nms_window_theta; ++dt) {
          const int nt = ti + dt;
          if (nt < 0 || nt >= acc.n_theta || (dr == 0 && dt == 0)) continue;
          const std::uint32_t nv = acc.at(nr, nt);
          if (nv > v || (nv == v && (nr < ri || (nr == ri && nt < ti)))) {
            peak = false;
            break;
          }
        }
      }
      if (!peak) continue;
      (is_horizontal ? horizontal : vertical).push_back({ri, ti, v});
    }
  }

  auto by_votes = [](const Peak& a, const Peak& b) {
    if (a.votes != b.votes) return a.votes > b.votes;
    if (a.ri != b.ri) return a.ri < b.ri;
    return a.ti < b.ti;
  };
  std::sort(horizontal.begin(), horizontal.end(), by_votes);
  std::sort(vertical.begin(), vertical.end(), by_votes);

  auto to_lines = [&](std::vector<Peak>& peaks, bool is_horizontal) {
    if (peaks.size() > static_cast<std::size_t>(cfg.max_lines_per_class)) {
      peaks.resize(cfg.max_lines_per_class);
    }
    std::vector<DetectedLine> lines;
    lines.reserve(peaks.size());
    for (const Peak& p : peaks) {
      lines.push_back({PolarLine::make(acc.rho_at(p.ri), acc.theta_at(p.ti)),
                       p.votes, is_horizontal});
    }
    return lines;
  };
  LineSets sets;
  sets.horizontal = to_lines(horizontal, true);
  sets.vertical = to_lines(vertical, false);
  return sets;
}

std::pair<std::uint32_t, std::uint32_t> default_thresholds(
    const BinaryGrid& edges) {
  if (edges.width <= 0 || edges.height <= 0) {
    throw Error(ErrorKind::kValidation, "default_thresholds: empty grid");
  }
  const auto t_vertical = static_cast<std::uint32_t>(
      std::max<long long>(20, std::llround(0.25 * edges.height)));
  return {t_vertical, 2 * t_vertical};
}

HoughConfig resolve_thresholds(const HoughConfig& cfg,
                               const BinaryGrid& edges) {
  HoughConfig out = cfg;
  if (out.threshold_vertical == 0 || out.threshold_horizontal == 0) {
    const auto [tv, th] = default_thresholds(edges);
    if (out.threshold_vertical == 0) out.threshold_vertical = tv;
    if (out.threshold_horizontal == 0) out.threshold_horizontal = th;
  }
  check_thresholds(out);
  return out;
}

}  // namespace mask2mm
