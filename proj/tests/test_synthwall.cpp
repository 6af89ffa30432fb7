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
#include <doctest.h>

#include <algorithm>

#include "mask2mm/measure.hpp"
#include "mask2mm/synthwall.hpp"

using namespace mask2mm;

namespace {

WallSpec plain_wall() {
  WallSpec spec;
  spec.brick = BrickSpec{220.0, 60.0};
  spec.mortar_mm = 10.0;
  spec.rows = 5;
  spec.cols = 8;
  spec.mm_per_px = 1.0;
  spec.jitter_sigma_px = 0.0;
  spec.seed = 1;
  return spec;
}

WallSpec cracked_wall() {
  WallSpec spec = plain_wall();
  CrackSpec crack;
  crack.polyline_mm = {{900.0, 30.0}, {900.0, 310.0}};
  crack.opening_mm = 40.0;
  spec.crack = crack;
  return spec;
}

int count_label(const ImageRecord& rec, ClassLabel label) {
  int n = 0;
  for (const Instance& inst : rec.instances) n += inst.label == label;
  return n;
}

}  // namespace

TEST_CASE("generate lays running bond with half bricks dropped") {
  const SynthResult result = generate(plain_wall());
  // 5 rows x 8 cols minus one brick per offset row (rows 1 and 3).
  CHECK(count_label(result.ground_truth, ClassLabel::kBrick) == 5 * 8 - 2);
  CHECK(count_label(result.ground_truth, ClassLabel::kCrack) == 0);
  for (const Instance& inst : result.ground_truth.instances) {
    CHECK(!inst.score.has_value());
  }
  for (const Instance& inst : result.predictions.instances) {
    CHECK(inst.score == 1.0);
  }
}

TEST_CASE("generate emits a crack and relabels touched bricks") {
  const SynthResult result = generate(cracked_wall());
  CHECK(count_label(result.ground_truth, ClassLabel::kCrack) == 1);
  CHECK(count_label(result.ground_truth, ClassLabel::kBrokenBrick) > 0);
  REQUIRE(result.truth.crack.has_value());
  // A straight vertical polyline: the square caps stretch the bbox height
  // to the polyline extent plus the opening.
  CHECK(result.truth.crack->total_width_mm == doctest::Approx(40.0));
  CHECK(result.truth.crack->total_height_mm == doctest::Approx(280.0 + 40.0));
  CHECK(result.truth.crack->max_transverse_width_mm == doctest::Approx(40.0));
}

TEST_CASE("step crack truth covers the polyline extent plus opening") {
  WallSpec spec = plain_wall();
  CrackSpec crack;
  crack.polyline_mm = {{600.0, 40.0}, {700.0, 140.0}, {700.0, 300.0}};
  crack.opening_mm = 30.0;
  spec.crack = crack;
  const SynthResult result = generate(spec);
  REQUIRE(result.truth.crack.has_value());
  const Box bb = bbox_of(result.ground_truth.instances.back().parts);
  CHECK(bb.width() > 0);
  // Vertical extent of the polyline is 260 mm; the thickened polygon adds
  // about half the opening at each end.
  CHECK(result.truth.crack->total_height_mm > 260.0);
  CHECK(result.truth.crack->total_height_mm < 260.0 + 2.0 * 30.0);
  // The diagonal leg widens the per-row extent beyond the opening.
  CHECK(result.truth.crack->max_transverse_width_mm > 30.0);
}

TEST_CASE("same seed gives bit-identical output") {
  WallSpec spec = cracked_wall();
  spec.jitter_sigma_px = 0.7;
  spec.seed = 99;
  const nlohmann::json a =
      dataset_to_json({generate(spec).ground_truth}, DatasetKind::kGroundTruth);
  const nlohmann::json b =
      dataset_to_json({generate(spec).ground_truth}, DatasetKind::kGroundTruth);
  CHECK(a.dump() == b.dump());

  spec.seed = 100;
  const nlohmann::json c =
      dataset_to_json({generate(spec).ground_truth}, DatasetKind::kGroundTruth);
  CHECK(a.dump() != c.dump());
}

TEST_CASE("crack outside the wall is rejected") {
  WallSpec spec = plain_wall();
  CrackSpec crack;
  crack.polyline_mm = {{900.0, -50.0}, {900.0, 310.0}};
  crack.opening_mm = 20.0;
  spec.crack = crack;
  CHECK_THROWS_AS(generate(spec), Error);
}

TEST_CASE("wall spec JSON round trip") {
  WallSpec spec = cracked_wall();
  spec.distortion = random_perspective(800, 400, 0.1, 5);
  const WallSpec back = wall_spec_from_json(wall_spec_to_json(spec));
  CHECK(back.rows == spec.rows);
  CHECK(back.cols == spec.cols);
  CHECK(back.mm_per_px == spec.mm_per_px);
  REQUIRE(back.crack.has_value());
  CHECK(back.crack->opening_mm == spec.crack->opening_mm);
  REQUIRE(back.distortion.has_value());
  for (int i = 0; i < 9; ++i) {
    CHECK(back.distortion->row_major()[i] ==
          doctest::Approx(spec.distortion->row_major()[i]).epsilon(1e-12));
  }
}

TEST_CASE("random_perspective displaces corners within the budget") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double frac = 0.25;
    const Homography g = random_perspective(900, 500, frac, seed);
    const double budget = frac * 500.0 + 1e-6;
    const std::array<Point, 4> corners{Point{0, 0}, Point{900, 0},
                                       Point{900, 500}, Point{0, 500}};
    for (const Point& c : corners) {
      CHECK(norm(g.apply(c) - c) <= budget);
    }
  }
}

namespace {

HoughConfig pipeline_config() {
  HoughConfig cfg;
  cfg.theta_step = 0.25 * std::numbers::pi / 180.0;
  cfg.nms_window_rho = 8;
  cfg.nms_window_theta = 8;
  cfg.threshold_vertical = 70;
  cfg.threshold_horizontal = 200;
  return cfg;
}

WallSpec pipeline_wall(std::uint64_t seed) {
  WallSpec spec;
  spec.brick = BrickSpec{220.0, 60.0};
  spec.mortar_mm = 10.0;
  spec.rows = 10;
  spec.cols = 7;
  spec.mm_per_px = 1.0;
  spec.jitter_sigma_px = 0.5;
  spec.seed = seed;
  CrackSpec crack;
  crack.polyline_mm = {{870.0, 40.0}, {870.0, 300.0}, {940.0, 360.0},
                       {940.0, 650.0}};
  crack.opening_mm = 45.0;
  spec.crack = crack;
  return spec;
}

// Angle of a selected line after mapping through the recovered homography.
double warped_angle_deg(const Homography& h, const PolarLine& line) {
  const double c = std::cos(line.theta), s = std::sin(line.theta);
  const Point foot{line.rho * c, line.rho * s};
  const Point dir{-s, c};
  const Point a = h.apply(foot - 400.0 * dir);
  const Point b = h.apply(foot + 400.0 * dir);
  return std::atan2(b.y - a.y, b.x - a.x) * 180.0 / std::numbers::pi;
}

double angle_off_axis(double deg) {
  double a = std::fmod(std::abs(deg), 90.0);
  return std::min(a, 90.0 - a);
}

}  // namespace

TEST_CASE("fronto-parallel wall recovers the generator scale within 2%") {
  WallSpec spec = pipeline_wall(7);
  const SynthResult scene = generate(spec);
  const RectifyResult r =
      rectify_image(scene.predictions, pipeline_config(), spec.brick);
  CHECK(std::abs(r.scale.mm_per_px_x - spec.mm_per_px) / spec.mm_per_px < 0.02);
  CHECK(std::abs(r.scale.mm_per_px_y - spec.mm_per_px) / spec.mm_per_px < 0.02);

  // The recovered transform is close to a similarity: negligible projective
  // terms after normalization.
  CHECK(std::abs(r.homography.at(2, 0)) < 1e-4);
  CHECK(std::abs(r.homography.at(2, 1)) < 1e-4);
}

TEST_CASE("identity wall with no noise rectifies to a near-similarity") {
  WallSpec spec = pipeline_wall(3);
  spec.jitter_sigma_px = 0.0;
  spec.mortar_mm = 0.0;
  spec.crack.reset();
  const SynthResult scene = generate(spec);
  const RectifyResult r =
      rectify_image(scene.predictions, pipeline_config(), spec.brick);
  CHECK(std::abs(r.homography.at(2, 0)) < 1e-6);
  CHECK(std::abs(r.homography.at(2, 1)) < 1e-6);
}

TEST_CASE("warped wall pipeline recovers crack size and straightens lines") {
  WallSpec spec = pipeline_wall(21);
  spec.distortion = random_perspective(1600.0, 690.0, 0.25, 99);
  const SynthResult scene = generate(spec);
  const RectifyResult r =
      rectify_image(scene.predictions, pipeline_config(), spec.brick);
  const CrackMeasurement m = measure_cracks(r.warped, r.scale);
  const OracleDeltas deltas = oracle_check(scene.truth, r.scale, m);
  CHECK(deltas.worst_crack_delta() < 0.10);

  // Selected lines map to within 0.5 degrees of the axes.
  for (const PolarLine* line :
       {&r.lines.top, &r.lines.bottom, &r.lines.left, &r.lines.right}) {
    CHECK(angle_off_axis(warped_angle_deg(r.homography, *line)) < 0.5);
  }

  // Warped brick ratio median sits on the spec ratio within 2%.
  std::vector<double> ratios;
  for (const Instance& inst : r.warped.instances) {
    if (inst.label != ClassLabel::kBrick) continue;
    const double ratio = inst.bbox.width() / inst.bbox.height();
    if (ratio >= 1.5 && ratio <= 6.0) ratios.push_back(ratio);
  }
  REQUIRE(!ratios.empty());
  std::sort(ratios.begin(), ratios.end());
  const double median = ratios.size() % 2 == 1
                            ? ratios[ratios.size() / 2]
                            : 0.5 * (ratios[ratios.size() / 2 - 1] +
                                     ratios[ratios.size() / 2]);
  CHECK(std::abs(median - spec.brick.ratio()) / spec.brick.ratio() < 0.02);
}

TEST_CASE("a two-brick record cannot be rectified") {
  WallSpec spec = pipeline_wall(5);
  spec.crack.reset();
  SynthResult scene = generate(spec);
  ImageRecord few = scene.predictions;
  few.instances.resize(2);
  CHECK_THROWS_AS(rectify_image(few, pipeline_config(), spec.brick), Error);
}

TEST_CASE("oracle_check reports relative deltas") {
  WallTruth truth;
  truth.distortion = Homography::identity();
  truth.mm_per_px_x = 2.0;
  truth.mm_per_px_y = 2.0;
  truth.crack = CrackTruth{100.0, 200.0, 20.0};

  CrackMeasurement m;
  m.total_width_mm_exact = 105.0;
  m.total_height_mm_exact = 190.0;
  m.max_transverse_width_mm_exact = 20.0;
  const OracleDeltas d =
      oracle_check(truth, PixelScale::make(2.1, 2.1), m);
  CHECK(d.scale_x == doctest::Approx(0.05));
  CHECK(d.total_width == doctest::Approx(0.05));
  CHECK(d.total_height == doctest::Approx(0.05));
  CHECK(d.max_transverse == doctest::Approx(0.0));
  CHECK(d.pass(0.06));
  CHECK(!d.pass(0.04));
}
