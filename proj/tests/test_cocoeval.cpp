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
#include <random>

#include "mask2mm/cocoeval.hpp"
#include "oracles.hpp"

using namespace mask2mm;

namespace {

Instance boxed(ClassLabel label, double x0, double y0, double w, double h,
               int img_w, int img_h, std::optional<double> score) {
  const PolygonMask poly{
      {{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + h}, {x0, y0 + h}}};
  return make_instance(label, {poly}, score, img_w, img_h, "t");
}

// Random micro-dataset: a handful of images, categories, and axis-aligned
// rectangle instances with jittered prediction copies and decoys.
struct MicroDataset {
  std::vector<ImageRecord> gt;
  std::vector<ImageRecord> preds;
};

MicroDataset random_micro_dataset(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_images(1, 5), n_inst(0, 10),
      cat_pick(1, 3);
  std::uniform_real_distribution<double> coord(2.0, 40.0), size(3.0, 18.0),
      jitter(-4.0, 4.0), score(0.05, 0.95), coin(0.0, 1.0);
  const int kW = 64, kH = 64;

  MicroDataset data;
  const int images = n_images(rng);
  for (int i = 0; i < images; ++i) {
    ImageRecord gt_rec, pred_rec;
    gt_rec.image_id = pred_rec.image_id = "img_" + std::to_string(i);
    gt_rec.width = pred_rec.width = kW;
    gt_rec.height = pred_rec.height = kH;

    const int instances = n_inst(rng);
    for (int k = 0; k < instances; ++k) {
      const ClassLabel label = class_from_id(cat_pick(rng));
      const double x = coord(rng), y = coord(rng);
      const double w = size(rng), h = size(rng);
      gt_rec.instances.push_back(
          boxed(label, x, y, w, h, kW, kH, std::nullopt));

      if (coin(rng) < 0.8) {  // jittered detection of this object
        const double px = std::clamp(x + jitter(rng), 0.0, 45.0);
        const double py = std::clamp(y + jitter(rng), 0.0, 45.0);
        pred_rec.instances.push_back(
            boxed(label, px, py, w, h, kW, kH, score(rng)));
      }
      if (coin(rng) < 0.3) {  // decoy detection somewhere else
        pred_rec.instances.push_back(boxed(class_from_id(cat_pick(rng)),
                                           coord(rng), coord(rng), size(rng),
                                           size(rng), kW, kH, score(rng)));
      }
    }
    data.gt.push_back(std::move(gt_rec));
    data.preds.push_back(std::move(pred_rec));
  }
  return data;
}

std::vector<ImageRecord> as_perfect_predictions(
    const std::vector<ImageRecord>& gt) {
  std::vector<ImageRecord> preds = gt;
  for (ImageRecord& rec : preds) {
    for (Instance& inst : rec.instances) inst.score = 1.0;
  }
  return preds;
}

}  // namespace

TEST_CASE("iou of boxes") {
  const Box a{0, 0, 10, 10};
  CHECK(iou_box(a, a) == doctest::Approx(1.0));
  CHECK(iou_box(a, Box{20, 20, 30, 30}) == 0.0);
  CHECK(iou_box(a, Box{5, 0, 15, 10}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("mask IoU of a polygon with itself is 1") {
  const Instance inst =
      boxed(ClassLabel::kBrick, 3, 4, 12, 7, 32, 32, std::nullopt);
  CHECK(iou_instance(inst, inst, IoUKind::kMask, 32, 32) == 1.0);
}

TEST_CASE("match_greedy basics") {
  const int kW = 64, kH = 64;
  SUBCASE("perfect match") {
    const auto gt = boxed(ClassLabel::kCrack, 5, 5, 10, 10, kW, kH, std::nullopt);
    const auto pred = boxed(ClassLabel::kCrack, 5, 5, 10, 10, kW, kH, 0.9);
    const MatchResult r = match_greedy({pred}, {gt}, 0.99, IoUKind::kBox, kW, kH);
    CHECK(r.tp == 1);
    CHECK(r.fp == 0);
    CHECK(r.fn == 0);
  }
  SUBCASE("no predictions") {
    const auto g1 = boxed(ClassLabel::kCrack, 5, 5, 10, 10, kW, kH, std::nullopt);
    const auto g2 = boxed(ClassLabel::kCrack, 30, 30, 8, 8, kW, kH, std::nullopt);
    const MatchResult r = match_greedy({}, {g1, g2}, 0.5, IoUKind::kBox, kW, kH);
    CHECK(r.tp == 0);
    CHECK(r.fp == 0);
    CHECK(r.fn == 2);
  }
  SUBCASE("greedy rule matches a hand-built brute force") {
    // 3 preds, 2 gts: simulate the definition by hand over the IoU table.
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> coord(0.0, 30.0), size(4.0, 20.0),
        sc(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<Instance> gts, preds;
      for (int g = 0; g < 2; ++g) {
        gts.push_back(boxed(ClassLabel::kBrick, coord(rng), coord(rng),
                            size(rng), size(rng), kW, kH, std::nullopt));
      }
      for (int p = 0; p < 3; ++p) {
        preds.push_back(boxed(ClassLabel::kBrick, coord(rng), coord(rng),
                              size(rng), size(rng), kW, kH, sc(rng)));
      }
      const double threshold = 0.3;
      const MatchResult got =
          match_greedy(preds, gts, threshold, IoUKind::kBox, kW, kH);

      // Independent simulation of the rule.
      std::vector<int> order{0, 1, 2};
      std::stable_sort(order.begin(), order.end(), [&preds](int a, int b) {
        return *preds[a].score > *preds[b].score;
      });
      std::vector<bool> taken(gts.size(), false);
      int tp = 0;
      std::vector<int> want_match(preds.size(), -1);
      for (int p : order) {
        int best = -1;
        double best_v = -1.0;
        for (std::size_t g = 0; g < gts.size(); ++g) {
          if (taken[g]) continue;
          const double v = oracle::naive_iou(preds[p], gts[g], IoUKind::kBox,
                                             kW, kH);
          if (v >= threshold && v > best_v) {
            best_v = v;
            best = static_cast<int>(g);
          }
        }
        if (best >= 0) {
          taken[best] = true;
          want_match[p] = best;
          ++tp;
        }
      }
      CHECK(got.tp == tp);
      CHECK(got.pred_to_gt == want_match);
    }
  }
}

TEST_CASE("interpolated precision curve is non-increasing") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> sc(0.0, 1.0), coin(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<ScoredDetection> dets;
    int tp_count = 0;
    for (int i = 0; i < 20; ++i) {
      ScoredDetection d;
      d.score = sc(rng);
      d.tp = coin(rng) < 0.5;
      d.image_id = "img";
      d.instance_index = i;
      tp_count += d.tp;
      dets.push_back(d);
    }
    const auto curve =
        interpolated_precision(dets, std::max(tp_count, 1), 101);
    for (std::size_t i = 1; i < curve.size(); ++i) {
      CHECK(curve[i] <= curve[i - 1]);
    }
  }
}

TEST_CASE("average precision on the three-detection example") {
  // 2 GT; detections TP(.9), FP(.8), TP(.7): precision at the recall
  // levels is 1.0 up to 0.5 and 2/3 beyond.
  std::vector<ScoredDetection> dets;
  dets.push_back({0.9, true, "a", 0});
  dets.push_back({0.8, false, "a", 1});
  dets.push_back({0.7, true, "a", 2});
  const double ap = average_precision(dets, 2, 101);
  const double expect = (51.0 * 1.0 + 50.0 * (2.0 / 3.0)) / 101.0;
  CHECK(ap == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("evaluate perfect and empty predictions") {
  std::mt19937_64 rng(123);
  const MicroDataset data = random_micro_dataset(rng);
  const EvalConfig cfg = EvalConfig::defaults();

  SUBCASE("perfect predictions score 1") {
    const APReport report =
        evaluate(data.gt, as_perfect_predictions(data.gt), cfg);
    for (const auto& [label, entry] : report.per_category) {
      CHECK(entry.ap_box == doctest::Approx(1.0));
      CHECK(entry.ap_mask == doctest::Approx(1.0));
      CHECK(entry.ap_box_50 == doctest::Approx(1.0));
      CHECK(entry.ap_mask_75 == doctest::Approx(1.0));
    }
    CHECK(report.all.ap_box == doctest::Approx(1.0));
  }

  SUBCASE("no predictions score 0") {
    std::vector<ImageRecord> empty = data.gt;
    for (ImageRecord& rec : empty) rec.instances.clear();
    const APReport report = evaluate(data.gt, empty, cfg);
    CHECK(report.all.ap_box == 0.0);
    CHECK(report.all.ap_mask == 0.0);
  }
}

TEST_CASE("evaluate equals the naive protocol oracle") {
  std::mt19937_64 rng(321);
  const EvalConfig cfg = EvalConfig::defaults();
  for (int trial = 0; trial < 8; ++trial) {
    const MicroDataset data = random_micro_dataset(rng);
    const APReport got = evaluate(data.gt, data.preds, cfg);
    for (IoUKind kind : {IoUKind::kBox, IoUKind::kMask}) {
      const auto want =
          oracle::naive_evaluate(data.gt, data.preds, cfg.iou_thresholds, kind);
      REQUIRE(got.per_category.size() == want.size());
      for (const auto& [label, entry] : want) {
        const APEntry& g = got.per_category.at(label);
        if (kind == IoUKind::kBox) {
          CHECK(std::abs(g.ap_box - entry.ap) < 1e-12);
          CHECK(std::abs(g.ap_box_50 - entry.ap50) < 1e-12);
          CHECK(std::abs(g.ap_box_75 - entry.ap75) < 1e-12);
        } else {
          CHECK(std::abs(g.ap_mask - entry.ap) < 1e-12);
          CHECK(std::abs(g.ap_mask_50 - entry.ap50) < 1e-12);
          CHECK(std::abs(g.ap_mask_75 - entry.ap75) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("evaluate is invariant to score scaling and input order") {
  std::mt19937_64 rng(777);
  const MicroDataset data = random_micro_dataset(rng);
  const EvalConfig cfg = EvalConfig::defaults();
  const nlohmann::json base = ap_report_json(evaluate(data.gt, data.preds, cfg));

  SUBCASE("scaling scores leaves the report bit-identical") {
    std::vector<ImageRecord> scaled = data.preds;
    for (ImageRecord& rec : scaled) {
      for (Instance& inst : rec.instances) inst.score = *inst.score * 0.5;
    }
    CHECK(ap_report_json(evaluate(data.gt, scaled, cfg)).dump() == base.dump());
  }

  SUBCASE("permuting prediction order leaves the report bit-identical") {
    std::vector<ImageRecord> shuffled = data.preds;
    for (ImageRecord& rec : shuffled) {
      std::shuffle(rec.instances.begin(), rec.instances.end(), rng);
    }
    std::reverse(shuffled.begin(), shuffled.end());
    CHECK(ap_report_json(evaluate(data.gt, shuffled, cfg)).dump() ==
          base.dump());
  }
}

TEST_CASE("evaluate rejects misaligned predictions") {
  std::mt19937_64 rng(31);
  const MicroDataset data = random_micro_dataset(rng);
  std::vector<ImageRecord> preds = data.preds;
  preds[0].image_id = "unknown_image";
  CHECK_THROWS_AS(evaluate(data.gt, preds, EvalConfig::defaults()), Error);
}
