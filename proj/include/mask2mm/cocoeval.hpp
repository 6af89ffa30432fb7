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

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mask2mm/annotations.hpp"

namespace mask2mm {

enum class IoUKind { kBox, kMask };

struct EvalConfig {
  // 10 thresholds, 0.50 to 0.95 in steps of 0.05.
  std::vector<double> iou_thresholds;
  // 101 recall levels, 0.00 to 1.00 in steps of 0.01 (count is fixed).
  int recall_levels = 101;
  IoUKind iou_kind = IoUKind::kBox;

  static EvalConfig defaults();
  void validate() const;
};

double iou_box(const Box& a, const Box& b);

// Box or mask overlap of two instances. Mask IoU rasterizes both instances
// at the native image resolution.
double iou_instance(const Instance& a, const Instance& b, IoUKind kind,
                    int width, int height);

struct MatchResult {
  std::vector<int> pred_to_gt;       // per prediction: matched GT index or -1
  std::vector<std::uint8_t> gt_matched;
  int tp = 0, fp = 0, fn = 0;
};

// Greedy COCO matching for one image and category: predictions in
// descending score order each take the unmatched ground truth with the
// highest IoU at or above the threshold.
MatchResult match_greedy(const std::vector<Instance>& preds,
                         const std::vector<Instance>& gts, double threshold,
                         IoUKind kind, int width, int height);

// One dataset-wide scored detection with its per-threshold match outcome.
struct ScoredDetection {
  double score = 0.0;
  bool tp = false;
  // Canonical tie-break key: input permutation cannot change the order.
  std::string image_id;
  int instance_index = 0;
};

// 101-point interpolated precision for one (category, threshold):
// p(r) = max precision at recall >= r; non-increasing in recall.
std::vector<double> interpolated_precision(std::vector<ScoredDetection> dets,
                                           int total_gt, int recall_levels);

// AP = mean of the interpolated precision over the recall levels.
double average_precision(std::vector<ScoredDetection> dets, int total_gt,
                         int recall_levels);

struct APEntry {
  double ap_box = 0.0, ap_box_50 = 0.0, ap_box_75 = 0.0;
  double ap_mask = 0.0, ap_mask_50 = 0.0, ap_mask_75 = 0.0;
};

struct ThresholdCounts {
  double threshold = 0.0;
  long long tp = 0, fp = 0, fn = 0;
};

struct APReport {
  std::map<ClassLabel, APEntry> per_category;  // categories with >= 1 GT
  APEntry all;                                 // mean over those categories
  std::vector<ThresholdCounts> counts_box;
  std::vector<ThresholdCounts> counts_mask;
};

// Full protocol over both IoU kinds. Prediction records must align with
// ground-truth image ids and dimensions (throws kAlignment otherwise).
APReport evaluate(const std::vector<ImageRecord>& gt,
                  const std::vector<ImageRecord>& preds,
                  const EvalConfig& cfg);

nlohmann::json ap_report_json(const APReport& report);

}  // namespace mask2mm
