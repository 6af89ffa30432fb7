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
#include <optional>

#include "mask2mm/cocoeval.hpp"
#include "mask2mm/measure.hpp"
#include "mask2mm/rectify.hpp"
#include "mask2mm/synthwall.hpp"

namespace mask2mm {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitRectification = 3;
inline constexpr int kExitMeasurement = 4;

struct RunConfig {
  std::optional<std::filesystem::path> gt_path;
  std::optional<std::filesystem::path> pred_path;
  std::optional<std::filesystem::path> references_path;
  BrickSpec brick;
  HoughConfig hough;
  std::filesystem::path out_dir = ".";
  bool debug_render = false;
  std::optional<std::pair<int, int>> grid_crop_rc;
  TransverseMode transverse = TransverseMode::kExtent;
};

// Batch measurement: rectifies and measures every image, continuing past
// per-image failures; writes <out>/measurements.json. Returns kExitOk only
// when no image failed.
int run_measure(const RunConfig& cfg);

// COCO scoring of predictions against ground truth;
// writes <out>/ap_report.json.
int run_eval(const RunConfig& cfg);

// Synthetic wall generation from a wall-spec JSON.
int run_synth(const std::filesystem::path& spec_path,
              const std::filesystem::path& out_gt,
              const std::filesystem::path& out_pred,
              const std::filesystem::path& out_truth);

// Hough debug: per image, accumulator PGM heatmap + detected-lines JSON
// (and an overlay PNG with --debug-render).
int run_lines(const RunConfig& cfg);

int exit_code_for(ErrorKind kind);

}  // namespace mask2mm
