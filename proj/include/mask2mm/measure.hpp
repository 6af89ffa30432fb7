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

#include <json.hpp>

#include "mask2mm/annotations.hpp"
#include "mask2mm/rectify.hpp"

namespace mask2mm {

// How the per-row transverse width is read off a crack mask: the
// leftmost-to-rightmost extent (interior gaps included) or the raw count of
// filled pixels in the row.
enum class TransverseMode { kExtent, kPixelCount };

struct CrackMeasurement {
  std::string image_id;
  long long total_width_px = 0;
  long long total_height_px = 0;
  long long max_transverse_width_px = 0;
  double total_width_mm_exact = 0.0;
  double total_height_mm_exact = 0.0;
  double max_transverse_width_mm_exact = 0.0;
  long long total_width_mm = 0;  // rounded to nearest mm, ties away from zero
  long long total_height_mm = 0;
  long long max_transverse_width_mm = 0;
  PixelScale scale;
};

// Total width/height span the extremes of all crack bboxes in the rectified
// record; the max transverse width is the widest per-row extent of any
// single crack's filled mask. Throws kNoCracks when the record has no crack
// instances.
CrackMeasurement measure_cracks(const ImageRecord& warped,
                                const PixelScale& scale,
                                TransverseMode mode = TransverseMode::kExtent);

struct ErrorReport {
  double mpe_signed = 0.0;  // 100/n * sum (a - f) / a
  double mape = 0.0;        // 100/n * sum |a - f| / a
  std::vector<std::pair<double, double>> pairs;  // (reference a, measured f)
};

// Mean percentage error over (reference, measured) pairs. Throws
// kDivisionByZero naming the offending pair when a reference is zero.
ErrorReport percentage_error(
    const std::vector<std::pair<double, double>>& pairs);

struct ReferenceEntry {
  std::string image_id;
  double total_width_mm = 0.0;
  double total_height_mm = 0.0;
  double max_transverse_width_mm = 0.0;
};

// Reference file: JSON list of {image_id, total_width_mm, total_height_mm,
// max_transverse_width_mm}.
std::vector<ReferenceEntry> load_references(const std::filesystem::path& path);

// Serializes measurements; with references present, appends one ErrorReport
// per metric. A reference naming an unknown image throws kAlignment.
nlohmann::json measurement_report(
    const std::vector<CrackMeasurement>& measurements,
    const std::vector<ReferenceEntry>* references);

}  // namespace mask2mm
