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
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mask2mm/geometry.hpp"

namespace mask2mm {

enum class ClassLabel {
  kBrick = 1,
  kBrokenBrick = 2,
  kCrack = 3,
  kSpalling = 4,
  kPlant = 5,
};

constexpr int kNumClassLabels = 5;

// Canonical lowercase name ("brick", "broken_brick", ...).
const char* to_string(ClassLabel label);
int class_id(ClassLabel label);
ClassLabel class_from_id(int id);                 // throws kParse
ClassLabel class_from_name(std::string_view name);  // accepts plural aliases

// One segmented object. Multi-polygon segmentations are kept as separate
// parts of a single instance; the bbox spans all parts.
struct Instance {
  ClassLabel label = ClassLabel::kBrick;
  std::vector<PolygonMask> parts;
  std::optional<double> score;  // absent for ground truth
  Box bbox;
};

struct ImageRecord {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<Instance> instances;
};

enum class DatasetKind { kGroundTruth, kPredictions };

// Validates one polygon part against the image bounds; throws kValidation.
void validate_polygon(const PolygonMask& mask, int width, int height,
                      const std::string& context);

// Builds a validated instance; bbox is recomputed from the vertices.
Instance make_instance(ClassLabel label, std::vector<PolygonMask> parts,
                       std::optional<double> score, int width, int height,
                       const std::string& context);

// COCO-style JSON: "images", "annotations" (polygon segmentation, optional
// score), "categories". Ground truth must not carry scores; predictions must.
std::vector<ImageRecord> load_dataset(const std::filesystem::path& path,
                                      DatasetKind kind);
nlohmann::json dataset_to_json(const std::vector<ImageRecord>& records,
                               DatasetKind kind);
void save_dataset(const std::filesystem::path& path,
                  const std::vector<ImageRecord>& records, DatasetKind kind);

// Splits a record into rows x cols sub-records of equal size (remainder
// pixels go to the last row/column). Instance polygons are clipped to each
// cell and shifted to cell-local coordinates; clipped instances whose filled
// area drops below min_area_px are dropped. Sub-record ids are
// "<id>_r<row>c<col>" with 1-based indices.
std::vector<ImageRecord> grid_crop(const ImageRecord& record, int rows,
                                   int cols, double min_area_px = 4.0);

// Sutherland-Hodgman clip of a polygon against an axis-aligned rectangle.
PolygonMask clip_polygon(const PolygonMask& mask, const Box& clip);

}  // namespace mask2mm
