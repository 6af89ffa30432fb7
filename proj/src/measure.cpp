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
#include "mask2mm/measure.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>

#include "mask2mm/raster.hpp"

namespace mask2mm {

CrackMeasurement measure_cracks(const ImageRecord& warped,
                                const PixelScale& scale, TransverseMode mode) {
  double x1 = std::numeric_limits<double>::infinity();
  double y1 = std::numeric_limits<double>::infinity();
  double x2 = -std::numeric_limits<double>::infinity();
  double y2 = -std::numeric_limits<double>::infinity();
  long long max_transverse = 0;
  bool any = false;

  for (const Instance& inst : warped.instances) {
    if (inst.label != ClassLabel::kCrack) continue;
    any = true;
    x1 = std::min(x1, inst.bbox.x1);
    y1 = std::min(y1, inst.bbox.y1);
    x2 = std::max(x2, inst.bbox.x2);
    y2 = std::max(y2, inst.bbox.y2);

    const BinaryGrid grid =
        rasterize_parts(inst.parts, warped.width, warped.height);
    for (int y = 0; y < grid.height; ++y) {
      int leftmost = -1, rightmost = -1, count = 0;
      for (int x = 0; x < grid.width; ++x) {
        if (!grid.at(x, y)) continue;
        if (leftmost < 0) leftmost = x;
        rightmost = x;
        ++count;
      }
      if (leftmost < 0) continue;
      const long long row_width =
          mode == TransverseMode::kExtent ? rightmost - leftmost + 1 : count;
      max_transverse = std::max(max_transverse, row_width);
    }
  }
  if (!any) {
    throw Error(ErrorKind::kNoCracks,
                "image " + warped.image_id + ": no crack instances");
  }

  CrackMeasurement m;
  m.image_id = warped.image_id;
  m.scale = scale;
  m.total_width_px = std::llround(x2 - x1);
  m.total_height_px = std::llround(y2 - y1);
  m.max_transverse_width_px = max_transverse;
  m.total_width_mm_exact = m.total_width_px * scale.mm_per_px_x;
  m.total_height_mm_exact = m.total_height_px * scale.mm_per_px_y;
  m.max_transverse_width_mm_exact =
      m.max_transverse_width_px * scale.mm_per_px_x;
  m.total_width_mm = std::llround(m.total_width_mm_exact);
  m.total_height_mm = std::llround(m.total_height_mm_exact);
  m.max_transverse_width_mm = std::llround(m.max_transverse_width_mm_exact);
  return m;
}

ErrorReport percentage_error(
    const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.empty()) {
    throw Error(ErrorKind::kValidation, "percentage_error: no pairs");
  }
  ErrorReport report;
  report.pairs = pairs;
  double signed_sum = 0.0, abs_sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [reference, measured] = pairs[i];
    if (reference == 0.0) {
      throw Error(ErrorKind::kDivisionByZero,
                  "zero reference value at pair " + std::to_string(i));
    }
    const double term = (reference - measured) / reference;
    signed_sum += term;
    abs_sum += std::abs(term);
  }
  report.mpe_signed = 100.0 * signed_sum / pairs.size();
  report.mape = 100.0 * abs_sum / pairs.size();
  return report;
}

std::vector<ReferenceEntry> load_references(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open " + path.string());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  if (!doc.is_array()) {
    throw Error(ErrorKind::kParse,
                path.string() + ": expected a JSON list of references");
  }
  std::vector<ReferenceEntry> refs;
  for (const nlohmann::json& entry : doc) {
    try {
      ReferenceEntry r;
      r.image_id = entry.at("image_id").is_string()
                       ? entry.at("image_id").get<std::string>()
                       : std::to_string(entry.at("image_id").get<long long>());
      r.total_width_mm = entry.at("total_width_mm").get<double>();
      r.total_height_mm = entry.at("total_height_mm").get<double>();
      r.max_transverse_width_mm =
          entry.at("max_transverse_width_mm").get<double>();
      refs.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kParse,
                  path.string() + ": bad reference entry: " + e.what());
    }
  }
  return refs;
}

namespace {

nlohmann::json error_report_json(const ErrorReport& report) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, f] : report.pairs) pairs.push_back({a, f});
  return {{"mpe_signed", report.mpe_signed},
          {"mape", report.mape},
          {"pairs", std::move(pairs)}};
}

}  // namespace

nlohmann::json measurement_report(
    const std::vector<CrackMeasurement>& measurements,
    const std::vector<ReferenceEntry>* references) {
  std::vector<const CrackMeasurement*> ordered;
  ordered.reserve(measurements.size());
  for (const CrackMeasurement& m : measurements) ordered.push_back(&m);
  std::sort(ordered.begin(), ordered.end(),
            [](const CrackMeasurement* a, const CrackMeasurement* b) {
              return a->image_id < b->image_id;
            });

  nlohmann::json items = nlohmann::json::array();
  for (const CrackMeasurement* m : ordered) {
    items.push_back(
        {{"image_id", m->image_id},
         {"scale",
          {{"mm_per_px_x", m->scale.mm_per_px_x},
           {"mm_per_px_y", m->scale.mm_per_px_y}}},
         {"cracks",
          {{"total_width_mm", m->total_width_mm},
           {"total_height_mm", m->total_height_mm},
           {"max_transverse_width_mm", m->max_transverse_width_mm},
           {"total_width_mm_exact", m->total_width_mm_exact},
           {"total_height_mm_exact", m->total_height_mm_exact},
           {"max_transverse_width_mm_exact", m->max_transverse_width_mm_exact},
           {"total_width_px", m->total_width_px},
           {"total_height_px", m->total_height_px},
           {"max_transverse_width_px", m->max_transverse_width_px}}}});
  }
  nlohmann::json doc{{"measurements", std::move(items)}};

  if (references && !references->empty()) {
    std::map<std::string, const CrackMeasurement*> by_id;
    for (const CrackMeasurement* m : ordered) by_id[m->image_id] = m;

    std::vector<std::pair<double, double>> width_pairs, height_pairs,
        transverse_pairs;
    for (const ReferenceEntry& ref : *references) {
      auto it = by_id.find(ref.image_id);
      if (it == by_id.end()) {
        throw Error(ErrorKind::kAlignment,
                    "reference names unknown image " + ref.image_id);
      }
      const CrackMeasurement* m = it->second;
      width_pairs.emplace_back(ref.total_width_mm,
                               static_cast<double>(m->total_width_mm));
      height_pairs.emplace_back(ref.total_height_mm,
                                static_cast<double>(m->total_height_mm));
      transverse_pairs.emplace_back(
          ref.max_transverse_width_mm,
          static_cast<double>(m->max_transverse_width_mm));
    }
    doc["errors"] = {
        {"total_width_mm", error_report_json(percentage_error(width_pairs))},
        {"total_height_mm", error_report_json(percentage_error(height_pairs))},
        {"max_transverse_width_mm",
         error_report_json(percentage_error(transverse_pairs))}};
  }
  return doc;
}

}  // namespace mask2mm
