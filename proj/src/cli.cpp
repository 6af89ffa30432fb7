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
#include "mask2mm/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include "mask2mm/render.hpp"

namespace mask2mm {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse:
    case ErrorKind::kValidation:
    case ErrorKind::kIo:
    case ErrorKind::kAlignment:
    case ErrorKind::kOutOfBounds:
      return kExitParse;
    case ErrorKind::kInsufficientBricks:
    case ErrorKind::kInsufficientLines:
    case ErrorKind::kNoAnchorBricks:
    case ErrorKind::kDegenerateQuad:
    case ErrorKind::kNoIntersection:
    case ErrorKind::kProjection:
    case ErrorKind::kScaleMismatch:
      return kExitRectification;
    case ErrorKind::kNoCracks:
    case ErrorKind::kDivisionByZero:
      return kExitMeasurement;
  }
  return kExitParse;
}

namespace {

std::string safe_name(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') {
      c = '_';
    }
  }
  return out;
}

void write_json_file(const std::filesystem::path& path,
                     const nlohmann::json& doc) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot write " + path.string());
  }
  out << doc.dump(2) << "\n";
}

std::vector<ImageRecord> load_input_records(const RunConfig& cfg,
                                            DatasetKind* kind_out) {
  const bool use_pred = cfg.pred_path.has_value();
  if (!use_pred && !cfg.gt_path.has_value()) {
    throw Error(ErrorKind::kValidation, "no annotation file given");
  }
  const DatasetKind kind =
      use_pred ? DatasetKind::kPredictions : DatasetKind::kGroundTruth;
  if (kind_out) *kind_out = kind;
  std::vector<ImageRecord> records =
      load_dataset(use_pred ? *cfg.pred_path : *cfg.gt_path, kind);
  if (cfg.grid_crop_rc) {
    std::vector<ImageRecord> cropped;
    for (const ImageRecord& rec : records) {
      for (ImageRecord& cell :
           grid_crop(rec, cfg.grid_crop_rc->first, cfg.grid_crop_rc->second)) {
        cropped.push_back(std::move(cell));
      }
    }
    records = std::move(cropped);
  }
  return records;
}

std::vector<PolygonMask> debug_masks(const ImageRecord& record) {
  std::vector<PolygonMask> masks;
  for (const Instance& inst : record.instances) {
    if (inst.label != ClassLabel::kBrick) continue;
    for (const PolygonMask& part : inst.parts) masks.push_back(part);
  }
  if (masks.empty()) {
    for (const Instance& inst : record.instances) {
      for (const PolygonMask& part : inst.parts) masks.push_back(part);
    }
  }
  return masks;
}

struct MeasureOutcome {
  std::string image_id;
  std::optional<CrackMeasurement> measurement;
  std::optional<RectifyResult> rectified;
  ErrorKind error = ErrorKind::kParse;
  std::string message;
};

}  // namespace

int run_measure(const RunConfig& cfg) {
  std::vector<ImageRecord> records;
  std::vector<ReferenceEntry> references;
  try {
    records = load_input_records(cfg, nullptr);
    if (cfg.references_path) {
      references = load_references(*cfg.references_path);
    }
    std::filesystem::create_directories(cfg.out_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }

  const int n = static_cast<int>(records.size());
  std::vector<MeasureOutcome> outcomes(n);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    MeasureOutcome& out = outcomes[i];
    out.image_id = records[i].image_id;
    try {
      RectifyResult rectified = rectify_image(records[i], cfg.hough, cfg.brick);
      out.measurement =
          measure_cracks(rectified.warped, rectified.scale, cfg.transverse);
      out.rectified = std::move(rectified);
    } catch (const Error& e) {
      out.error = e.kind();
      out.message = e.what();
    }
  }

  std::sort(outcomes.begin(), outcomes.end(),
            [](const MeasureOutcome& a, const MeasureOutcome& b) {
              return a.image_id < b.image_id;
            });

  std::vector<CrackMeasurement> measurements;
  nlohmann::json failures = nlohmann::json::array();
  bool any_rectify_failure = false, any_measure_failure = false;
  for (const MeasureOutcome& out : outcomes) {
    if (out.measurement) {
      measurements.push_back(*out.measurement);
      continue;
    }
    failures.push_back({{"image_id", out.image_id},
                        {"error", to_string(out.error)},
                        {"message", out.message}});
    if (exit_code_for(out.error) == kExitMeasurement) {
      any_measure_failure = true;
    } else {
      any_rectify_failure = true;
    }
  }

  nlohmann::json doc;
  try {
    doc = measurement_report(measurements,
                             references.empty() ? nullptr : &references);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  doc["failures"] = std::move(failures);
  write_json_file(cfg.out_dir / "measurements.json", doc);

  if (cfg.debug_render) {
    for (const MeasureOutcome& out : outcomes) {
      if (!out.rectified) continue;
      const std::string stem = safe_name(out.image_id);
      write_json_file(cfg.out_dir / (stem + "_rectify.json"),
                      rectify_report_json(*out.rectified));
    }
    for (const ImageRecord& rec : records) {
      const auto it = std::find_if(outcomes.begin(), outcomes.end(),
                                   [&rec](const MeasureOutcome& o) {
                                     return o.image_id == rec.image_id;
                                   });
      if (it == outcomes.end() || !it->rectified) continue;
      const std::vector<PolygonMask> masks = debug_masks(rec);
      const BinaryGrid edges = rasterize_edges(masks, rec.width, rec.height);
      const HoughConfig resolved = resolve_thresholds(cfg.hough, edges);
      const LineSets lines =
          extract_lines(accumulate(edges, resolved), resolved);
      write_png(cfg.out_dir / (safe_name(rec.image_id) + "_lines.png"),
                render_line_overlay(edges, lines.horizontal, lines.vertical));
    }
  }

  if (any_rectify_failure) return kExitRectification;
  if (any_measure_failure) return kExitMeasurement;
  return kExitOk;
}

int run_eval(const RunConfig& cfg) {
  try {
    if (!cfg.gt_path || !cfg.pred_path) {
      throw Error(ErrorKind::kValidation, "eval needs both --gt and --pred");
    }
    const auto gt = load_dataset(*cfg.gt_path, DatasetKind::kGroundTruth);
    const auto preds = load_dataset(*cfg.pred_path, DatasetKind::kPredictions);
    const APReport report = evaluate(gt, preds, EvalConfig::defaults());
    std::filesystem::create_directories(cfg.out_dir);
    write_json_file(cfg.out_dir / "ap_report.json", ap_report_json(report));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  return kExitOk;
}

int run_synth(const std::filesystem::path& spec_path,
              const std::filesystem::path& out_gt,
              const std::filesystem::path& out_pred,
              const std::filesystem::path& out_truth) {
  try {
    std::ifstream in(spec_path);
    if (!in) {
      throw Error(ErrorKind::kIo, "cannot open " + spec_path.string());
    }
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kParse, spec_path.string() + ": " + e.what());
    }
    const WallSpec spec = wall_spec_from_json(doc);
    const SynthResult result = generate(spec);
    save_dataset(out_gt, {result.ground_truth}, DatasetKind::kGroundTruth);
    save_dataset(out_pred, {result.predictions}, DatasetKind::kPredictions);
    write_json_file(out_truth, wall_truth_to_json(result.truth));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  return kExitOk;
}

int run_lines(const RunConfig& cfg) {
  try {
    const std::vector<ImageRecord> records = load_input_records(cfg, nullptr);
    std::filesystem::create_directories(cfg.out_dir);
    for (const ImageRecord& rec : records) {
      const std::vector<PolygonMask> masks = debug_masks(rec);
      const BinaryGrid edges = rasterize_edges(masks, rec.width, rec.height);
      const HoughConfig resolved = resolve_thresholds(cfg.hough, edges);
      const HoughAccumulator acc = accumulate(edges, resolved);
      const LineSets lines = extract_lines(acc, resolved);

      const std::string stem = safe_name(rec.image_id);
      write_accumulator_pgm(cfg.out_dir / (stem + "_accumulator.pgm"), acc);

      nlohmann::json out = nlohmann::json::array();
      auto append = [&out](const std::vector<DetectedLine>& set,
                           const char* cls) {
        for (const DetectedLine& d : set) {
          out.push_back({{"rho", d.line.rho},
                         {"theta_deg", d.line.theta * 180.0 / std::numbers::pi},
                         {"votes", d.votes},
                         {"class", cls}});
        }
      };
      append(lines.horizontal, "horizontal");
      append(lines.vertical, "vertical");
      write_json_file(cfg.out_dir / (stem + "_lines.json"), out);

      if (cfg.debug_render) {
        write_png(cfg.out_dir / (stem + "_lines.png"),
                  render_line_overlay(edges, lines.horizontal, lines.vertical));
      }
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
  return kExitOk;
}

}  // namespace mask2mm
