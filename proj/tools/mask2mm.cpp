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
#include <CLI11.hpp>

#include <numbers>
#include <regex>

#include "mask2mm/cli.hpp"

namespace {

using mask2mm::RunConfig;

void add_common_flags(CLI::App* cmd, RunConfig& cfg, std::string& gt,
                      std::string& pred, std::string& out,
                      std::string& grid_spec, double& theta_step_deg) {
  cmd->add_option("--gt", gt, "Ground-truth annotation JSON");
  cmd->add_option("--pred", pred, "Prediction annotation JSON");
  cmd->add_option("--out", out, "Output directory")->default_val(".");
  cmd->add_option("--brick-width-mm", cfg.brick.face_width_mm,
                  "Brick face width in mm")
      ->default_val(220.0);
  cmd->add_option("--brick-height-mm", cfg.brick.face_height_mm,
                  "Brick face height in mm")
      ->default_val(60.0);
  cmd->add_option("--theta-step-deg", theta_step_deg,
                  "Hough theta bin size in degrees")
      ->default_val(1.0);
  cmd->add_option("--rho-step", cfg.hough.rho_step,
                  "Hough rho bin size in pixels")
      ->default_val(1.0);
  cmd->add_option("--thresh-v", cfg.hough.threshold_vertical,
                  "Vertical line vote threshold (0 = auto)");
  cmd->add_option("--thresh-h", cfg.hough.threshold_horizontal,
                  "Horizontal line vote threshold (0 = auto)");
  cmd->add_option("--grid-crop", grid_spec,
                  "Split each image into RxC cells first, e.g. 6x14");
  cmd->add_flag("--debug-render", cfg.debug_render,
                "Write line-overlay PNGs and rectification reports");
}

bool finalize_common(RunConfig& cfg, const std::string& gt,
                     const std::string& pred, const std::string& out,
                     const std::string& grid_spec, double theta_step_deg) {
  if (!gt.empty()) cfg.gt_path = gt;
  if (!pred.empty()) cfg.pred_path = pred;
  cfg.out_dir = out;
  cfg.hough.theta_step = theta_step_deg * std::numbers::pi / 180.0;
  if (!grid_spec.empty()) {
    std::smatch m;
    if (!std::regex_match(grid_spec, m, std::regex("(\\d+)[xX](\\d+)"))) {
      std::cerr << "error: --grid-crop expects RxC, e.g. 6x14\n";
      return false;
    }
    cfg.grid_crop_rc = {std::stoi(m[1]), std::stoi(m[2])};
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mask2mm: brick-anchored crack measurement and COCO scoring for "
      "masonry instance segmentation"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string gt, pred, out, grid_spec, references;
  double theta_step_deg = 1.0;
  bool transverse_count = false;

  CLI::App* measure = app.add_subcommand(
      "measure", "Rectify images and measure crack dimensions in mm");
  add_common_flags(measure, cfg, gt, pred, out, grid_spec, theta_step_deg);
  measure->add_option("--references", references,
                      "Reference measurements JSON for error statistics");
  measure->add_flag("--transverse-count", transverse_count,
                    "Use per-row pixel count instead of extent");

  CLI::App* eval =
      app.add_subcommand("eval", "Score predictions with the COCO protocol");
  add_common_flags(eval, cfg, gt, pred, out, grid_spec, theta_step_deg);

  CLI::App* lines =
      app.add_subcommand("lines", "Hough line detection debug output");
  add_common_flags(lines, cfg, gt, pred, out, grid_spec, theta_step_deg);

  std::string spec_path, out_gt = "gt.json", out_pred = "pred.json",
                         out_truth = "truth.json";
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  CLI::App* synth =
      app.add_subcommand("synth", "Generate a synthetic brick-wall scene");
  synth->add_option("--spec", spec_path, "Wall spec JSON")->required();
  synth->add_option("--out-gt", out_gt, "Ground-truth output path");
  synth->add_option("--out-pred", out_pred, "Prediction output path");
  synth->add_option("--out-truth", out_truth, "Truth output path");
  synth
      ->add_option("--seed", seed_override,
                   "Override the seed from the spec file")
      ->each([&seed_given](const std::string&) { seed_given = true; });

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    if (!seed_given) {
      return mask2mm::run_synth(spec_path, out_gt, out_pred, out_truth);
    }
    // Round-trip the spec with the new seed through a temp file-free path:
    // load, patch, regenerate.
    try {
      std::ifstream in(spec_path);
      if (!in) {
        std::cerr << "error: cannot open " << spec_path << "\n";
        return mask2mm::kExitParse;
      }
      nlohmann::json doc = nlohmann::json::parse(in);
      doc["seed"] = seed_override;
      mask2mm::WallSpec spec = mask2mm::wall_spec_from_json(doc);
      mask2mm::SynthResult result = mask2mm::generate(spec);
      mask2mm::save_dataset(out_gt, {result.ground_truth},
                            mask2mm::DatasetKind::kGroundTruth);
      mask2mm::save_dataset(out_pred, {result.predictions},
                            mask2mm::DatasetKind::kPredictions);
      std::ofstream truth_out(out_truth);
      truth_out << mask2mm::wall_truth_to_json(result.truth).dump(2) << "\n";
    } catch (const mask2mm::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return mask2mm::exit_code_for(e.kind());
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return mask2mm::kExitParse;
    }
    return mask2mm::kExitOk;
  }

  if (!finalize_common(cfg, gt, pred, out, grid_spec, theta_step_deg)) {
    return mask2mm::kExitParse;
  }
  if (transverse_count) cfg.transverse = mask2mm::TransverseMode::kPixelCount;
  if (!references.empty()) cfg.references_path = references;

  if (measure->parsed()) return mask2mm::run_measure(cfg);
  if (eval->parsed()) return mask2mm::run_eval(cfg);
  if (lines->parsed()) return mask2mm::run_lines(cfg);
  return mask2mm::kExitParse;
}
