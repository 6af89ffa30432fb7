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
#include "mask2mm/cocoeval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mask2mm/raster.hpp"

namespace mask2mm {

EvalConfig EvalConfig::defaults() {
  EvalConfig cfg;
  for (int i = 0; i < 10; ++i) cfg.iou_thresholds.push_back(0.5 + 0.05 * i);
  return cfg;
}

void EvalConfig::validate() const {
  if (iou_thresholds.empty()) {
    throw Error(ErrorKind::kValidation, "no IoU thresholds configured");
  }
  double prev = 0.0;
  for (double t : iou_thresholds) {
    if (!(t > prev) || t > 1.0) {
      throw Error(ErrorKind::kValidation,
                  "IoU thresholds must be strictly increasing in (0, 1]");
    }
    prev = t;
  }
  if (recall_levels != 101) {
    throw Error(ErrorKind::kValidation, "the protocol uses 101 recall levels");
  }
}

double iou_box(const Box& a, const Box& b) {
  const double ix = std::max(
      0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double iy = std::max(
      0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

double iou_grids(const BinaryGrid& a, const BinaryGrid& b) {
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    inter += a.cells[i] & b.cells[i];
    uni += a.cells[i] | b.cells[i];
  }
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

// Content-based total order so results cannot depend on the order
// annotations appear in the input file.
int compare_content(const Instance& a, const Instance& b) {
  auto cmp = [](double x, double y) { return x < y ? -1 : (x > y ? 1 : 0); };
  if (a.label != b.label) return a.label < b.label ? -1 : 1;
  if (int c = cmp(a.bbox.x1, b.bbox.x1)) return c;
  if (int c = cmp(a.bbox.y1, b.bbox.y1)) return c;
  if (int c = cmp(a.bbox.x2, b.bbox.x2)) return c;
  if (int c = cmp(a.bbox.y2, b.bbox.y2)) return c;
  if (a.parts.size() != b.parts.size()) {
    return a.parts.size() < b.parts.size() ? -1 : 1;
  }
  for (std::size_t p = 0; p < a.parts.size(); ++p) {
    const auto& va = a.parts[p].vertices;
    const auto& vb = b.parts[p].vertices;
    if (va.size() != vb.size()) return va.size() < vb.size() ? -1 : 1;
    for (std::size_t i = 0; i < va.size(); ++i) {
      if (int c = cmp(va[i].x, vb[i].x)) return c;
      if (int c = cmp(va[i].y, vb[i].y)) return c;
    }
  }
  return 0;
}

// Greedy matching over a precomputed IoU matrix; predictions must already
// be in processing order.
MatchResult greedy_on_matrix(const std::vector<double>& iou, int n_preds,
                             int n_gts, double threshold) {
  MatchResult result;
  result.pred_to_gt.assign(n_preds, -1);
  result.gt_matched.assign(n_gts, 0);
  for (int p = 0; p < n_preds; ++p) {
    int best_gt = -1;
    double best_iou = threshold;
    for (int g = 0; g < n_gts; ++g) {
      if (result.gt_matched[g]) continue;
      const double v = iou[static_cast<std::size_t>(p) * n_gts + g];
      if (v > best_iou || (v == best_iou && v >= threshold && best_gt < 0)) {
        best_iou = v;
        best_gt = g;
      }
    }
    if (best_gt >= 0) {
      result.pred_to_gt[p] = best_gt;
      result.gt_matched[best_gt] = 1;
      ++result.tp;
    } else {
      ++result.fp;
    }
  }
  result.fn = n_gts - result.tp;
  return result;
}

}  // namespace

double iou_instance(const Instance& a, const Instance& b, IoUKind kind,
                    int width, int height) {
  if (kind == IoUKind::kBox) return iou_box(a.bbox, b.bbox);
  const BinaryGrid ga = rasterize_parts(a.parts, width, height);
  const BinaryGrid gb = rasterize_parts(b.parts, width, height);
  return iou_grids(ga, gb);
}

MatchResult match_greedy(const std::vector<Instance>& preds,
                         const std::vector<Instance>& gts, double threshold,
                         IoUKind kind, int width, int height) {
  for (const Instance& p : preds) {
    if (!p.score) {
      throw Error(ErrorKind::kValidation,
                  "match_greedy: prediction without score");
    }
  }
  std::vector<int> order(preds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&preds](int a, int b) {
    return *preds[a].score > *preds[b].score;
  });

  std::vector<double> iou(preds.size() * gts.size(), 0.0);
  for (std::size_t p = 0; p < preds.size(); ++p) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      iou[p * gts.size() + g] =
          iou_instance(preds[order[p]], gts[g], kind, width, height);
    }
  }
  MatchResult sorted_result =
      greedy_on_matrix(iou, static_cast<int>(preds.size()),
                       static_cast<int>(gts.size()), threshold);

  MatchResult result = sorted_result;
  for (std::size_t p = 0; p < preds.size(); ++p) {
    result.pred_to_gt[order[p]] = sorted_result.pred_to_gt[p];
  }
  return result;
}

std::vector<double> interpolated_precision(std::vector<ScoredDetection> dets,
                                           int total_gt, int recall_levels) {
  std::sort(dets.begin(), dets.end(),
            [](const ScoredDetection& a, const ScoredDetection& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.image_id != b.image_id) return a.image_id < b.image_id;
              return a.instance_index < b.instance_index;
            });

  std::vector<double> precision(dets.size()), recall(dets.size());
  int tp = 0, fp = 0;
  for (std::size_t k = 0; k < dets.size(); ++k) {
    dets[k].tp ? ++tp : ++fp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(tp + fp);
    recall[k] = total_gt > 0 ? static_cast<double>(tp) / total_gt : 0.0;
  }
  // Running maximum from the right gives the precision envelope.
  for (std::size_t k = dets.size(); k-- > 1;) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }

  std::vector<double> out(static_cast<std::size_t>(recall_levels), 0.0);
  std::size_t k = 0;
  for (int i = 0; i < recall_levels; ++i) {
    const double r = static_cast<double>(i) / (recall_levels - 1);
    while (k < dets.size() && recall[k] < r) ++k;
    out[i] = k < dets.size() ? precision[k] : 0.0;
  }
  return out;
}

double average_precision(std::vector<ScoredDetection> dets, int total_gt,
                         int recall_levels) {
  const std::vector<double> p =
      interpolated_precision(std::move(dets), total_gt, recall_levels);
  double sum = 0.0;
  for (double v : p) sum += v;
  return sum / p.size();
}

namespace {

struct CategorySlice {
  std::vector<int> gt_indices;
  std::vector<int> pred_indices;  // canonical processing order
  std::vector<double> iou_box_matrix;
  std::vector<double> iou_mask_matrix;
};

struct ImageEval {
  std::string image_id;
  std::map<ClassLabel, CategorySlice> slices;
};

void build_image_eval(const ImageRecord& gt, const ImageRecord* pred,
                      ImageEval& out) {
  out.image_id = gt.image_id;
  for (std::size_t g = 0; g < gt.instances.size(); ++g) {
    out.slices[gt.instances[g].label].gt_indices.push_back(static_cast<int>(g));
  }
  if (pred) {
    for (std::size_t p = 0; p < pred->instances.size(); ++p) {
      out.slices[pred->instances[p].label].pred_indices.push_back(
          static_cast<int>(p));
    }
  }

  // Mask grids are rasterized once per instance and shared by every
  // threshold.
  std::map<int, BinaryGrid> gt_grids, pred_grids;
  auto grid_of = [&](std::map<int, BinaryGrid>& cache,
                     const ImageRecord& rec, int idx) -> const BinaryGrid& {
    auto it = cache.find(idx);
    if (it == cache.end()) {
      it = cache.emplace(idx, rasterize_parts(rec.instances[idx].parts,
                                              rec.width, rec.height))
               .first;
    }
    return it->second;
  };

  for (auto& [label, slice] : out.slices) {
    auto& preds_idx = slice.pred_indices;
    if (pred) {
      std::sort(preds_idx.begin(), preds_idx.end(), [&](int a, int b) {
        const Instance& ia = pred->instances[a];
        const Instance& ib = pred->instances[b];
        if (*ia.score != *ib.score) return *ia.score > *ib.score;
        if (int c = compare_content(ia, ib)) return c < 0;
        return a < b;
      });
    }
    const std::size_t np = preds_idx.size();
    const std::size_t ng = slice.gt_indices.size();
    slice.iou_box_matrix.assign(np * ng, 0.0);
    slice.iou_mask_matrix.assign(np * ng, 0.0);
    for (std::size_t p = 0; p < np; ++p) {
      const Instance& ip = pred->instances[preds_idx[p]];
      const BinaryGrid& gp = grid_of(pred_grids, *pred, preds_idx[p]);
      for (std::size_t g = 0; g < ng; ++g) {
        const Instance& ig = gt.instances[slice.gt_indices[g]];
        slice.iou_box_matrix[p * ng + g] = iou_box(ip.bbox, ig.bbox);
        slice.iou_mask_matrix[p * ng + g] =
            iou_grids(gp, grid_of(gt_grids, gt, slice.gt_indices[g]));
      }
    }
  }
}

}  // namespace

APReport evaluate(const std::vector<ImageRecord>& gt,
                  const std::vector<ImageRecord>& preds,
                  const EvalConfig& cfg) {
  cfg.validate();

  std::map<std::string, const ImageRecord*> gt_by_id;
  for (const ImageRecord& rec : gt) gt_by_id[rec.image_id] = &rec;
  std::map<std::string, const ImageRecord*> pred_by_id;
  for (const ImageRecord& rec : preds) {
    auto it = gt_by_id.find(rec.image_id);
    if (it == gt_by_id.end()) {
      throw Error(ErrorKind::kAlignment,
                  "prediction image " + rec.image_id + " is not in the ground truth");
    }
    if (it->second->width != rec.width || it->second->height != rec.height) {
      throw Error(ErrorKind::kAlignment,
                  "image " + rec.image_id + ": prediction dimensions differ");
    }
    pred_by_id[rec.image_id] = &rec;
  }

  const int n_images = static_cast<int>(gt.size());
  std::vector<ImageEval> evals(n_images);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_images; ++i) {
    auto it = pred_by_id.find(gt[i].image_id);
    build_image_eval(gt[i], it == pred_by_id.end() ? nullptr : it->second,
                     evals[i]);
  }

  std::set<ClassLabel> categories;
  for (const ImageRecord& rec : gt) {
    for (const Instance& inst : rec.instances) categories.insert(inst.label);
  }

  const std::size_t n_thr = cfg.iou_thresholds.size();
  APReport report;
  report.counts_box.resize(n_thr);
  report.counts_mask.resize(n_thr);
  for (std::size_t t = 0; t < n_thr; ++t) {
    report.counts_box[t].threshold = cfg.iou_thresholds[t];
    report.counts_mask[t].threshold = cfg.iou_thresholds[t];
  }

  int find50 = -1, find75 = -1;
  for (std::size_t t = 0; t < n_thr; ++t) {
    if (std::abs(cfg.iou_thresholds[t] - 0.50) < 1e-9) find50 = static_cast<int>(t);
    if (std::abs(cfg.iou_thresholds[t] - 0.75) < 1e-9) find75 = static_cast<int>(t);
  }

  for (ClassLabel category : categories) {
    int total_gt = 0;
    for (const ImageEval& ev : evals) {
      auto it = ev.slices.find(category);
      if (it != ev.slices.end()) {
        total_gt += static_cast<int>(it->second.gt_indices.size());
      }
    }

    APEntry entry;
    for (IoUKind kind : {IoUKind::kBox, IoUKind::kMask}) {
      double ap_sum = 0.0, ap50 = 0.0, ap75 = 0.0;
      for (std::size_t t = 0; t < n_thr; ++t) {
        std::vector<ScoredDetection> dets;
        long long tp_total = 0, fp_total = 0;
        for (int i = 0; i < n_images; ++i) {
          auto it = evals[i].slices.find(category);
          if (it == evals[i].slices.end()) continue;
          const CategorySlice& slice = it->second;
          const std::vector<double>& matrix = kind == IoUKind::kBox
                                                  ? slice.iou_box_matrix
                                                  : slice.iou_mask_matrix;
          const int np = static_cast<int>(slice.pred_indices.size());
          const int ng = static_cast<int>(slice.gt_indices.size());
          const MatchResult match =
              greedy_on_matrix(matrix, np, ng, cfg.iou_thresholds[t]);
          const ImageRecord* pred = pred_by_id.count(gt[i].image_id)
                                        ? pred_by_id.at(gt[i].image_id)
                                        : nullptr;
          for (int p = 0; p < np; ++p) {
            ScoredDetection det;
            det.score = *pred->instances[slice.pred_indices[p]].score;
            det.tp = match.pred_to_gt[p] >= 0;
            det.image_id = evals[i].image_id;
            det.instance_index = p;  // canonical rank within the image
            dets.push_back(std::move(det));
          }
          tp_total += match.tp;
          fp_total += match.fp;
        }
        const double ap =
            average_precision(std::move(dets), total_gt, cfg.recall_levels);
        ap_sum += ap;
        if (static_cast<int>(t) == find50) ap50 = ap;
        if (static_cast<int>(t) == find75) ap75 = ap;

        auto& counts =
            kind == IoUKind::kBox ? report.counts_box[t] : report.counts_mask[t];
        counts.tp += tp_total;
        counts.fp += fp_total;
        counts.fn += total_gt - tp_total;
      }
      const double ap_mean = ap_sum / static_cast<double>(n_thr);
      if (kind == IoUKind::kBox) {
        entry.ap_box = ap_mean;
        entry.ap_box_50 = ap50;
        entry.ap_box_75 = ap75;
      } else {
        entry.ap_mask = ap_mean;
        entry.ap_mask_50 = ap50;
        entry.ap_mask_75 = ap75;
      }
    }
    report.per_category[category] = entry;
  }

  const double n_cat = static_cast<double>(report.per_category.size());
  if (n_cat > 0) {
    for (const auto& [label, entry] : report.per_category) {
      report.all.ap_box += entry.ap_box / n_cat;
      report.all.ap_box_50 += entry.ap_box_50 / n_cat;
      report.all.ap_box_75 += entry.ap_box_75 / n_cat;
      report.all.ap_mask += entry.ap_mask / n_cat;
      report.all.ap_mask_50 += entry.ap_mask_50 / n_cat;
      report.all.ap_mask_75 += entry.ap_mask_75 / n_cat;
    }
  }
  return report;
}

namespace {

nlohmann::json entry_json(const APEntry& e) {
  return {{"ap_box", e.ap_box},       {"ap_box_50", e.ap_box_50},
          {"ap_box_75", e.ap_box_75}, {"ap_mask", e.ap_mask},
          {"ap_mask_50", e.ap_mask_50}, {"ap_mask_75", e.ap_mask_75}};
}

nlohmann::json counts_json(const std::vector<ThresholdCounts>& counts) {
  nlohmann::json out = nlohmann::json::array();
  for (const ThresholdCounts& c : counts) {
    out.push_back({{"threshold", c.threshold},
                   {"tp", c.tp},
                   {"fp", c.fp},
                   {"fn", c.fn}});
  }
  return out;
}

}  // namespace

nlohmann::json ap_report_json(const APReport& report) {
  nlohmann::json doc;
  for (const auto& [label, entry] : report.per_category) {
    doc[to_string(label)] = entry_json(entry);
  }
  doc["all"] = entry_json(report.all);
  doc["counts"] = {{"box", counts_json(report.counts_box)},
                   {"mask", counts_json(report.counts_mask)}};
  return doc;
}

}  // namespace mask2mm
