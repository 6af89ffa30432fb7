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
#include "mask2mm/annotations.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace mask2mm {

const char* to_string(ClassLabel label) {
  switch (label) {
    case ClassLabel::kBrick: return "brick";
    case ClassLabel::kBrokenBrick: return "broken_brick";
    case ClassLabel::kCrack: return "crack";
    case ClassLabel::kSpalling: return "spalling";
    case ClassLabel::kPlant: return "plant";
  }
  return "unknown";
}

int class_id(ClassLabel label) { return static_cast<int>(label); }

ClassLabel class_from_id(int id) {
  if (id < 1 || id > kNumClassLabels) {
    throw Error(ErrorKind::kParse,
                "unknown category id " + std::to_string(id));
  }
  return static_cast<ClassLabel>(id);
}

ClassLabel class_from_name(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!key.empty() && key.back() != '_') {
      key.push_back('_');
    }
  }
  while (!key.empty() && key.back() == '_') key.pop_back();

  static const std::map<std::string, ClassLabel> kNames = {
      {"brick", ClassLabel::kBrick},
      {"bricks", ClassLabel::kBrick},
      {"broken_brick", ClassLabel::kBrokenBrick},
      {"broken_bricks", ClassLabel::kBrokenBrick},
      {"brokenbrick", ClassLabel::kBrokenBrick},
      {"crack", ClassLabel::kCrack},
      {"cracks", ClassLabel::kCrack},
      {"spalling", ClassLabel::kSpalling},
      {"plant", ClassLabel::kPlant},
      {"plants", ClassLabel::kPlant},
  };
  auto it = kNames.find(key);
  if (it == kNames.end()) {
    throw Error(ErrorKind::kParse,
                "unknown category name \"" + std::string(name) + "\"");
  }
  return it->second;
}

namespace {

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool is_self_intersecting(const PolygonMask& mask) {
  const auto& v = mask.vertices;
  const std::size_t n = v.size();
  if (n > 256) return false;  // skip the O(n^2) check on huge polygons
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

void validate_polygon(const PolygonMask& mask, int width, int height,
                      const std::string& context) {
  if (mask.vertices.size() < 3) {
    throw Error(ErrorKind::kValidation,
                context + ": polygon has fewer than 3 vertices");
  }
  for (const Point& v : mask.vertices) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) {
      throw Error(ErrorKind::kValidation,
                  context + ": non-finite polygon coordinate");
    }
    if (v.x < 0.0 || v.x > width + 0.5 || v.y < 0.0 || v.y > height + 0.5) {
      std::ostringstream os;
      os << context << ": vertex (" << v.x << ", " << v.y
         << ") outside image bounds " << width << "x" << height;
      throw Error(ErrorKind::kValidation, os.str());
    }
  }
  if (is_self_intersecting(mask)) {
    std::cerr << "warning: " << context << ": self-intersecting polygon\n";
  }
}

Instance make_instance(ClassLabel label, std::vector<PolygonMask> parts,
                       std::optional<double> score, int width, int height,
                       const std::string& context) {
  if (parts.empty()) {
    throw Error(ErrorKind::kValidation, context + ": instance has no polygons");
  }
  for (const PolygonMask& part : parts) {
    validate_polygon(part, width, height, context);
  }
  if (score && (!std::isfinite(*score) || *score < 0.0 || *score > 1.0)) {
    throw Error(ErrorKind::kValidation,
                context + ": score outside [0, 1]");
  }
  Instance inst;
  inst.label = label;
  inst.bbox = bbox_of(parts);
  inst.parts = std::move(parts);
  inst.score = score;
  return inst;
}

namespace {

using nlohmann::json;

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

std::string id_to_string(const json& id) {
  if (id.is_string()) return id.get<std::string>();
  if (id.is_number_integer()) return std::to_string(id.get<long long>());
  if (id.is_number()) return std::to_string(id.get<double>());
  throw Error(ErrorKind::kParse, "id is neither string nor number");
}

}  // namespace

std::vector<ImageRecord> load_dataset(const std::filesystem::path& path,
                                      DatasetKind kind) {
  const json doc = read_json_file(path);
  if (!doc.is_object() || !doc.contains("images") ||
      !doc.contains("annotations") || !doc.contains("categories")) {
    throw Error(ErrorKind::kParse,
                path.string() +
                    ": expected top-level images/annotations/categories");
  }

  std::map<std::string, ClassLabel> category_by_file_id;
  for (const json& cat : doc.at("categories")) {
    try {
      category_by_file_id[id_to_string(cat.at("id"))] =
          class_from_name(cat.at("name").get<std::string>());
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse,
                  path.string() + ": bad category entry: " + e.what());
    }
  }

  std::map<std::string, ImageRecord> records;
  std::vector<std::string> order;
  for (const json& img : doc.at("images")) {
    ImageRecord rec;
    try {
      rec.image_id = id_to_string(img.at("id"));
      rec.width = img.at("width").get<int>();
      rec.height = img.at("height").get<int>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse,
                  path.string() + ": bad image entry: " + e.what());
    }
    if (rec.width <= 0 || rec.height <= 0) {
      throw Error(ErrorKind::kValidation,
                  "image " + rec.image_id + ": non-positive dimensions");
    }
    if (records.count(rec.image_id)) {
      throw Error(ErrorKind::kValidation,
                  "image " + rec.image_id + ": duplicate id");
    }
    order.push_back(rec.image_id);
    records.emplace(rec.image_id, std::move(rec));
  }

  for (const json& ann : doc.at("annotations")) {
    std::string image_id;
    try {
      image_id = id_to_string(ann.at("image_id"));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse,
                  path.string() + ": annotation without image_id: " + e.what());
    }
    auto rec_it = records.find(image_id);
    if (rec_it == records.end()) {
      throw Error(ErrorKind::kValidation,
                  "image " + image_id + ": annotation references unknown image");
    }
    ImageRecord& rec = rec_it->second;
    const std::string context = "image " + image_id + ", annotation " +
                                (ann.contains("id") ? id_to_string(ann.at("id"))
                                                    : "?");

    auto cat_it = category_by_file_id.find(id_to_string(ann.at("category_id")));
    if (cat_it == category_by_file_id.end()) {
      throw Error(ErrorKind::kValidation,
                  context + ": unknown category_id field");
    }

    std::vector<PolygonMask> parts;
    try {
      for (const json& ring : ann.at("segmentation")) {
        if (!ring.is_array() || ring.size() % 2 != 0) {
          throw Error(ErrorKind::kValidation,
                      context + ": segmentation ring with odd coordinate count");
        }
        PolygonMask part;
        for (std::size_t i = 0; i + 1 < ring.size(); i += 2) {
          part.vertices.push_back(
              Point{ring[i].get<double>(), ring[i + 1].get<double>()});
        }
        parts.push_back(std::move(part));
      }
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse,
                  context + ": bad segmentation field: " + e.what());
    }

    std::optional<double> score;
    if (ann.contains("score")) {
      try {
        score = ann.at("score").get<double>();
      } catch (const json::exception& e) {
        throw Error(ErrorKind::kParse, context + ": bad score field: " + e.what());
      }
    }
    if (kind == DatasetKind::kPredictions && !score) {
      throw Error(ErrorKind::kValidation,
                  context + ": prediction is missing its score field");
    }
    if (kind == DatasetKind::kGroundTruth && score) {
      throw Error(ErrorKind::kValidation,
                  context + ": ground truth must not carry a score field");
    }

    rec.instances.push_back(make_instance(cat_it->second, std::move(parts),
                                          score, rec.width, rec.height,
                                          context));
  }

  std::vector<ImageRecord> out;
  out.reserve(order.size());
  for (const std::string& id : order) out.push_back(std::move(records.at(id)));
  return out;
}

nlohmann::json dataset_to_json(const std::vector<ImageRecord>& records,
                               DatasetKind kind) {
  json images = json::array();
  json annotations = json::array();
  json categories = json::array();
  for (int id = 1; id <= kNumClassLabels; ++id) {
    categories.push_back(
        {{"id", id}, {"name", to_string(class_from_id(id))}});
  }
  long long next_ann_id = 1;
  for (const ImageRecord& rec : records) {
    images.push_back({{"id", rec.image_id},
                      {"file_name", rec.image_id + ".png"},
                      {"width", rec.width},
                      {"height", rec.height}});
    for (const Instance& inst : rec.instances) {
      json segmentation = json::array();
      for (const PolygonMask& part : inst.parts) {
        json ring = json::array();
        for (const Point& v : part.vertices) {
          ring.push_back(v.x);
          ring.push_back(v.y);
        }
        segmentation.push_back(std::move(ring));
      }
      json ann = {{"id", next_ann_id++},
                  {"image_id", rec.image_id},
                  {"category_id", class_id(inst.label)},
                  {"segmentation", std::move(segmentation)},
                  {"bbox",
                   {inst.bbox.x1, inst.bbox.y1, inst.bbox.width(),
                    inst.bbox.height()}}};
      if (kind == DatasetKind::kPredictions) {
        ann["score"] = inst.score.value_or(1.0);
      }
      annotations.push_back(std::move(ann));
    }
  }
  return json{{"images", std::move(images)},
              {"annotations", std::move(annotations)},
              {"categories", std::move(categories)}};
}

void save_dataset(const std::filesystem::path& path,
                  const std::vector<ImageRecord>& records, DatasetKind kind) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot write " + path.string());
  }
  out << dataset_to_json(records, kind).dump(2) << "\n";
}

PolygonMask clip_polygon(const PolygonMask& mask, const Box& clip) {
  // Clip successively against the four half-planes of the rectangle.
  enum Side { kLeft, kRight, kTop, kBottom };
  auto inside = [&clip](Point p, Side s) {
    switch (s) {
      case kLeft: return p.x >= clip.x1;
      case kRight: return p.x <= clip.x2;
      case kTop: return p.y >= clip.y1;
      case kBottom: return p.y <= clip.y2;
    }
    return false;
  };
  auto crossing = [&clip](Point a, Point b, Side s) {
    double t = 0.0;
    switch (s) {
      case kLeft: t = (clip.x1 - a.x) / (b.x - a.x); break;
      case kRight: t = (clip.x2 - a.x) / (b.x - a.x); break;
      case kTop: t = (clip.y1 - a.y) / (b.y - a.y); break;
      case kBottom: t = (clip.y2 - a.y) / (b.y - a.y); break;
    }
    Point p = a + t * (b - a);
    if (s == kLeft) p.x = clip.x1;
    if (s == kRight) p.x = clip.x2;
    if (s == kTop) p.y = clip.y1;
    if (s == kBottom) p.y = clip.y2;
    return p;
  };

  std::vector<Point> current = mask.vertices;
  for (Side s : {kLeft, kRight, kTop, kBottom}) {
    std::vector<Point> next;
    const std::size_t n = current.size();
    for (std::size_t i = 0; i < n; ++i) {
      Point a = current[i];
      Point b = current[(i + 1) % n];
      const bool ain = inside(a, s);
      const bool bin = inside(b, s);
      if (ain && bin) {
        next.push_back(b);
      } else if (ain && !bin) {
        next.push_back(crossing(a, b, s));
      } else if (!ain && bin) {
        next.push_back(crossing(a, b, s));
        next.push_back(b);
      }
    }
    current = std::move(next);
    if (current.empty()) break;
  }
  return PolygonMask{std::move(current)};
}

std::vector<ImageRecord> grid_crop(const ImageRecord& record, int rows,
                                   int cols, double min_area_px) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorKind::kValidation, "grid_crop needs rows, cols >= 1");
  }
  const int cell_w = record.width / cols;
  const int cell_h = record.height / rows;
  if (cell_w < 1 || cell_h < 1) {
    throw Error(ErrorKind::kValidation, "grid_crop cells would be empty");
  }

  std::vector<ImageRecord> out;
  out.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    const int y0 = r * cell_h;
    const int h = (r == rows - 1) ? record.height - y0 : cell_h;
    for (int c = 0; c < cols; ++c) {
      const int x0 = c * cell_w;
      const int w = (c == cols - 1) ? record.width - x0 : cell_w;

      ImageRecord cell;
      cell.image_id = record.image_id + "_r" + std::to_string(r + 1) + "c" +
                      std::to_string(c + 1);
      cell.width = w;
      cell.height = h;

      const Box clip{static_cast<double>(x0), static_cast<double>(y0),
                     static_cast<double>(x0 + w), static_cast<double>(y0 + h)};
      for (const Instance& inst : record.instances) {
        std::vector<PolygonMask> parts;
        double area = 0.0;
        for (const PolygonMask& part : inst.parts) {
          PolygonMask clipped = clip_polygon(part, clip);
          if (clipped.vertices.size() < 3) continue;
          area += std::abs(signed_area(clipped));
          for (Point& v : clipped.vertices) {
            v.x -= x0;
            v.y -= y0;
          }
          parts.push_back(std::move(clipped));
        }
        if (parts.empty() || area < min_area_px) continue;
        cell.instances.push_back(make_instance(inst.label, std::move(parts),
                                               inst.score, w, h,
                                               cell.image_id));
      }
      out.push_back(std::move(cell));
    }
  }
  return out;
}

}  // namespace mask2mm
