// Copyright 2026 The ovdbench Authors. All Rights Reserved.
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

#include "ovd/datamodel.hpp"

#include <cctype>
#include <cmath>

#include "ovd/errors.hpp"
#include "ovd/json_io.hpp"

namespace ovd {

namespace {

std::string record_ref(const std::string& origin, const std::string& kind,
                       size_t index) {
  return origin + ": " + kind + "[" + std::to_string(index) + "]";
}

const nlohmann::json& require_field(const nlohmann::json& j,
                                    const std::string& key,
                                    const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw SchemaError(where + ": missing required field \"" + key + "\"");
  }
  return *it;
}

int64_t require_int(const nlohmann::json& j, const std::string& key,
                    const std::string& where) {
  const auto& v = require_field(j, key, where);
  if (!v.is_number_integer() && !v.is_number_unsigned()) {
    throw SchemaError(where + ": field \"" + key + "\" must be an integer");
  }
  return v.get<int64_t>();
}

double require_number(const nlohmann::json& j, const std::string& key,
                      const std::string& where) {
  const auto& v = require_field(j, key, where);
  if (!v.is_number()) {
    throw SchemaError(where + ": field \"" + key + "\" must be a number");
  }
  return v.get<double>();
}

std::string require_string(const nlohmann::json& j, const std::string& key,
                           const std::string& where) {
  const auto& v = require_field(j, key, where);
  if (!v.is_string()) {
    throw SchemaError(where + ": field \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

Box parse_bbox(const nlohmann::json& j, const std::string& where) {
  const auto& v = require_field(j, "bbox", where);
  if (!v.is_array() || v.size() != 4) {
    throw SchemaError(where + ": \"bbox\" must be [x_min,y_min,x_max,y_max]");
  }
  for (const auto& c : v) {
    if (!c.is_number()) {
      throw SchemaError(where + ": \"bbox\" entries must be numbers");
    }
  }
  Box b{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(),
        v[3].get<double>()};
  if (!box_is_valid(b)) {
    throw SchemaError(where + ": invalid box (non-finite or inverted corners)");
  }
  return b;
}

nlohmann::json bbox_to_json(const Box& b) {
  return nlohmann::json::array({b.x_min, b.y_min, b.x_max, b.y_max});
}

}  // namespace

const ImageRecord* Dataset::find_image(int64_t id) const {
  auto it = image_index_.find(id);
  return it == image_index_.end() ? nullptr : &images[it->second];
}

const ClassEntry* Dataset::find_class(int64_t id) const {
  auto it = class_index_.find(id);
  return it == class_index_.end() ? nullptr : &classes[it->second];
}

const ClassEntry* Dataset::find_class_by_name(const std::string& name) const {
  auto it = class_name_index_.find(name);
  return it == class_name_index_.end() ? nullptr : &classes[it->second];
}

std::vector<int> Dataset::gt_indices_for_image(int64_t image_id) const {
  std::vector<int> out;
  for (size_t i = 0; i < ground_truth.size(); ++i) {
    if (ground_truth[i].image_id == image_id) out.push_back(static_cast<int>(i));
  }
  return out;
}

void Dataset::reindex() {
  image_index_.clear();
  class_index_.clear();
  class_name_index_.clear();
  for (size_t i = 0; i < images.size(); ++i) image_index_[images[i].id] = i;
  for (size_t i = 0; i < classes.size(); ++i) {
    class_index_[classes[i].id] = i;
    class_name_index_[classes[i].name] = i;
  }
}

std::string novelty_to_string(Novelty n) {
  return n == Novelty::kBase ? "base" : "novel";
}

Novelty novelty_from_string(const std::string& s, const std::string& origin) {
  if (s == "base") return Novelty::kBase;
  if (s == "novel") return Novelty::kNovel;
  throw SchemaError(origin + ": novelty must be \"base\" or \"novel\", got \"" +
                    s + "\"");
}

Dataset dataset_from_json(const nlohmann::json& j, const std::string& origin) {
  if (!j.is_object()) {
    throw SchemaError(origin + ": top level must be an object");
  }
  Dataset ds;

  const auto& images = require_field(j, "images", origin);
  if (!images.is_array()) throw SchemaError(origin + ": \"images\" must be an array");
  std::set<int64_t> image_ids;
  for (size_t i = 0; i < images.size(); ++i) {
    const std::string where = record_ref(origin, "images", i);
    const auto& im = images[i];
    ImageRecord rec;
    rec.id = require_int(im, "id", where);
    rec.width = static_cast<int>(require_int(im, "width", where));
    rec.height = static_cast<int>(require_int(im, "height", where));
    if (rec.width <= 0 || rec.height <= 0) {
      throw SchemaError(where + ": width and height must be positive");
    }
    if (im.contains("timestamp")) {
      if (!im["timestamp"].is_number()) {
        throw SchemaError(where + ": \"timestamp\" must be a number");
      }
      rec.timestamp = im["timestamp"].get<double>();
      if (!std::isfinite(*rec.timestamp)) {
        throw SchemaError(where + ": \"timestamp\" must be finite");
      }
    }
    if (im.contains("sequence_id")) {
      if (!im["sequence_id"].is_number_integer() &&
          !im["sequence_id"].is_number_unsigned()) {
        throw SchemaError(where + ": \"sequence_id\" must be an integer");
      }
      rec.sequence_id = im["sequence_id"].get<int64_t>();
    }
    if (rec.timestamp.has_value() != rec.sequence_id.has_value()) {
      throw IntegrityError(where +
                           ": timestamp and sequence_id must be present together");
    }
    if (!image_ids.insert(rec.id).second) {
      throw IntegrityError(where + ": duplicate image id " +
                           std::to_string(rec.id));
    }
    ds.images.push_back(rec);
  }

  const auto& cats = require_field(j, "categories", origin);
  if (!cats.is_array()) throw SchemaError(origin + ": \"categories\" must be an array");
  std::set<int64_t> class_ids;
  for (size_t i = 0; i < cats.size(); ++i) {
    const std::string where = record_ref(origin, "categories", i);
    const auto& c = cats[i];
    ClassEntry e;
    e.id = require_int(c, "id", where);
    e.name = require_string(c, "name", where);
    e.caption = require_string(c, "caption", where);
    e.coarse_class_id = require_int(c, "coarse_class_id", where);
    e.novelty = novelty_from_string(require_string(c, "novelty", where), where);
    if (e.caption.empty()) {
      throw SchemaError(where + ": caption must be non-empty");
    }
    if (!class_ids.insert(e.id).second) {
      throw IntegrityError(where + ": duplicate category id " +
                           std::to_string(e.id));
    }
    ds.classes.push_back(e);
  }

  ds.reindex();

  const auto& anns = require_field(j, "annotations", origin);
  if (!anns.is_array()) throw SchemaError(origin + ": \"annotations\" must be an array");
  for (size_t i = 0; i < anns.size(); ++i) {
    const std::string where = record_ref(origin, "annotations", i);
    const auto& a = anns[i];
    GroundTruth gt;
    gt.image_id = require_int(a, "image_id", where);
    gt.class_id = require_int(a, "category_id", where);
    const ImageRecord* img = ds.find_image(gt.image_id);
    if (img == nullptr) {
      throw IntegrityError(where + ": references image_id " +
                           std::to_string(gt.image_id) +
                           " which is not in images");
    }
    if (ds.find_class(gt.class_id) == nullptr) {
      throw IntegrityError(where + ": references category_id " +
                           std::to_string(gt.class_id) +
                           " which is not in categories");
    }
    gt.box = clamp_to_image(parse_bbox(a, where),
                            static_cast<double>(img->width),
                            static_cast<double>(img->height));
    ds.ground_truth.push_back(gt);
  }

  return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_json(parse_json_file(path), path.string());
}

nlohmann::json dataset_to_json(const Dataset& ds) {
  nlohmann::json j;
  j["images"] = nlohmann::json::array();
  for (const auto& im : ds.images) {
    nlohmann::json e;
    e["id"] = im.id;
    e["width"] = im.width;
    e["height"] = im.height;
    if (im.timestamp) e["timestamp"] = *im.timestamp;
    if (im.sequence_id) e["sequence_id"] = *im.sequence_id;
    j["images"].push_back(std::move(e));
  }
  j["categories"] = nlohmann::json::array();
  for (const auto& c : ds.classes) {
    nlohmann::json e;
    e["id"] = c.id;
    e["name"] = c.name;
    e["caption"] = c.caption;
    e["coarse_class_id"] = c.coarse_class_id;
    e["novelty"] = novelty_to_string(c.novelty);
    j["categories"].push_back(std::move(e));
  }
  j["annotations"] = nlohmann::json::array();
  for (const auto& g : ds.ground_truth) {
    nlohmann::json e;
    e["image_id"] = g.image_id;
    e["bbox"] = bbox_to_json(g.box);
    e["category_id"] = g.class_id;
    j["annotations"].push_back(std::move(e));
  }
  return j;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  write_text_file(path, canonical_dump(dataset_to_json(ds)) + "\n");
}

std::vector<Prediction> predictions_from_json(const nlohmann::json& j,
                                              const Dataset& ds,
                                              const std::string& origin) {
  const nlohmann::json* arr = &j;
  if (j.is_object()) {
    auto it = j.find("predictions");
    if (it == j.end()) {
      throw SchemaError(origin +
                        ": expected an array or an object with \"predictions\"");
    }
    arr = &*it;
  }
  if (!arr->is_array()) {
    throw SchemaError(origin + ": predictions must be an array");
  }
  std::vector<Prediction> out;
  out.reserve(arr->size());
  for (size_t i = 0; i < arr->size(); ++i) {
    const std::string where = record_ref(origin, "predictions", i);
    const auto& p = (*arr)[i];
    Prediction pred;
    pred.image_id = require_int(p, "image_id", where);
    pred.caption_class_id = require_int(p, "caption_class_id", where);
    pred.score = require_number(p, "score", where);
    pred.token = require_string(p, "token", where);
    pred.box = parse_bbox(p, where);
    if (!std::isfinite(pred.score)) {
      throw SchemaError(where + ": score must be finite");
    }
    if (pred.score < 0.0) {
      throw NegativeScoreError(where + ": score " + std::to_string(pred.score) +
                               " is negative");
    }
    if (ds.find_image(pred.image_id) == nullptr) {
      throw IntegrityError(where + ": references image_id " +
                           std::to_string(pred.image_id) +
                           " which is not in the dataset");
    }
    if (ds.find_class(pred.caption_class_id) == nullptr) {
      throw IntegrityError(where + ": references caption_class_id " +
                           std::to_string(pred.caption_class_id) +
                           " which is not in the dataset");
    }
    out.push_back(std::move(pred));
  }
  return out;
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path,
                                         const Dataset& ds) {
  return predictions_from_json(parse_json_file(path), ds, path.string());
}

nlohmann::json predictions_to_json(const std::vector<Prediction>& preds) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : preds) {
    nlohmann::json e;
    e["image_id"] = p.image_id;
    e["bbox"] = bbox_to_json(p.box);
    e["score"] = p.score;
    e["token"] = p.token;
    e["caption_class_id"] = p.caption_class_id;
    arr.push_back(std::move(e));
  }
  return arr;
}

void save_predictions(const std::vector<Prediction>& preds,
                      const std::filesystem::path& path) {
  write_text_file(path, canonical_dump(predictions_to_json(preds)) + "\n");
}

std::map<std::pair<int64_t, int64_t>, std::vector<Prediction>>
group_predictions(const std::vector<Prediction>& preds) {
  std::map<std::pair<int64_t, int64_t>, std::vector<Prediction>> out;
  for (const auto& p : preds) {
    out[{p.image_id, p.caption_class_id}].push_back(p);
  }
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  static const std::string kUnk = "[UNK]";
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < text.size()) {
    if (text.compare(i, kUnk.size(), kUnk) == 0) {
      tokens.push_back(kUnk);
      i += kUnk.size();
      continue;
    }
    if (std::isalnum(static_cast<unsigned char>(text[i]))) {
      size_t start = i;
      while (i < text.size() &&
             std::isalnum(static_cast<unsigned char>(text[i]))) {
        ++i;
      }
      tokens.push_back(text.substr(start, i - start));
    } else {
      ++i;
    }
  }
  return tokens;
}

}  // namespace ovd
