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

#ifndef OVDBENCH_DATAMODEL_HPP_
#define OVDBENCH_DATAMODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ovd/geometry.hpp"

namespace ovd {

enum class Novelty { kBase, kNovel };

struct ImageRecord {
  int64_t id = 0;
  int width = 0;
  int height = 0;
  // Both present for video frames, both absent for stills.
  std::optional<double> timestamp;
  std::optional<int64_t> sequence_id;
};

// A fine-grained class with its single reusable caption.
struct ClassEntry {
  int64_t id = 0;
  std::string name;
  std::string caption;
  int64_t coarse_class_id = 0;
  Novelty novelty = Novelty::kBase;
};

struct GroundTruth {
  int64_t image_id = 0;
  Box box;
  int64_t class_id = 0;
};

// One detector output. `token` is the word the detector attached to the box
// (possibly the literal "[UNK]"); `caption_class_id` names the class whose
// caption produced this prediction.
struct Prediction {
  int64_t image_id = 0;
  Box box;
  double score = 0.0;
  std::string token;
  int64_t caption_class_id = 0;

  bool operator==(const Prediction&) const = default;
};

// Immutable after load; share freely across workers.
struct Dataset {
  std::vector<ImageRecord> images;
  std::vector<ClassEntry> classes;
  std::vector<GroundTruth> ground_truth;

  const ImageRecord* find_image(int64_t id) const;
  const ClassEntry* find_class(int64_t id) const;
  const ClassEntry* find_class_by_name(const std::string& name) const;

  // Ground-truth indices per image, in file order.
  std::vector<int> gt_indices_for_image(int64_t image_id) const;

  // Rebuilds the id lookup tables; called by the loaders.
  void reindex();

 private:
  std::map<int64_t, size_t> image_index_;
  std::map<int64_t, size_t> class_index_;
  std::map<std::string, size_t> class_name_index_;
};

// dataset.json:
//   {"images":[{"id","width","height","timestamp"?,"sequence_id"?}],
//    "categories":[{"id","name","caption","coarse_class_id","novelty"}],
//    "annotations":[{"image_id","bbox":[x_min,y_min,x_max,y_max],"category_id"}]}
// Ground-truth boxes are clamped to image bounds on load. Structural problems
// raise ParseError / SchemaError / IntegrityError naming the offending record.
Dataset load_dataset(const std::filesystem::path& path);
Dataset dataset_from_json(const nlohmann::json& j, const std::string& origin);

nlohmann::json dataset_to_json(const Dataset& ds);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

// predictions.json: [{"image_id","bbox":[...],"score","token","caption_class_id"}]
// A wrapping object {"predictions":[...], ...} is also accepted. File order is
// preserved. Scores must be finite and non-negative (NegativeScoreError).
std::vector<Prediction> load_predictions(const std::filesystem::path& path,
                                         const Dataset& ds);
std::vector<Prediction> predictions_from_json(const nlohmann::json& j,
                                              const Dataset& ds,
                                              const std::string& origin);

nlohmann::json predictions_to_json(const std::vector<Prediction>& preds);
void save_predictions(const std::vector<Prediction>& preds,
                      const std::filesystem::path& path);

// (image_id, caption_class_id) -> predictions in input order.
std::map<std::pair<int64_t, int64_t>, std::vector<Prediction>>
group_predictions(const std::vector<Prediction>& preds);

// Tokens of a caption: maximal alphanumeric runs, plus the literal "[UNK]"
// wherever it appears.
std::vector<std::string> tokenize(const std::string& text);

std::string novelty_to_string(Novelty n);
Novelty novelty_from_string(const std::string& s, const std::string& origin);

}  // namespace ovd

#endif  // OVDBENCH_DATAMODEL_HPP_
