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

#ifndef OVDBENCH_POSTPROCESS_HPP_
#define OVDBENCH_POSTPROCESS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ovd/datamodel.hpp"

namespace ovd {

struct SuppressionConfig {
  double overlap_threshold = 0.8;
  double min_width = 1.0;
  double min_height = 1.0;
  double max_width = 1e9;
  double max_height = 1e9;
  // When true, the overlap stage compares against the running keep set
  // instead of against every size-stage survivor (a suppressed box can then
  // no longer suppress others).
  bool nms_style = false;
};

// Tuned defaults: "rp" for retail-product style imagery, "c" for cars.
SuppressionConfig suppression_preset_rp();
SuppressionConfig suppression_preset_c();
// Accepts "rp" or "c"; anything else is an InvalidArgumentError.
SuppressionConfig suppression_preset(const std::string& name);

// Overlap-proportion suppression for the predictions of one caption on one
// image. Stage 1 removes a box when both dimensions fall below the minimum
// pair, or either dimension exceeds the maximum pair. Stage 2 removes box p
// when some stage-1 survivor q has a strictly higher score and
// overlap_ratio(p, q) > overlap_threshold; equal scores never suppress.
// Output is in descending score order (ties keep input order).
std::vector<Prediction> suppress_caption(const std::vector<Prediction>& preds,
                                         const SuppressionConfig& cfg);

struct AggregatedBox {
  Box box;  // integer-rounded coordinates of the group
  int occurrence_count = 0;  // distinct captions producing this box
  std::vector<std::pair<std::string, int>> top_tokens;  // up to 3, by frequency
  double max_score = 0.0;
};

// Merges per-caption (already suppressed) predictions of one image. Boxes are
// grouped by coordinate identity after rounding each coordinate to the
// nearest integer pixel. Token ties break lexicographically. Output is sorted
// by descending occurrence count, then ascending coordinates.
std::vector<AggregatedBox> aggregate_image(
    const std::map<int64_t, std::vector<Prediction>>& filtered_per_caption);

// Classic greedy NMS: keep the highest-score box, drop remaining boxes whose
// IoU with it exceeds the threshold, repeat. Suppressed boxes cannot
// suppress.
std::vector<Prediction> standard_nms(const std::vector<Prediction>& preds,
                                     double iou_threshold);

nlohmann::json aggregated_to_json(const std::vector<AggregatedBox>& boxes);

}  // namespace ovd

#endif  // OVDBENCH_POSTPROCESS_HPP_
