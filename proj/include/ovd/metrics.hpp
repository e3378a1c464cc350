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

#ifndef OVDBENCH_METRICS_HPP_
#define OVDBENCH_METRICS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ovd/datamodel.hpp"
#include "ovd/matching.hpp"

namespace ovd {

// One pooled detection with its match outcome. image_id and index_in_image
// pin down the deterministic tie order for equal scores.
struct DetectionOutcome {
  double score = 0.0;
  bool tp = false;
  int64_t image_id = 0;
  int index_in_image = 0;
};

struct PRCurve {
  // (recall, precision), ordered by descending detection score.
  std::vector<std::pair<double, double>> points;
  int n_gt = 0;
};

// Pools detections over images, sorts by descending score (ties by ascending
// image_id, then input index) and accumulates precision/recall.
PRCurve pr_curve(std::vector<DetectionOutcome> outcomes, int n_gt);

// Flattens one (image, class) match result back into scored outcomes.
std::vector<DetectionOutcome> outcomes_from_match(
    const MatchResult& match, const std::vector<Prediction>& preds,
    int64_t image_id);

// 101-point interpolated AP: mean over the recall grid {0.00,0.01,...,1.00}
// of the maximum precision at recall >= grid point. An empty curve scores 0.
double average_precision(const PRCurve& curve);

// 0.50:0.05:0.95.
std::vector<double> coco_default_thresholds();

struct EvalReport {
  std::string protocol = "supervised";
  std::vector<double> iou_thresholds;
  // Only classes with ground truth appear here.
  std::map<int64_t, std::vector<double>> per_class_ap;  // aligned with thresholds
  double map = 0.0;
  // Novelty split, filled by the 3F-OVD evaluator when the side has classes
  // with ground truth.
  std::optional<double> map_base;
  std::optional<double> map_novel;
  // Confusion totals at iou_thresholds.front(), over every evaluated cell
  // (predictions of classes without ground truth count as false positives).
  long tp = 0;
  long fp = 0;
  long fn = 0;
  // Per-class curves at iou_thresholds.front().
  std::map<int64_t, PRCurve> curves;
};

// Per (class, threshold) AP over greedy matching; mAP is the mean over
// classes with ground truth, then over thresholds. Predictions are keyed by
// caption_class_id. Cells are independent, so any jobs count yields identical
// results. Throws EmptyDatasetError when the dataset has no ground truth.
EvalReport coco_map(const Dataset& ds, const std::vector<Prediction>& preds,
                    const std::vector<double>& iou_thresholds, int jobs = 1);

nlohmann::json report_to_json(const EvalReport& report);
// Fixed-width text table mirroring report_to_json.
std::string report_to_table(const EvalReport& report);

}  // namespace ovd

#endif  // OVDBENCH_METRICS_HPP_
