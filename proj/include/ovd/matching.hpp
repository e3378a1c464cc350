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

#ifndef OVDBENCH_MATCHING_HPP_
#define OVDBENCH_MATCHING_HPP_

#include <tuple>
#include <vector>

#include "ovd/datamodel.hpp"

namespace ovd {

struct MatchedPair {
  int prediction_index = 0;
  int gt_index = 0;
  double iou = 0.0;
};

struct MatchResult {
  std::vector<MatchedPair> matched_pairs;
  std::vector<int> false_positives;  // prediction indices
  std::vector<int> false_negatives;  // gt indices
  double iou_threshold = 0.5;
};

// Greedy COCO-style matcher for one (image, class) cell. Predictions are
// processed in descending score order (ties by ascending input index); each
// takes the unmatched ground truth of maximal IoU when that IoU reaches the
// threshold (gt ties broken by ascending index).
MatchResult match_greedy(const std::vector<Prediction>& preds,
                         const std::vector<GroundTruth>& gts,
                         double iou_threshold);

}  // namespace ovd

#endif  // OVDBENCH_MATCHING_HPP_
