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

#include "ovd/matching.hpp"

#include <algorithm>
#include <numeric>

#include "ovd/errors.hpp"

namespace ovd {

MatchResult match_greedy(const std::vector<Prediction>& preds,
                         const std::vector<GroundTruth>& gts,
                         double iou_threshold) {
  if (iou_threshold <= 0.0 || iou_threshold > 1.0) {
    throw InvalidArgumentError("match_greedy: iou_threshold must be in (0,1]");
  }

  MatchResult result;
  result.iou_threshold = iou_threshold;

  std::vector<int> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return preds[a].score > preds[b].score;
  });

  std::vector<bool> gt_taken(gts.size(), false);
  for (int pi : order) {
    int best_gt = -1;
    double best_iou = 0.0;
    for (size_t gi = 0; gi < gts.size(); ++gi) {
      if (gt_taken[gi]) continue;
      const double v = iou(preds[pi].box, gts[gi].box);
      if (v > best_iou) {
        best_iou = v;
        best_gt = static_cast<int>(gi);
      }
    }
    if (best_gt >= 0 && best_iou >= iou_threshold) {
      gt_taken[best_gt] = true;
      result.matched_pairs.push_back({pi, best_gt, best_iou});
    } else {
      result.false_positives.push_back(pi);
    }
  }
  for (size_t gi = 0; gi < gts.size(); ++gi) {
    if (!gt_taken[gi]) result.false_negatives.push_back(static_cast<int>(gi));
  }
  return result;
}

}  // namespace ovd
