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

#ifndef OVDBENCH_PROTOCOLS_HPP_
#define OVDBENCH_PROTOCOLS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ovd/datamodel.hpp"
#include "ovd/metrics.hpp"
#include "ovd/postprocess.hpp"

namespace ovd {

enum class Protocol { kSupervised, kThreeFOvd, kFgOvd, kOvVg };

std::string protocol_to_string(Protocol p);
Protocol protocol_from_string(const std::string& s);

struct ProtocolConfig {
  Protocol variant = Protocol::kSupervised;
  std::vector<double> iou_thresholds = coco_default_thresholds();
  // supervised: NMS applied per (image, class) before scoring.
  double nms_iou_threshold = 0.5;
  // 3fovd: optional per-caption suppression, and opt-in token validation.
  std::optional<SuppressionConfig> suppression;
  bool strict_tokens = false;
  // fgovd
  int negatives_per_positive = 1;
  int vocabularies = 1;
  // ovvg
  double grounding_iou_threshold = 0.5;
  int jobs = 1;
};

// Closed-set evaluation: every token must name a dataset class
// (UnknownClassError otherwise); detections are NMS'd per (image, class) and
// scored with coco_map.
EvalReport eval_supervised(const Dataset& ds,
                           const std::vector<Prediction>& preds,
                           const ProtocolConfig& cfg);

// Caption-conditioned evaluation: every box produced under the caption of
// class c counts as a detection of c regardless of its token. Optional
// per-caption suppression runs first. The report carries a base/novel mAP
// split. With strict_tokens, a token outside its caption's token set (other
// than "[UNK]") raises TokenNotInCaptionError.
EvalReport eval_3fovd(const Dataset& ds, const std::vector<Prediction>& preds,
                      const ProtocolConfig& cfg);

// One object instance with its positive caption and near-miss negatives.
struct CaptionGroup {
  int64_t image_id = 0;
  int gt_index = 0;  // index into the image's ground-truth list, file order
  std::string positive;
  std::vector<std::string> negatives;
  int vocabulary_id = 0;
};

struct CaptionResponse {
  Box box;
  double score = 0.0;
};

// Caption index 0 is the positive; index i >= 1 is negatives[i-1].
using GroupScores = std::vector<std::map<int, CaptionResponse>>;

// Per group the predicted caption is the argmax score (ties to the lowest
// caption index, so the positive wins ties); the group is a true positive
// only when that caption is the positive and the box reaches the IoU
// threshold. AP pools groups per class and averages over vocabularies.
EvalReport eval_fgovd(const Dataset& ds,
                      const std::vector<CaptionGroup>& groups,
                      const GroupScores& scores, const ProtocolConfig& cfg);

// k variants of `positive`, each with exactly one occurrence of a palette
// word replaced by a different palette word. Deterministic under seed.
// Throws NoAttributeError when the positive contains no palette word.
std::vector<std::string> make_negative_captions(
    const std::string& positive, const std::vector<std::string>& palette,
    int k, uint64_t seed);

struct GroundingQuery {
  int64_t image_id = 0;
  std::string caption;
  Box gt_box;
};

struct GroundingReport {
  int n_queries = 0;
  int n_correct = 0;
  double accuracy = 0.0;
  double iou_threshold = 0.5;
};

// answers: (query_index, box) pairs; each query needs exactly one
// (MissingAnswerError / MultipleAnswerError otherwise). Accuracy is the
// fraction of answers reaching the IoU threshold. Scores play no role.
GroundingReport eval_ovvg(const std::vector<GroundingQuery>& queries,
                          const std::vector<std::pair<int, Box>>& answers,
                          double iou_threshold);

nlohmann::json grounding_report_to_json(const GroundingReport& report);
std::string grounding_report_to_table(const GroundingReport& report);

// File schemas for the caption-group and grounding protocols.
//
// fgovd file:
//   {"groups":[{"image_id","gt_index","vocabulary_id"?,"positive",
//               "negatives":[...],
//               "responses":[{"caption_index","bbox":[...],"score"}]}]}
struct FgovdInput {
  std::vector<CaptionGroup> groups;
  GroupScores scores;
};
FgovdInput load_caption_groups(const std::filesystem::path& path,
                               const Dataset& ds);

// ovvg file:
//   {"queries":[{"image_id","caption","gt_bbox":[...]}],
//    "answers":[{"query_index","bbox":[...]}]}
struct OvvgInput {
  std::vector<GroundingQuery> queries;
  std::vector<std::pair<int, Box>> answers;
};
OvvgInput load_grounding(const std::filesystem::path& path, const Dataset& ds);

}  // namespace ovd

#endif  // OVDBENCH_PROTOCOLS_HPP_
