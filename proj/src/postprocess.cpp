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

#include "ovd/postprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "ovd/errors.hpp"

namespace ovd {

SuppressionConfig suppression_preset_rp() {
  return SuppressionConfig{0.8, 200.0, 200.0, 2250.0, 2000.0, false};
}

SuppressionConfig suppression_preset_c() {
  return SuppressionConfig{0.8, 14.0, 14.0, 960.0, 960.0, false};
}

SuppressionConfig suppression_preset(const std::string& name) {
  if (name == "rp") return suppression_preset_rp();
  if (name == "c") return suppression_preset_c();
  throw InvalidArgumentError("unknown suppression preset \"" + name +
                             "\" (expected \"rp\" or \"c\")");
}

namespace {

void validate(const SuppressionConfig& cfg) {
  if (cfg.overlap_threshold <= 0.0 || cfg.overlap_threshold > 1.0) {
    throw InvalidArgumentError("overlap_threshold must be in (0,1]");
  }
  if (cfg.min_width <= 0.0 || cfg.min_height <= 0.0 ||
      cfg.min_width > cfg.max_width || cfg.min_height > cfg.max_height) {
    throw InvalidArgumentError("size limits must satisfy 0 < min <= max");
  }
}

bool passes_size(const Box& b, const SuppressionConfig& cfg) {
  const double w = b.width();
  const double h = b.height();
  if (w < cfg.min_width && h < cfg.min_height) return false;
  if (w > cfg.max_width || h > cfg.max_height) return false;
  return true;
}

}  // namespace

std::vector<Prediction> suppress_caption(const std::vector<Prediction>& preds,
                                         const SuppressionConfig& cfg) {
  validate(cfg);

  std::vector<int> survivors;
  for (size_t i = 0; i < preds.size(); ++i) {
    if (passes_size(preds[i].box, cfg)) survivors.push_back(static_cast<int>(i));
  }

  std::stable_sort(survivors.begin(), survivors.end(), [&](int a, int b) {
    return preds[a].score > preds[b].score;
  });

  std::vector<Prediction> kept;
  if (cfg.nms_style) {
    // Keep-set comparison: only boxes that themselves survived may suppress.
    for (int i : survivors) {
      bool drop = false;
      for (const auto& q : kept) {
        if (q.score > preds[i].score &&
            overlap_ratio(preds[i].box, q.box) > cfg.overlap_threshold) {
          drop = true;
          break;
        }
      }
      if (!drop) kept.push_back(preds[i]);
    }
  } else {
    // Any higher-score size survivor suppresses, whether or not it is itself
    // suppressed by the overlap stage.
    for (int i : survivors) {
      bool drop = false;
      for (int j : survivors) {
        if (preds[j].score > preds[i].score &&
            overlap_ratio(preds[i].box, preds[j].box) > cfg.overlap_threshold) {
          drop = true;
          break;
        }
      }
      if (!drop) kept.push_back(preds[i]);
    }
  }
  return kept;
}

std::vector<AggregatedBox> aggregate_image(
    const std::map<int64_t, std::vector<Prediction>>& filtered_per_caption) {
  struct Group {
    std::array<long long, 4> key;
    std::map<int64_t, bool> captions;
    std::map<std::string, int> token_counts;
    double max_score = 0.0;
  };
  std::map<std::array<long long, 4>, Group> groups;

  for (const auto& [caption_class_id, preds] : filtered_per_caption) {
    for (const auto& p : preds) {
      std::array<long long, 4> key = {
          std::llround(p.box.x_min), std::llround(p.box.y_min),
          std::llround(p.box.x_max), std::llround(p.box.y_max)};
      Group& g = groups[key];
      g.key = key;
      g.captions[caption_class_id] = true;
      g.token_counts[p.token] += 1;
      g.max_score = std::max(g.max_score, p.score);
    }
  }

  std::vector<AggregatedBox> out;
  out.reserve(groups.size());
  for (const auto& [key, g] : groups) {
    AggregatedBox box;
    box.box = Box{static_cast<double>(key[0]), static_cast<double>(key[1]),
                  static_cast<double>(key[2]), static_cast<double>(key[3])};
    box.occurrence_count = static_cast<int>(g.captions.size());
    box.max_score = g.max_score;
    // Most frequent tokens, ties lexicographic; the map already iterates in
    // lexicographic order, so a stable sort by count keeps that order.
    std::vector<std::pair<std::string, int>> tokens(g.token_counts.begin(),
                                                    g.token_counts.end());
    std::stable_sort(tokens.begin(), tokens.end(),
                     [](const auto& a, const auto& b) {
                       return a.second > b.second;
                     });
    if (tokens.size() > 3) tokens.resize(3);
    box.top_tokens = std::move(tokens);
    out.push_back(std::move(box));
  }
  std::sort(out.begin(), out.end(), [](const AggregatedBox& a,
                                       const AggregatedBox& b) {
    if (a.occurrence_count != b.occurrence_count) {
      return a.occurrence_count > b.occurrence_count;
    }
    return std::tie(a.box.x_min, a.box.y_min, a.box.x_max, a.box.y_max) <
           std::tie(b.box.x_min, b.box.y_min, b.box.x_max, b.box.y_max);
  });
  return out;
}

std::vector<Prediction> standard_nms(const std::vector<Prediction>& preds,
                                     double iou_threshold) {
  if (iou_threshold <= 0.0 || iou_threshold > 1.0) {
    throw InvalidArgumentError("standard_nms: iou_threshold must be in (0,1]");
  }
  std::vector<int> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return preds[a].score > preds[b].score;
  });
  std::vector<Prediction> kept;
  for (int i : order) {
    bool drop = false;
    for (const auto& q : kept) {
      if (iou(preds[i].box, q.box) > iou_threshold) {
        drop = true;
        break;
      }
    }
    if (!drop) kept.push_back(preds[i]);
  }
  return kept;
}

nlohmann::json aggregated_to_json(const std::vector<AggregatedBox>& boxes) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& b : boxes) {
    nlohmann::json e;
    e["bbox"] = nlohmann::json::array(
        {b.box.x_min, b.box.y_min, b.box.x_max, b.box.y_max});
    e["occurrence_count"] = b.occurrence_count;
    e["max_score"] = b.max_score;
    nlohmann::json tokens = nlohmann::json::array();
    for (const auto& [token, count] : b.top_tokens) {
      tokens.push_back(nlohmann::json::array({token, count}));
    }
    e["top_tokens"] = std::move(tokens);
    arr.push_back(std::move(e));
  }
  return arr;
}

}  // namespace ovd
