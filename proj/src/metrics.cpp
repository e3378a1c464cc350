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

#include "ovd/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "ovd/errors.hpp"
#include "ovd/parallel.hpp"

namespace ovd {

PRCurve pr_curve(std::vector<DetectionOutcome> outcomes, int n_gt) {
  std::sort(outcomes.begin(), outcomes.end(),
            [](const DetectionOutcome& a, const DetectionOutcome& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.image_id != b.image_id) return a.image_id < b.image_id;
              return a.index_in_image < b.index_in_image;
            });
  PRCurve curve;
  curve.n_gt = n_gt;
  curve.points.reserve(outcomes.size());
  int tp = 0;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].tp) ++tp;
    const double precision = static_cast<double>(tp) / static_cast<double>(i + 1);
    const double recall =
        n_gt > 0 ? static_cast<double>(tp) / static_cast<double>(n_gt) : 0.0;
    curve.points.emplace_back(recall, precision);
  }
  return curve;
}

std::vector<DetectionOutcome> outcomes_from_match(
    const MatchResult& match, const std::vector<Prediction>& preds,
    int64_t image_id) {
  std::vector<DetectionOutcome> out(preds.size());
  for (size_t i = 0; i < preds.size(); ++i) {
    out[i] = {preds[i].score, false, image_id, static_cast<int>(i)};
  }
  for (const auto& pair : match.matched_pairs) {
    out[static_cast<size_t>(pair.prediction_index)].tp = true;
  }
  return out;
}

double average_precision(const PRCurve& curve) {
  if (curve.points.empty()) return 0.0;
  double sum = 0.0;
  for (int g = 0; g <= 100; ++g) {
    const double grid = static_cast<double>(g) / 100.0;
    double best = 0.0;
    for (const auto& [recall, precision] : curve.points) {
      if (recall >= grid && precision > best) best = precision;
    }
    sum += best;
  }
  return sum / 101.0;
}

std::vector<double> coco_default_thresholds() {
  std::vector<double> out;
  for (int i = 50; i <= 95; i += 5) out.push_back(static_cast<double>(i) / 100.0);
  return out;
}

namespace {

struct ClassPool {
  int64_t class_id = 0;
  int n_gt = 0;
  // Per image: predictions in input order and ground truths in file order.
  std::map<int64_t, std::vector<Prediction>> preds_by_image;
  std::map<int64_t, std::vector<GroundTruth>> gts_by_image;
};

struct CellResult {
  PRCurve curve;
  long tp = 0;
  long fp = 0;
  long fn = 0;
};

CellResult evaluate_cell(const ClassPool& pool, double threshold) {
  CellResult cell;
  std::vector<DetectionOutcome> outcomes;
  std::set<int64_t> image_ids;
  for (const auto& [id, _] : pool.preds_by_image) image_ids.insert(id);
  for (const auto& [id, _] : pool.gts_by_image) image_ids.insert(id);
  static const std::vector<Prediction> no_preds;
  static const std::vector<GroundTruth> no_gts;
  for (int64_t image_id : image_ids) {
    auto pit = pool.preds_by_image.find(image_id);
    auto git = pool.gts_by_image.find(image_id);
    const auto& preds = pit == pool.preds_by_image.end() ? no_preds : pit->second;
    const auto& gts = git == pool.gts_by_image.end() ? no_gts : git->second;
    const MatchResult match = match_greedy(preds, gts, threshold);
    cell.tp += static_cast<long>(match.matched_pairs.size());
    cell.fp += static_cast<long>(match.false_positives.size());
    cell.fn += static_cast<long>(match.false_negatives.size());
    auto flat = outcomes_from_match(match, preds, image_id);
    outcomes.insert(outcomes.end(), flat.begin(), flat.end());
  }
  cell.curve = pr_curve(std::move(outcomes), pool.n_gt);
  return cell;
}

}  // namespace

EvalReport coco_map(const Dataset& ds, const std::vector<Prediction>& preds,
                    const std::vector<double>& iou_thresholds, int jobs) {
  if (iou_thresholds.empty()) {
    throw InvalidArgumentError("coco_map: iou_thresholds must be non-empty");
  }
  for (double t : iou_thresholds) {
    if (t <= 0.0 || t > 1.0) {
      throw InvalidArgumentError("coco_map: thresholds must be in (0,1]");
    }
  }
  if (ds.ground_truth.empty()) {
    throw EmptyDatasetError("coco_map: dataset contains no ground truth");
  }

  std::map<int64_t, ClassPool> pools;
  for (const auto& gt : ds.ground_truth) {
    ClassPool& pool = pools[gt.class_id];
    pool.class_id = gt.class_id;
    pool.n_gt += 1;
    pool.gts_by_image[gt.image_id].push_back(gt);
  }
  for (const auto& p : preds) {
    ClassPool& pool = pools[p.caption_class_id];
    pool.class_id = p.caption_class_id;
    pool.preds_by_image[p.image_id].push_back(p);
  }

  std::vector<const ClassPool*> pool_list;
  pool_list.reserve(pools.size());
  for (const auto& [_, pool] : pools) pool_list.push_back(&pool);

  const size_t n_classes = pool_list.size();
  const size_t n_thr = iou_thresholds.size();
  std::vector<CellResult> cells(n_classes * n_thr);
  parallel_for(n_classes * n_thr, jobs, [&](size_t i) {
    const size_t ci = i / n_thr;
    const size_t ti = i % n_thr;
    cells[i] = evaluate_cell(*pool_list[ci], iou_thresholds[ti]);
  });

  EvalReport report;
  report.iou_thresholds = iou_thresholds;
  double ap_sum = 0.0;
  long included = 0;
  for (size_t ci = 0; ci < n_classes; ++ci) {
    const ClassPool& pool = *pool_list[ci];
    // Confusion totals at the first threshold, over every cell.
    const CellResult& first = cells[ci * n_thr];
    report.tp += first.tp;
    report.fp += first.fp;
    report.fn += first.fn;
    if (pool.n_gt == 0) continue;  // excluded from the mean and the table
    std::vector<double> aps(n_thr);
    for (size_t ti = 0; ti < n_thr; ++ti) {
      aps[ti] = average_precision(cells[ci * n_thr + ti].curve);
      ap_sum += aps[ti];
      ++included;
    }
    report.per_class_ap[pool.class_id] = std::move(aps);
    report.curves[pool.class_id] = cells[ci * n_thr].curve;
  }
  report.map = included > 0 ? ap_sum / static_cast<double>(included) : 0.0;
  return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["protocol"] = report.protocol;
  j["map"] = report.map;
  if (report.map_base) j["map_base"] = *report.map_base;
  if (report.map_novel) j["map_novel"] = *report.map_novel;
  j["iou_thresholds"] = report.iou_thresholds;
  nlohmann::json per_class = nlohmann::json::object();
  for (const auto& [class_id, aps] : report.per_class_ap) {
    per_class[std::to_string(class_id)] = aps;
  }
  j["per_class_ap"] = std::move(per_class);
  j["counts"] = {{"tp", report.tp}, {"fp", report.fp}, {"fn", report.fn}};
  nlohmann::json curves = nlohmann::json::object();
  for (const auto& [class_id, curve] : report.curves) {
    nlohmann::json c;
    c["n_gt"] = curve.n_gt;
    nlohmann::json recall = nlohmann::json::array();
    nlohmann::json precision = nlohmann::json::array();
    for (const auto& [r, p] : curve.points) {
      recall.push_back(r);
      precision.push_back(p);
    }
    c["recall"] = std::move(recall);
    c["precision"] = std::move(precision);
    curves[std::to_string(class_id)] = std::move(c);
  }
  j["pr_curves"] = std::move(curves);
  return j;
}

std::string report_to_table(const EvalReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "protocol: %s\n", report.protocol.c_str());
  out += line;
  out += "class      ";
  for (double t : report.iou_thresholds) {
    std::snprintf(line, sizeof(line), " AP@%.2f", t);
    out += line;
  }
  out += "\n";
  for (const auto& [class_id, aps] : report.per_class_ap) {
    std::snprintf(line, sizeof(line), "%-11lld", static_cast<long long>(class_id));
    out += line;
    for (double ap : aps) {
      std::snprintf(line, sizeof(line), " %7.4f", ap);
      out += line;
    }
    out += "\n";
  }
  std::snprintf(line, sizeof(line), "mAP: %.6f\n", report.map);
  out += line;
  if (report.map_base) {
    std::snprintf(line, sizeof(line), "mAP (base): %.6f\n", *report.map_base);
    out += line;
  }
  if (report.map_novel) {
    std::snprintf(line, sizeof(line), "mAP (novel): %.6f\n", *report.map_novel);
    out += line;
  }
  std::snprintf(line, sizeof(line), "counts: tp=%ld fp=%ld fn=%ld at IoU %.2f\n",
                report.tp, report.fp, report.fn,
                report.iou_thresholds.empty() ? 0.0
                                              : report.iou_thresholds.front());
  out += line;
  return out;
}

}  // namespace ovd
