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

#include "ovd/protocols.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "ovd/errors.hpp"
#include "ovd/json_io.hpp"
#include "ovd/rng.hpp"

namespace ovd {

std::string protocol_to_string(Protocol p) {
  switch (p) {
    case Protocol::kSupervised:
      return "supervised";
    case Protocol::kThreeFOvd:
      return "3fovd";
    case Protocol::kFgOvd:
      return "fgovd";
    case Protocol::kOvVg:
      return "ovvg";
  }
  return "supervised";
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "supervised") return Protocol::kSupervised;
  if (s == "3fovd") return Protocol::kThreeFOvd;
  if (s == "fgovd") return Protocol::kFgOvd;
  if (s == "ovvg") return Protocol::kOvVg;
  throw InvalidArgumentError(
      "unknown protocol \"" + s +
      "\" (expected supervised, 3fovd, fgovd or ovvg)");
}

EvalReport eval_supervised(const Dataset& ds,
                           const std::vector<Prediction>& preds,
                           const ProtocolConfig& cfg) {
  std::vector<Prediction> resolved;
  resolved.reserve(preds.size());
  for (size_t i = 0; i < preds.size(); ++i) {
    const ClassEntry* cls = ds.find_class_by_name(preds[i].token);
    if (cls == nullptr) {
      throw UnknownClassError("prediction[" + std::to_string(i) + "]: token \"" +
                              preds[i].token +
                              "\" is not a class name of the closed set");
    }
    Prediction p = preds[i];
    p.caption_class_id = cls->id;
    resolved.push_back(std::move(p));
  }

  std::vector<Prediction> kept;
  for (auto& [_, cell] : group_predictions(resolved)) {
    auto survivors = standard_nms(cell, cfg.nms_iou_threshold);
    kept.insert(kept.end(), survivors.begin(), survivors.end());
  }

  EvalReport report = coco_map(ds, kept, cfg.iou_thresholds, cfg.jobs);
  report.protocol = protocol_to_string(Protocol::kSupervised);
  return report;
}

namespace {

void validate_tokens_against_captions(const Dataset& ds,
                                      const std::vector<Prediction>& preds) {
  std::map<int64_t, std::set<std::string>> caption_tokens;
  for (const auto& cls : ds.classes) {
    auto tokens = tokenize(cls.caption);
    caption_tokens[cls.id] = std::set<std::string>(tokens.begin(), tokens.end());
  }
  for (size_t i = 0; i < preds.size(); ++i) {
    const auto& p = preds[i];
    if (p.token == "[UNK]") continue;
    const auto& tokens = caption_tokens.at(p.caption_class_id);
    if (tokens.find(p.token) == tokens.end()) {
      throw TokenNotInCaptionError(
          "prediction[" + std::to_string(i) + "]: token \"" + p.token +
          "\" does not occur in the caption of class " +
          std::to_string(p.caption_class_id));
    }
  }
}

// Mean AP over one side of the base/novel partition, all thresholds pooled.
std::optional<double> novelty_mean(const Dataset& ds, const EvalReport& report,
                                   Novelty side) {
  double sum = 0.0;
  long n = 0;
  for (const auto& [class_id, aps] : report.per_class_ap) {
    const ClassEntry* cls = ds.find_class(class_id);
    if (cls == nullptr || cls->novelty != side) continue;
    for (double ap : aps) {
      sum += ap;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace

EvalReport eval_3fovd(const Dataset& ds, const std::vector<Prediction>& preds,
                      const ProtocolConfig& cfg) {
  if (cfg.strict_tokens) validate_tokens_against_captions(ds, preds);

  std::vector<Prediction> scored;
  if (cfg.suppression.has_value()) {
    for (auto& [_, cell] : group_predictions(preds)) {
      auto survivors = suppress_caption(cell, *cfg.suppression);
      scored.insert(scored.end(), survivors.begin(), survivors.end());
    }
  } else {
    scored = preds;
  }

  EvalReport report = coco_map(ds, scored, cfg.iou_thresholds, cfg.jobs);
  report.protocol = protocol_to_string(Protocol::kThreeFOvd);
  report.map_base = novelty_mean(ds, report, Novelty::kBase);
  report.map_novel = novelty_mean(ds, report, Novelty::kNovel);
  return report;
}

namespace {

struct ResolvedGroup {
  int64_t class_id = 0;
  Box gt_box;
  double score = 0.0;  // argmax score
  Box predicted_box;
  bool positive_chosen = false;
};

ResolvedGroup resolve_group(const Dataset& ds, const CaptionGroup& group,
                            const std::map<int, CaptionResponse>& responses,
                            size_t group_index) {
  const std::string where = "group[" + std::to_string(group_index) + "]";
  if (group.negatives.empty()) {
    throw SchemaError(where + ": negatives must be non-empty");
  }
  const auto gt_indices = ds.gt_indices_for_image(group.image_id);
  if (group.gt_index < 0 ||
      static_cast<size_t>(group.gt_index) >= gt_indices.size()) {
    throw IntegrityError(where + ": gt_index " + std::to_string(group.gt_index) +
                         " out of range for image " +
                         std::to_string(group.image_id));
  }
  const GroundTruth& gt =
      ds.ground_truth[static_cast<size_t>(gt_indices[group.gt_index])];

  const int n_captions = static_cast<int>(group.negatives.size()) + 1;
  int best = -1;
  double best_score = 0.0;
  for (int ci = 0; ci < n_captions; ++ci) {
    auto it = responses.find(ci);
    if (it == responses.end()) {
      throw MissingScoreError(where + ": no score for caption index " +
                              std::to_string(ci));
    }
    // Strictly-greater keeps the lowest caption index on ties, so the
    // positive (index 0) wins ties.
    if (best < 0 || it->second.score > best_score) {
      best = ci;
      best_score = it->second.score;
    }
  }

  ResolvedGroup out;
  out.class_id = gt.class_id;
  out.gt_box = gt.box;
  out.score = best_score;
  out.predicted_box = responses.at(best).box;
  out.positive_chosen = (best == 0);
  return out;
}

}  // namespace

EvalReport eval_fgovd(const Dataset& ds,
                      const std::vector<CaptionGroup>& groups,
                      const GroupScores& scores, const ProtocolConfig& cfg) {
  if (groups.size() != scores.size()) {
    throw InvalidArgumentError("eval_fgovd: one score table entry per group");
  }
  if (cfg.vocabularies < 1 || cfg.negatives_per_positive < 1) {
    throw InvalidArgumentError(
        "eval_fgovd: vocabularies and negatives_per_positive must be >= 1");
  }
  if (cfg.iou_thresholds.empty()) {
    throw InvalidArgumentError("eval_fgovd: iou_thresholds must be non-empty");
  }

  std::vector<ResolvedGroup> resolved;
  resolved.reserve(groups.size());
  for (size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].vocabulary_id < 0 ||
        groups[i].vocabulary_id >= cfg.vocabularies) {
      throw IntegrityError("group[" + std::to_string(i) +
                           "]: vocabulary_id out of range");
    }
    resolved.push_back(resolve_group(ds, groups[i], scores[i], i));
  }

  // (vocabulary, class) -> group indices.
  std::map<std::pair<int, int64_t>, std::vector<size_t>> cells;
  for (size_t i = 0; i < groups.size(); ++i) {
    cells[{groups[i].vocabulary_id, resolved[i].class_id}].push_back(i);
  }

  const size_t n_thr = cfg.iou_thresholds.size();
  // class -> per-threshold (sum of AP over vocabularies, vocab count).
  std::map<int64_t, std::vector<std::pair<double, long>>> accum;

  EvalReport report;
  report.protocol = protocol_to_string(Protocol::kFgOvd);
  report.iou_thresholds = cfg.iou_thresholds;

  std::map<int64_t, std::vector<DetectionOutcome>> pooled_first_thr;
  std::map<int64_t, int> pooled_n_gt;

  for (const auto& [key, members] : cells) {
    const int64_t class_id = key.second;
    auto& slot = accum[class_id];
    if (slot.empty()) slot.assign(n_thr, {0.0, 0});
    for (size_t ti = 0; ti < n_thr; ++ti) {
      const double thr = cfg.iou_thresholds[ti];
      std::vector<DetectionOutcome> outcomes;
      outcomes.reserve(members.size());
      for (size_t gi : members) {
        const ResolvedGroup& g = resolved[gi];
        const bool tp = g.positive_chosen &&
                        iou(g.predicted_box, g.gt_box) >= thr;
        outcomes.push_back({g.score, tp, groups[gi].image_id,
                            static_cast<int>(gi)});
        if (ti == 0) {
          pooled_first_thr[class_id].push_back(outcomes.back());
          pooled_n_gt[class_id] += 1;
          if (tp) {
            report.tp += 1;
          } else {
            report.fp += 1;
            report.fn += 1;
          }
        }
      }
      const PRCurve curve =
          pr_curve(std::move(outcomes), static_cast<int>(members.size()));
      slot[ti].first += average_precision(curve);
      slot[ti].second += 1;
    }
  }

  double sum = 0.0;
  long n = 0;
  for (const auto& [class_id, slots] : accum) {
    std::vector<double> aps(n_thr);
    for (size_t ti = 0; ti < n_thr; ++ti) {
      aps[ti] = slots[ti].second > 0
                    ? slots[ti].first / static_cast<double>(slots[ti].second)
                    : 0.0;
      sum += aps[ti];
      ++n;
    }
    report.per_class_ap[class_id] = std::move(aps);
  }
  report.map = n > 0 ? sum / static_cast<double>(n) : 0.0;

  for (auto& [class_id, outcomes] : pooled_first_thr) {
    report.curves[class_id] =
        pr_curve(std::move(outcomes), pooled_n_gt[class_id]);
  }
  return report;
}

std::vector<std::string> make_negative_captions(
    const std::string& positive, const std::vector<std::string>& palette,
    int k, uint64_t seed) {
  if (k < 1) throw InvalidArgumentError("make_negative_captions: k must be >= 1");
  if (palette.size() < 2) {
    throw InvalidArgumentError(
        "make_negative_captions: palette needs at least 2 entries");
  }

  // Palette-word occurrences as (byte offset, length, palette index).
  struct Occurrence {
    size_t offset;
    size_t length;
    size_t palette_index;
  };
  std::vector<Occurrence> occurrences;
  size_t i = 0;
  while (i < positive.size()) {
    if (!std::isalnum(static_cast<unsigned char>(positive[i]))) {
      ++i;
      continue;
    }
    size_t start = i;
    while (i < positive.size() &&
           std::isalnum(static_cast<unsigned char>(positive[i]))) {
      ++i;
    }
    const std::string word = positive.substr(start, i - start);
    for (size_t pi = 0; pi < palette.size(); ++pi) {
      if (palette[pi] == word) {
        occurrences.push_back({start, word.size(), pi});
        break;
      }
    }
  }
  if (occurrences.empty()) {
    throw NoAttributeError("caption \"" + positive +
                           "\" contains no palette word");
  }

  // Candidate edits in deterministic order, then seed-shuffled.
  std::vector<std::pair<size_t, size_t>> candidates;  // (occurrence, palette)
  for (size_t oi = 0; oi < occurrences.size(); ++oi) {
    for (size_t pi = 0; pi < palette.size(); ++pi) {
      if (pi != occurrences[oi].palette_index) candidates.emplace_back(oi, pi);
    }
  }
  Rng rng(seed);
  rng.shuffle(candidates);

  std::vector<std::string> out;
  out.reserve(static_cast<size_t>(k));
  for (int n = 0; n < k; ++n) {
    const auto& [oi, pi] = candidates[static_cast<size_t>(n) % candidates.size()];
    const Occurrence& occ = occurrences[oi];
    std::string caption = positive.substr(0, occ.offset) + palette[pi] +
                          positive.substr(occ.offset + occ.length);
    out.push_back(std::move(caption));
  }
  return out;
}

GroundingReport eval_ovvg(const std::vector<GroundingQuery>& queries,
                          const std::vector<std::pair<int, Box>>& answers,
                          double iou_threshold) {
  if (iou_threshold <= 0.0 || iou_threshold > 1.0) {
    throw InvalidArgumentError("eval_ovvg: iou_threshold must be in (0,1]");
  }
  std::vector<int> counts(queries.size(), 0);
  std::vector<Box> boxes(queries.size());
  for (const auto& [query_index, box] : answers) {
    if (query_index < 0 || static_cast<size_t>(query_index) >= queries.size()) {
      throw IntegrityError("answer references query_index " +
                           std::to_string(query_index) + " out of range");
    }
    if (++counts[static_cast<size_t>(query_index)] > 1) {
      throw MultipleAnswerError("query " + std::to_string(query_index) +
                                " has more than one answer box");
    }
    boxes[static_cast<size_t>(query_index)] = box;
  }
  for (size_t i = 0; i < queries.size(); ++i) {
    if (counts[i] == 0) {
      throw MissingAnswerError("query " + std::to_string(i) + " has no answer");
    }
  }

  GroundingReport report;
  report.iou_threshold = iou_threshold;
  report.n_queries = static_cast<int>(queries.size());
  for (size_t i = 0; i < queries.size(); ++i) {
    if (iou(boxes[i], queries[i].gt_box) >= iou_threshold) {
      report.n_correct += 1;
    }
  }
  report.accuracy = report.n_queries > 0
                        ? static_cast<double>(report.n_correct) /
                              static_cast<double>(report.n_queries)
                        : 0.0;
  return report;
}

nlohmann::json grounding_report_to_json(const GroundingReport& report) {
  nlohmann::json j;
  j["protocol"] = "ovvg";
  j["accuracy"] = report.accuracy;
  j["n_queries"] = report.n_queries;
  j["n_correct"] = report.n_correct;
  j["iou_threshold"] = report.iou_threshold;
  return j;
}

std::string grounding_report_to_table(const GroundingReport& report) {
  char line[192];
  std::snprintf(line, sizeof(line),
                "protocol: ovvg\naccuracy: %.6f (%d/%d at IoU %.2f)\n",
                report.accuracy, report.n_correct, report.n_queries,
                report.iou_threshold);
  return std::string(line);
}

namespace {

Box parse_box_array(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 4) {
    throw SchemaError(where + ": box must be [x_min,y_min,x_max,y_max]");
  }
  for (const auto& c : v) {
    if (!c.is_number()) throw SchemaError(where + ": box entries must be numbers");
  }
  Box b{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(),
        v[3].get<double>()};
  if (!box_is_valid(b)) throw SchemaError(where + ": invalid box");
  return b;
}

}  // namespace

FgovdInput load_caption_groups(const std::filesystem::path& path,
                               const Dataset& ds) {
  const nlohmann::json j = parse_json_file(path);
  const std::string origin = path.string();
  if (!j.is_object() || !j.contains("groups") || !j["groups"].is_array()) {
    throw SchemaError(origin + ": expected an object with a \"groups\" array");
  }
  FgovdInput input;
  const auto& groups = j["groups"];
  for (size_t i = 0; i < groups.size(); ++i) {
    const std::string where = origin + ": groups[" + std::to_string(i) + "]";
    const auto& g = groups[i];
    CaptionGroup group;
    if (!g.contains("image_id") || !g["image_id"].is_number_integer()) {
      throw SchemaError(where + ": missing integer \"image_id\"");
    }
    group.image_id = g["image_id"].get<int64_t>();
    if (ds.find_image(group.image_id) == nullptr) {
      throw IntegrityError(where + ": references unknown image_id " +
                           std::to_string(group.image_id));
    }
    if (!g.contains("gt_index") || !g["gt_index"].is_number_integer()) {
      throw SchemaError(where + ": missing integer \"gt_index\"");
    }
    group.gt_index = g["gt_index"].get<int>();
    if (!g.contains("positive") || !g["positive"].is_string()) {
      throw SchemaError(where + ": missing string \"positive\"");
    }
    group.positive = g["positive"].get<std::string>();
    if (!g.contains("negatives") || !g["negatives"].is_array() ||
        g["negatives"].empty()) {
      throw SchemaError(where + ": \"negatives\" must be a non-empty array");
    }
    for (const auto& neg : g["negatives"]) {
      if (!neg.is_string()) {
        throw SchemaError(where + ": negatives must be strings");
      }
      group.negatives.push_back(neg.get<std::string>());
      if (group.negatives.back() == group.positive) {
        throw IntegrityError(where + ": a negative equals the positive caption");
      }
    }
    if (g.contains("vocabulary_id")) {
      group.vocabulary_id = g["vocabulary_id"].get<int>();
    }

    std::map<int, CaptionResponse> responses;
    if (!g.contains("responses") || !g["responses"].is_array()) {
      throw SchemaError(where + ": missing \"responses\" array");
    }
    for (const auto& r : g["responses"]) {
      if (!r.contains("caption_index") ||
          !r["caption_index"].is_number_integer()) {
        throw SchemaError(where + ": response missing integer \"caption_index\"");
      }
      const int ci = r["caption_index"].get<int>();
      if (!r.contains("score") || !r["score"].is_number()) {
        throw SchemaError(where + ": response missing numeric \"score\"");
      }
      CaptionResponse resp;
      resp.score = r["score"].get<double>();
      resp.box = parse_box_array(
          r.contains("bbox") ? r["bbox"] : nlohmann::json(), where);
      responses[ci] = resp;
    }
    input.groups.push_back(std::move(group));
    input.scores.push_back(std::move(responses));
  }
  return input;
}

OvvgInput load_grounding(const std::filesystem::path& path, const Dataset& ds) {
  const nlohmann::json j = parse_json_file(path);
  const std::string origin = path.string();
  if (!j.is_object() || !j.contains("queries") || !j["queries"].is_array() ||
      !j.contains("answers") || !j["answers"].is_array()) {
    throw SchemaError(origin +
                      ": expected an object with \"queries\" and \"answers\"");
  }
  OvvgInput input;
  const auto& queries = j["queries"];
  for (size_t i = 0; i < queries.size(); ++i) {
    const std::string where = origin + ": queries[" + std::to_string(i) + "]";
    const auto& q = queries[i];
    GroundingQuery query;
    if (!q.contains("image_id") || !q["image_id"].is_number_integer()) {
      throw SchemaError(where + ": missing integer \"image_id\"");
    }
    query.image_id = q["image_id"].get<int64_t>();
    if (ds.find_image(query.image_id) == nullptr) {
      throw IntegrityError(where + ": references unknown image_id " +
                           std::to_string(query.image_id));
    }
    if (!q.contains("caption") || !q["caption"].is_string()) {
      throw SchemaError(where + ": missing string \"caption\"");
    }
    query.caption = q["caption"].get<std::string>();
    if (query.caption.empty()) {
      throw SchemaError(where + ": caption must be non-empty");
    }
    query.gt_box = parse_box_array(
        q.contains("gt_bbox") ? q["gt_bbox"] : nlohmann::json(), where);
    input.queries.push_back(std::move(query));
  }
  const auto& answers = j["answers"];
  for (size_t i = 0; i < answers.size(); ++i) {
    const std::string where = origin + ": answers[" + std::to_string(i) + "]";
    const auto& a = answers[i];
    if (!a.contains("query_index") || !a["query_index"].is_number_integer()) {
      throw SchemaError(where + ": missing integer \"query_index\"");
    }
    input.answers.emplace_back(
        a["query_index"].get<int>(),
        parse_box_array(a.contains("bbox") ? a["bbox"] : nlohmann::json(),
                        where));
  }
  return input;
}

}  // namespace ovd
