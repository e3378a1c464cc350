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

#include "ovd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "ovd/errors.hpp"
#include "ovd/rng.hpp"

namespace ovd {

namespace {

constexpr double kMinVisibleFraction = 1.0 / 3.0;

std::string class_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "class%03d", index + 1);
  return buf;
}

std::string make_caption(const SceneSpec& spec, int index) {
  std::string caption = "a " + spec.palette[index % spec.palette.size()] + " " +
                        class_name(index) + " with";
  for (size_t i = 0; i < spec.component_words.size(); ++i) {
    caption += (i == 0 ? " " : " and ") + spec.component_words[i];
  }
  return caption;
}

bool placement_ok(const SceneSpec& spec, const std::vector<Box>& placed,
                  const Box& candidate) {
  for (const Box& other : placed) {
    if (iou(candidate, other) > spec.max_object_iou) return false;
    if (overlap_ratio(candidate, other) > spec.max_object_overlap) return false;
    if (overlap_ratio(other, candidate) > spec.max_object_overlap) return false;
  }
  return true;
}

}  // namespace

double visible_fraction(const std::vector<Box>& stack, size_t index) {
  const Box& target = stack[index];
  const double total = area(target);
  if (total <= 0.0) return 1.0;

  // Clip the boxes stacked above the target to the target rectangle.
  std::vector<Box> covers;
  for (size_t j = index + 1; j < stack.size(); ++j) {
    if (intersection_area(target, stack[j]) <= 0.0) continue;
    covers.push_back(Box{std::max(target.x_min, stack[j].x_min),
                         std::max(target.y_min, stack[j].y_min),
                         std::min(target.x_max, stack[j].x_max),
                         std::min(target.y_max, stack[j].y_max)});
  }
  if (covers.empty()) return 1.0;

  std::vector<double> xs = {target.x_min, target.x_max};
  std::vector<double> ys = {target.y_min, target.y_max};
  for (const Box& c : covers) {
    xs.push_back(c.x_min);
    xs.push_back(c.x_max);
    ys.push_back(c.y_min);
    ys.push_back(c.y_max);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  double covered = 0.0;
  for (size_t xi = 0; xi + 1 < xs.size(); ++xi) {
    for (size_t yi = 0; yi + 1 < ys.size(); ++yi) {
      // Every cover edge is a cut, so each cell is either fully inside or
      // fully outside each cover.
      for (const Box& c : covers) {
        if (c.x_min <= xs[xi] && xs[xi + 1] <= c.x_max && c.y_min <= ys[yi] &&
            ys[yi + 1] <= c.y_max) {
          covered += (xs[xi + 1] - xs[xi]) * (ys[yi + 1] - ys[yi]);
          break;
        }
      }
    }
  }
  return (total - covered) / total;
}

Dataset generate_dataset(const SceneSpec& spec, uint64_t seed) {
  if (spec.image_count < 0 || spec.class_count < 1 || spec.min_objects < 0 ||
      spec.max_objects < spec.min_objects || spec.image_width < 8 ||
      spec.image_height < 8 || spec.palette.empty()) {
    throw InvalidArgumentError("generate_dataset: invalid scene spec");
  }

  Dataset ds;
  for (int c = 0; c < spec.class_count; ++c) {
    ClassEntry e;
    e.id = c + 1;
    e.name = class_name(c);
    e.caption = make_caption(spec, c);
    e.coarse_class_id = c / 4 + 1;
    e.novelty = (c % 2 == 0) ? Novelty::kBase : Novelty::kNovel;
    ds.classes.push_back(std::move(e));
  }

  Rng rng(seed);

  // Video metadata: contiguous blocks of frames per sequence, timestamps
  // advancing by a random gap around mean_frame_gap.
  std::vector<std::optional<int64_t>> seq_of_image(spec.image_count);
  std::vector<double> time_of_image(spec.image_count, 0.0);
  if (spec.sequence_count > 0) {
    double t = 0.0;
    int64_t prev_seq = -1;
    for (int i = 0; i < spec.image_count; ++i) {
      const int64_t s = static_cast<int64_t>(
          static_cast<long long>(i) * spec.sequence_count / spec.image_count);
      if (s != prev_seq) {
        t = rng.uniform(0.0, 50.0);
        prev_seq = s;
      } else {
        t += rng.uniform(0.5, 2.0 * spec.mean_frame_gap);
      }
      seq_of_image[static_cast<size_t>(i)] = s;
      time_of_image[static_cast<size_t>(i)] = t;
    }
  }

  for (int i = 0; i < spec.image_count; ++i) {
    ImageRecord im;
    im.id = i + 1;
    im.width = spec.image_width;
    im.height = spec.image_height;
    if (seq_of_image[static_cast<size_t>(i)].has_value()) {
      im.sequence_id = seq_of_image[static_cast<size_t>(i)];
      im.timestamp = time_of_image[static_cast<size_t>(i)];
    }
    ds.images.push_back(im);

    const int n_objects =
        static_cast<int>(rng.uniform_int(spec.min_objects, spec.max_objects));
    std::vector<Box> placed;
    std::vector<int64_t> object_class;
    for (int o = 0; o < n_objects; ++o) {
      Box box;
      bool ok = false;
      for (int attempt = 0; attempt < 40 && !ok; ++attempt) {
        const double w = std::max(
            2.0, std::round(rng.uniform(0.08, 0.35) * spec.image_width));
        const double h = std::max(
            2.0, std::round(rng.uniform(0.08, 0.35) * spec.image_height));
        const double x = std::round(rng.uniform(0.0, spec.image_width - w));
        const double y = std::round(rng.uniform(0.0, spec.image_height - h));
        box = Box{x, y, x + w, y + h};
        ok = placement_ok(spec, placed, box);
      }
      if (!ok) continue;  // image stays sparser than requested
      placed.push_back(box);
      object_class.push_back(rng.uniform_int(1, spec.class_count));
    }

    for (size_t o = 0; o < placed.size(); ++o) {
      if (visible_fraction(placed, o) < kMinVisibleFraction) continue;
      GroundTruth gt;
      gt.image_id = im.id;
      gt.box = placed[o];
      gt.class_id = object_class[o];
      ds.ground_truth.push_back(gt);
    }
  }

  ds.reindex();
  return ds;
}

std::vector<Prediction> mock_detect(const Dataset& ds, int64_t class_id,
                                    const MockDetectorConfig& cfg) {
  const ClassEntry* cls = ds.find_class(class_id);
  if (cls == nullptr) {
    throw UnknownClassError("mock_detect: unknown class id " +
                            std::to_string(class_id));
  }
  Rng rng = Rng(cfg.seed).fork(static_cast<uint64_t>(class_id));

  std::vector<Prediction> out;
  for (const auto& gt : ds.ground_truth) {
    if (gt.class_id != class_id) continue;
    if (rng.bernoulli(cfg.miss_rate)) continue;

    const ImageRecord* im = ds.find_image(gt.image_id);
    Box box = gt.box;
    if (cfg.localization_jitter > 0.0) {
      const double j = cfg.localization_jitter;
      box.x_min += rng.uniform(-j, j);
      box.y_min += rng.uniform(-j, j);
      box.x_max += rng.uniform(-j, j);
      box.y_max += rng.uniform(-j, j);
      box = clamp_to_image(box, im->width, im->height);
      if (box.width() <= 0.0 || box.height() <= 0.0) box = gt.box;
    }

    Prediction tp;
    tp.image_id = gt.image_id;
    tp.box = box;
    tp.token = rng.bernoulli(cfg.unk_rate) ? "[UNK]" : cls->name;
    tp.score = rng.uniform(cfg.tp_score_range.first, cfg.tp_score_range.second);
    tp.caption_class_id = class_id;
    out.push_back(tp);

    if (cfg.component_fp_rate <= 0.0 || cfg.component_words.empty() ||
        box.width() <= 0.0 || box.height() <= 0.0) {
      continue;
    }
    const int n_components = rng.poisson(cfg.component_fp_rate);
    for (int k = 0; k < n_components; ++k) {
      // Strictly nested, dimensions under half the parent, so the area stays
      // below a quarter of the parent's.
      const double cw = rng.uniform(0.2, 0.45) * box.width();
      const double ch = rng.uniform(0.2, 0.45) * box.height();
      const double cx = box.x_min + rng.uniform(0.0, box.width() - cw);
      const double cy = box.y_min + rng.uniform(0.0, box.height() - ch);
      Prediction comp;
      comp.image_id = gt.image_id;
      comp.box = Box{cx, cy, cx + cw, cy + ch};
      comp.token = cfg.component_words[static_cast<size_t>(rng.uniform_int(
          0, static_cast<int64_t>(cfg.component_words.size()) - 1))];
      const double draw =
          rng.uniform(cfg.fp_score_range.first, cfg.fp_score_range.second);
      comp.score = cfg.component_score_relative ? tp.score * draw : draw;
      comp.caption_class_id = class_id;
      out.push_back(comp);
    }
  }
  return out;
}

std::vector<Prediction> mock_detect_all(const Dataset& ds,
                                        const MockDetectorConfig& cfg) {
  std::vector<Prediction> out;
  for (const auto& cls : ds.classes) {
    auto preds = mock_detect(ds, cls.id, cfg);
    out.insert(out.end(), preds.begin(), preds.end());
  }
  return out;
}

int count_component_predictions(const std::vector<Prediction>& preds,
                                const MockDetectorConfig& cfg) {
  const std::set<std::string> words(cfg.component_words.begin(),
                                    cfg.component_words.end());
  int n = 0;
  for (const auto& p : preds) {
    if (words.count(p.token) > 0) ++n;
  }
  return n;
}

Embedding box_feature(const Dataset& ds, const GroundTruth& gt, size_t dim) {
  const ClassEntry* cls = ds.find_class(gt.class_id);
  if (cls == nullptr) {
    throw IntegrityError("box_feature: ground truth references unknown class " +
                         std::to_string(gt.class_id));
  }
  return hash_bag_embedding(cls->caption, dim);
}

InstrumentedRun run_instrumented_3fovd(const Dataset& ds,
                                       const EmbedderPort& embedder,
                                       bool use_cache,
                                       const ProtocolConfig& cfg) {
  InstrumentedRun run;
  EmbeddingCache cache(&run.cost);

  for (const auto& im : ds.images) {
    const auto gt_indices = ds.gt_indices_for_image(im.id);
    for (const auto& cls : ds.classes) {
      Embedding caption_embedding;
      if (use_cache) {
        caption_embedding = cache.get_or_compute(cls.caption, embedder);
      } else {
        caption_embedding = embedder.embed(cls.caption);
        run.cost.encoder_calls += 1;
      }
      for (int gi : gt_indices) {
        const GroundTruth& gt = ds.ground_truth[static_cast<size_t>(gi)];
        const Embedding phi = box_feature(ds, gt, embedder.dimension());
        const double score =
            score_alignment(phi, caption_embedding, &run.cost);
        Prediction p;
        p.image_id = im.id;
        p.box = gt.box;
        p.score = std::max(0.0, score);
        p.token = cls.name;
        p.caption_class_id = cls.id;
        run.predictions.push_back(std::move(p));
      }
    }
  }

  ProtocolConfig eval_cfg = cfg;
  eval_cfg.variant = Protocol::kThreeFOvd;
  run.report = eval_3fovd(ds, run.predictions, eval_cfg);
  return run;
}

}  // namespace ovd
