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

#ifndef OVDBENCH_SYNTH_HPP_
#define OVDBENCH_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ovd/datamodel.hpp"
#include "ovd/embedcache.hpp"
#include "ovd/metrics.hpp"
#include "ovd/protocols.hpp"

namespace ovd {

// Scene layout knobs for the synthetic corpus. Captions are built from a
// fixed template: article + palette color + class name + component words, so
// every caption contains its class-name token and each component word.
struct SceneSpec {
  int image_count = 10;
  int image_width = 640;
  int image_height = 480;
  int min_objects = 1;
  int max_objects = 4;
  int class_count = 3;
  std::vector<std::string> component_words = {"text", "logo", "wheel"};
  std::vector<std::string> palette = {"red", "green", "blue", "yellow",
                                      "black"};
  // > 0 distributes images into that many timestamped sequences.
  int sequence_count = 0;
  double mean_frame_gap = 3.0;
  // Placement rejection caps: pairwise IoU and pairwise overlap proportion
  // between object boxes in one image.
  double max_object_iou = 0.5;
  double max_object_overlap = 0.65;
};

// Fraction of stack[index] left visible by the boxes stacked above it
// (indices greater than `index`). Exact, via coordinate compression.
double visible_fraction(const std::vector<Box>& stack, size_t index);

// Deterministic synthetic dataset. Later-placed objects occlude earlier
// ones; an object whose visible fraction drops below 1/3 gets no
// ground-truth box.
Dataset generate_dataset(const SceneSpec& spec, uint64_t seed);

struct MockDetectorConfig {
  double localization_jitter = 0.0;  // uniform corner noise, pixels
  std::pair<double, double> tp_score_range = {0.6, 1.0};
  std::pair<double, double> fp_score_range = {0.1, 0.4};
  // When true, fp_score_range holds fractions of the parent score, so every
  // component scores strictly below the box it is nested in.
  bool component_score_relative = false;
  double miss_rate = 0.0;
  double component_fp_rate = 0.0;  // Poisson mean per detected object
  std::vector<std::string> component_words = {"text", "logo", "wheel"};
  double unk_rate = 0.0;  // class-name token replaced by "[UNK]"
  uint64_t seed = 0;
};

// Runs the mock detector for one caption (= one class) over the whole
// dataset: a jittered box per ground truth of the class unless missed, plus
// Poisson-many component boxes nested in each detection, each under 1/4 of
// its parent's area. Deterministic under (cfg.seed, class_id).
std::vector<Prediction> mock_detect(const Dataset& ds, int64_t class_id,
                                    const MockDetectorConfig& cfg);

// mock_detect over every class, concatenated in class order.
std::vector<Prediction> mock_detect_all(const Dataset& ds,
                                        const MockDetectorConfig& cfg);

// Predictions carrying a component word as token.
int count_component_predictions(const std::vector<Prediction>& preds,
                                const MockDetectorConfig& cfg);

// Stand-in visual feature of a ground-truth crop: the hash-bag embedding of
// its class caption.
Embedding box_feature(const Dataset& ds, const GroundTruth& gt, size_t dim);

// Caption-conditioned evaluation driven through the embedding path, with the
// encoder-call ledger attached. Every ground-truth box is scored against
// every class caption; caption embeddings come from the cache or from direct
// encoder calls depending on use_cache. Scores, predictions and the report
// are identical either way; only the encoder_calls differ.
struct InstrumentedRun {
  EvalReport report;
  CostModel cost;
  std::vector<Prediction> predictions;
};
InstrumentedRun run_instrumented_3fovd(const Dataset& ds,
                                       const EmbedderPort& embedder,
                                       bool use_cache,
                                       const ProtocolConfig& cfg);

}  // namespace ovd

#endif  // OVDBENCH_SYNTH_HPP_
