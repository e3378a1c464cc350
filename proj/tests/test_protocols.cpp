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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ovd/errors.hpp"
#include "ovd/json_io.hpp"
#include "ovd/protocols.hpp"
#include "ovd/rng.hpp"
#include "ovd/synth.hpp"

using namespace ovd;

namespace {

Dataset two_image_dataset() {
  Dataset ds;
  ds.images = {{1, 200, 200, std::nullopt, std::nullopt},
               {2, 200, 200, std::nullopt, std::nullopt}};
  for (int c = 1; c <= 2; ++c) {
    ClassEntry e;
    e.id = c;
    e.name = "cls" + std::to_string(c);
    e.caption = "a cls" + std::to_string(c) + " with text and logo";
    e.coarse_class_id = 1;
    e.novelty = c == 1 ? Novelty::kBase : Novelty::kNovel;
    ds.classes.push_back(e);
  }
  ds.ground_truth = {
      {1, Box{10, 10, 60, 60}, 1},
      {1, Box{100, 100, 160, 160}, 2},
      {2, Box{20, 20, 80, 80}, 1},
  };
  ds.reindex();
  return ds;
}

std::vector<Prediction> perfect_predictions(const Dataset& ds) {
  std::vector<Prediction> out;
  for (const auto& gt : ds.ground_truth) {
    const ClassEntry* cls = ds.find_class(gt.class_id);
    out.push_back({gt.image_id, gt.box, 1.0, cls->name, gt.class_id});
  }
  return out;
}

}  // namespace

TEST_CASE("supervised: perfect and empty predictions") {
  const Dataset ds = two_image_dataset();
  ProtocolConfig cfg;
  cfg.variant = Protocol::kSupervised;
  CHECK(eval_supervised(ds, perfect_predictions(ds), cfg).map ==
        doctest::Approx(1.0));
  CHECK(eval_supervised(ds, {}, cfg).map == 0.0);
}

TEST_CASE("supervised rejects tokens outside the closed set") {
  const Dataset ds = two_image_dataset();
  ProtocolConfig cfg;
  std::vector<Prediction> preds = {{1, Box{0, 0, 5, 5}, 0.5, "unlisted", 1}};
  CHECK_THROWS_AS(eval_supervised(ds, preds, cfg), UnknownClassError);
}

TEST_CASE("supervised equals the metrics oracle on random instances") {
  Rng rng(101);
  for (int trial = 0; trial < 40; ++trial) {
    auto inst = ovd::testing::random_instance(rng, 3, 6, 2);
    // closed-set tokens; keep boxes disjoint enough for NMS neutrality by
    // deduplicating identical (image, class, box) entries
    std::vector<Prediction> preds;
    for (auto p : inst.preds) {
      p.token = "cls" + std::to_string(p.caption_class_id);
      bool dominated = false;
      for (const auto& q : preds) {
        if (q.image_id == p.image_id &&
            q.caption_class_id == p.caption_class_id &&
            iou(q.box, p.box) > 0.5) {
          dominated = true;
          break;
        }
      }
      if (!dominated) preds.push_back(p);
    }
    ProtocolConfig cfg;
    cfg.variant = Protocol::kSupervised;
    const double engine = eval_supervised(inst.ds, preds, cfg).map;
    const double oracle =
        ovd::testing::oracle_map(inst.ds, preds, cfg.iou_thresholds);
    CHECK(std::abs(engine - oracle) <= 1e-9);
  }
}

TEST_CASE("3fovd: perfect predictions score 1.0 with a novelty split") {
  const Dataset ds = two_image_dataset();
  ProtocolConfig cfg;
  cfg.variant = Protocol::kThreeFOvd;
  const EvalReport report = eval_3fovd(ds, perfect_predictions(ds), cfg);
  CHECK(report.map == doctest::Approx(1.0));
  REQUIRE(report.map_base.has_value());
  REQUIRE(report.map_novel.has_value());
  CHECK(*report.map_base == doctest::Approx(1.0));
  CHECK(*report.map_novel == doctest::Approx(1.0));
  CHECK(report.protocol == "3fovd");
}

TEST_CASE("3fovd counts every caption box as a class detection") {
  const Dataset ds = two_image_dataset();
  // tokens are arbitrary words from the caption, not class names
  std::vector<Prediction> preds;
  for (const auto& gt : ds.ground_truth) {
    preds.push_back({gt.image_id, gt.box, 1.0, "text", gt.class_id});
  }
  ProtocolConfig cfg;
  cfg.variant = Protocol::kThreeFOvd;
  CHECK(eval_3fovd(ds, preds, cfg).map == doctest::Approx(1.0));
}

TEST_CASE("3fovd: high-scoring component boxes cost mAP, suppression restores it") {
  // Two objects of one class across two images with different TP scores; the
  // component box of the strong object outranks the weak object's TP.
  Dataset ds;
  ds.images = {{1, 200, 200, std::nullopt, std::nullopt},
               {2, 200, 200, std::nullopt, std::nullopt}};
  ClassEntry e;
  e.id = 1;
  e.name = "cls1";
  e.caption = "a cls1 with text";
  e.coarse_class_id = 1;
  e.novelty = Novelty::kBase;
  ds.classes = {e};
  ds.ground_truth = {{1, Box{10, 10, 110, 110}, 1}, {2, Box{10, 10, 110, 110}, 1}};
  ds.reindex();

  const std::vector<Prediction> perfect = {
      {1, Box{10, 10, 110, 110}, 1.0, "cls1", 1},
      {2, Box{10, 10, 110, 110}, 0.8, "cls1", 1},
  };
  std::vector<Prediction> with_components = perfect;
  with_components.push_back({1, Box{20, 20, 50, 50}, 0.9, "text", 1});

  ProtocolConfig cfg;
  cfg.variant = Protocol::kThreeFOvd;
  const double clean = eval_3fovd(ds, perfect, cfg).map;
  const double noisy = eval_3fovd(ds, with_components, cfg).map;
  CHECK(clean == doctest::Approx(1.0));
  CHECK(noisy < clean);
  // independent confirmation of both runs
  CHECK(std::abs(noisy - ovd::testing::oracle_map(ds, with_components,
                                                  cfg.iou_thresholds)) <= 1e-9);

  cfg.suppression = SuppressionConfig{0.8, 1.0, 1.0, 1e9, 1e9, false};
  CHECK(eval_3fovd(ds, with_components, cfg).map == doctest::Approx(clean));
}

TEST_CASE("3fovd strict tokens") {
  const Dataset ds = two_image_dataset();
  ProtocolConfig cfg;
  cfg.variant = Protocol::kThreeFOvd;
  cfg.strict_tokens = true;

  std::vector<Prediction> ok = {
      {1, Box{10, 10, 60, 60}, 0.9, "text", 1},
      {1, Box{10, 10, 60, 60}, 0.8, "[UNK]", 1},
  };
  CHECK_NOTHROW(eval_3fovd(ds, ok, cfg));

  std::vector<Prediction> bad = {{1, Box{10, 10, 60, 60}, 0.9, "wheel", 1}};
  CHECK_THROWS_AS(eval_3fovd(ds, bad, cfg), TokenNotInCaptionError);
  cfg.strict_tokens = false;
  CHECK_NOTHROW(eval_3fovd(ds, bad, cfg));
}

TEST_CASE("3fovd equals supervised on component-free noiseless detections") {
  SceneSpec spec;
  spec.image_count = 14;
  spec.class_count = 4;
  spec.max_object_iou = 0.4;
  const Dataset ds = generate_dataset(spec, 91);
  MockDetectorConfig det;
  det.seed = 92;
  const auto preds = mock_detect_all(ds, det);

  ProtocolConfig cfg;
  const EvalReport sup = eval_supervised(ds, preds, cfg);
  cfg.variant = Protocol::kThreeFOvd;
  const EvalReport tf = eval_3fovd(ds, preds, cfg);
  CHECK(sup.map == doctest::Approx(tf.map).epsilon(1e-12));
  CHECK(sup.per_class_ap == tf.per_class_ap);
}

TEST_CASE("novelty split brackets the overall mAP") {
  Rng rng(301);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = ovd::testing::random_instance(rng, 3, 8, 3);
    ProtocolConfig cfg;
    cfg.variant = Protocol::kThreeFOvd;
    const EvalReport r = eval_3fovd(inst.ds, inst.preds, cfg);
    if (r.map_base && r.map_novel) {
      CHECK(r.map >= std::min(*r.map_base, *r.map_novel) - 1e-12);
      CHECK(r.map <= std::max(*r.map_base, *r.map_novel) + 1e-12);
    }
  }
}

namespace {

ProtocolConfig fgovd_config(int vocabularies = 1) {
  ProtocolConfig cfg;
  cfg.variant = Protocol::kFgOvd;
  cfg.iou_thresholds = {0.5};
  cfg.negatives_per_positive = 2;
  cfg.vocabularies = vocabularies;
  return cfg;
}

CaptionGroup group_for(const Dataset& ds, size_t gt_global_index,
                       int vocabulary = 0) {
  const GroundTruth& gt = ds.ground_truth[gt_global_index];
  const auto indices = ds.gt_indices_for_image(gt.image_id);
  CaptionGroup g;
  g.image_id = gt.image_id;
  g.gt_index = static_cast<int>(
      std::find(indices.begin(), indices.end(),
                static_cast<int>(gt_global_index)) -
      indices.begin());
  g.positive = "a red widget";
  g.negatives = {"a blue widget", "a green widget"};
  g.vocabulary_id = vocabulary;
  return g;
}

}  // namespace

TEST_CASE("fgovd: argmax and IoU gate decide the outcome") {
  const Dataset ds = two_image_dataset();
  const Box gt_box = ds.ground_truth[0].box;

  CaptionGroup g = group_for(ds, 0);
  GroupScores scores(1);
  scores[0][0] = {gt_box, 0.9};
  scores[0][1] = {gt_box, 0.1};
  scores[0][2] = {gt_box, 0.1};
  EvalReport r = eval_fgovd(ds, {g}, scores, fgovd_config());
  CHECK(r.tp == 1);
  CHECK(r.map == doctest::Approx(1.0));

  // a negative ranked highest is never a TP, even with a perfect box
  scores[0][1] = {gt_box, 0.95};
  r = eval_fgovd(ds, {g}, scores, fgovd_config());
  CHECK(r.tp == 0);
  CHECK(r.map == 0.0);

  // positive wins ties
  scores[0][1] = {gt_box, 0.9};
  r = eval_fgovd(ds, {g}, scores, fgovd_config());
  CHECK(r.tp == 1);

  // bad localization fails the IoU gate
  scores[0][1] = {gt_box, 0.1};
  scores[0][0] = {Box{150, 150, 160, 160}, 0.9};
  r = eval_fgovd(ds, {g}, scores, fgovd_config());
  CHECK(r.tp == 0);

  // missing entry
  GroupScores incomplete(1);
  incomplete[0][0] = {gt_box, 0.9};
  incomplete[0][1] = {gt_box, 0.1};
  CHECK_THROWS_AS(eval_fgovd(ds, {g}, incomplete, fgovd_config()),
                  MissingScoreError);
}

TEST_CASE("fgovd AP matches a hand-pooled PR computation for every ordering") {
  Dataset ds;
  ds.images = {{1, 100, 100, std::nullopt, std::nullopt}};
  ClassEntry e;
  e.id = 1;
  e.name = "w";
  e.caption = "a w";
  ds.classes = {e};
  ds.ground_truth = {{1, Box{0, 0, 10, 10}, 1},
                     {1, Box{20, 20, 30, 30}, 1},
                     {1, Box{40, 40, 50, 50}, 1}};
  ds.reindex();

  const std::array<double, 3> score_sets = {0.9, 0.6, 0.3};
  std::array<int, 3> perm = {0, 1, 2};
  std::sort(perm.begin(), perm.end());
  do {
    // group i: TP for i==0 and i==2, FP for i==1 (negative outranked)
    std::vector<CaptionGroup> groups;
    GroupScores scores(3);
    for (int i = 0; i < 3; ++i) {
      CaptionGroup g = group_for(ds, static_cast<size_t>(i));
      groups.push_back(g);
      const double s = score_sets[static_cast<size_t>(perm[static_cast<size_t>(i)])];
      const Box box = ds.ground_truth[static_cast<size_t>(i)].box;
      if (i == 1) {
        scores[static_cast<size_t>(i)][0] = {box, s / 2.0};
        scores[static_cast<size_t>(i)][1] = {box, s};
        scores[static_cast<size_t>(i)][2] = {box, s / 4.0};
      } else {
        scores[static_cast<size_t>(i)][0] = {box, s};
        scores[static_cast<size_t>(i)][1] = {box, s / 2.0};
        scores[static_cast<size_t>(i)][2] = {box, s / 4.0};
      }
    }
    const EvalReport r = eval_fgovd(ds, groups, scores, fgovd_config());

    std::vector<DetectionOutcome> outcomes;
    for (int i = 0; i < 3; ++i) {
      outcomes.push_back(
          {score_sets[static_cast<size_t>(perm[static_cast<size_t>(i)])],
           i != 1, 1, i});
    }
    const double expected = average_precision(pr_curve(outcomes, 3));
    CHECK(r.map == doctest::Approx(expected).epsilon(1e-12));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("fgovd averages over vocabularies") {
  Dataset ds;
  ds.images = {{1, 100, 100, std::nullopt, std::nullopt}};
  ClassEntry e;
  e.id = 1;
  e.name = "w";
  e.caption = "a w";
  ds.classes = {e};
  ds.ground_truth = {{1, Box{0, 0, 10, 10}, 1}};
  ds.reindex();

  std::vector<CaptionGroup> groups = {group_for(ds, 0, 0), group_for(ds, 0, 1)};
  GroupScores scores(2);
  scores[0][0] = {ds.ground_truth[0].box, 0.9};  // vocab 0: TP
  scores[0][1] = {ds.ground_truth[0].box, 0.1};
  scores[0][2] = {ds.ground_truth[0].box, 0.1};
  scores[1][0] = {ds.ground_truth[0].box, 0.2};  // vocab 1: negative wins
  scores[1][1] = {ds.ground_truth[0].box, 0.8};
  scores[1][2] = {ds.ground_truth[0].box, 0.1};

  const EvalReport r = eval_fgovd(ds, groups, scores, fgovd_config(2));
  CHECK(r.map == doctest::Approx(0.5));
}

TEST_CASE("fgovd report is invariant under global monotone score transforms") {
  const Dataset ds = two_image_dataset();
  std::vector<CaptionGroup> groups = {group_for(ds, 0), group_for(ds, 1),
                                      group_for(ds, 2)};
  GroupScores scores(3);
  Rng rng(55);
  for (size_t g = 0; g < 3; ++g) {
    for (int c = 0; c < 3; ++c) {
      const Box box = rng.bernoulli(0.7)
                          ? ds.ground_truth[g].box
                          : Box{0, 0, 5, 5};
      scores[g][c] = {box, rng.next_double()};
    }
  }
  const auto base = eval_fgovd(ds, groups, scores, fgovd_config());

  for (auto transform : {+[](double x) { return 2.0 * x + 3.0; },
                         +[](double x) { return x * x * x; },
                         +[](double x) { return std::exp(x); }}) {
    GroupScores mapped = scores;
    for (auto& m : mapped) {
      for (auto& [_, resp] : m) resp.score = transform(resp.score);
    }
    const auto r = eval_fgovd(ds, groups, mapped, fgovd_config());
    CHECK(r.map == doctest::Approx(base.map).epsilon(1e-12));
    CHECK(r.tp == base.tp);
    CHECK(r.per_class_ap == base.per_class_ap);
  }
}

TEST_CASE("make_negative_captions replaces one palette word") {
  const auto negatives = make_negative_captions(
      "a green plum-shaped bag", {"green", "red", "blue"}, 2, 7);
  REQUIRE(negatives.size() == 2);
  for (const auto& n : negatives) {
    CHECK(n != "a green plum-shaped bag");
    const bool red = n == "a red plum-shaped bag";
    const bool blue = n == "a blue plum-shaped bag";
    CHECK((red || blue));
  }
  CHECK(negatives[0] != negatives[1]);

  CHECK_THROWS_AS(
      make_negative_captions("a plain bag", {"green", "red"}, 1, 0),
      NoAttributeError);

  // determinism
  CHECK(make_negative_captions("a green plum-shaped bag",
                               {"green", "red", "blue"}, 2, 7) == negatives);
  // replacement respects word boundaries: "greenish" is not "green"
  CHECK_THROWS_AS(
      make_negative_captions("a greenish bag", {"green", "red"}, 1, 0),
      NoAttributeError);
}

TEST_CASE("ovvg accuracy counts IoU hits and ignores scores") {
  std::vector<GroundingQuery> queries = {
      {1, "the first widget", Box{0, 0, 10, 10}},
      {1, "the second widget", Box{20, 20, 40, 40}},
      {2, "the third widget", Box{0, 0, 10, 10}},
  };
  std::vector<std::pair<int, Box>> answers = {
      {0, Box{0, 0, 10, 10}},     // exact
      {1, Box{21, 21, 41, 41}},   // iou ~0.82
      {2, Box{50, 50, 60, 60}},   // miss
  };
  const GroundingReport r = eval_ovvg(queries, answers, 0.5);
  CHECK(r.n_queries == 3);
  CHECK(r.n_correct == 2);
  CHECK(r.accuracy == doctest::Approx(2.0 / 3.0));

  // iou 0.4 at threshold 0.5 counts as incorrect: 10x10 vs shifted by 5 has
  // iou 1/3 < 0.5
  const GroundingReport below =
      eval_ovvg({{1, "q", Box{0, 0, 10, 10}}}, {{0, Box{5, 0, 15, 10}}}, 0.5);
  CHECK(below.n_correct == 0);

  CHECK_THROWS_AS(eval_ovvg(queries, {{0, Box{0, 0, 1, 1}}}, 0.5),
                  MissingAnswerError);
  std::vector<std::pair<int, Box>> doubled = answers;
  doubled.push_back({1, Box{0, 0, 1, 1}});
  CHECK_THROWS_AS(eval_ovvg(queries, doubled, 0.5), MultipleAnswerError);
}

TEST_CASE("instrumented 3fovd run: cache bounds encoder calls, report identical") {
  SceneSpec spec;
  spec.image_count = 6;
  spec.class_count = 4;
  const Dataset ds = generate_dataset(spec, 71);
  const HashBagEmbedder embedder(256);
  ProtocolConfig cfg;
  cfg.variant = Protocol::kThreeFOvd;

  const auto cached = run_instrumented_3fovd(ds, embedder, true, cfg);
  const auto direct = run_instrumented_3fovd(ds, embedder, false, cfg);

  const long n = static_cast<long>(ds.images.size());
  const long k = static_cast<long>(ds.classes.size());
  CHECK(cached.cost.encoder_calls <= n + k);
  CHECK(direct.cost.encoder_calls == n * k);
  CHECK(cached.cost.alignment_calls == direct.cost.alignment_calls);
  CHECK(cached.predictions == direct.predictions);
  CHECK(canonical_dump(report_to_json(cached.report)) ==
        canonical_dump(report_to_json(direct.report)));
}
