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

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ovd/errors.hpp"
#include "ovd/metrics.hpp"
#include "ovd/rng.hpp"

using namespace ovd;

namespace {

Dataset tiny_dataset() {
  Dataset ds;
  ds.images = {{1, 100, 100, std::nullopt, std::nullopt},
               {2, 100, 100, std::nullopt, std::nullopt}};
  ClassEntry c;
  c.id = 1;
  c.name = "cls1";
  c.caption = "a cls1";
  c.coarse_class_id = 1;
  c.novelty = Novelty::kBase;
  ds.classes = {c};
  ds.ground_truth = {{1, Box{0, 0, 10, 10}, 1}, {2, Box{20, 20, 40, 40}, 1}};
  ds.reindex();
  return ds;
}

}  // namespace

TEST_CASE("pr_curve on a perfect run ends at (1,1)") {
  const PRCurve c = pr_curve({{0.9, true, 1, 0}, {0.8, true, 1, 1}}, 2);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points.back() == std::pair<double, double>{1.0, 1.0});
}

TEST_CASE("pr_curve with no detections is empty") {
  const PRCurve c = pr_curve({}, 3);
  CHECK(c.points.empty());
  CHECK(c.n_gt == 3);
  CHECK(average_precision(c) == 0.0);
}

TEST_CASE("pr_curve TP then FP over one gt") {
  const PRCurve c = pr_curve({{0.9, true, 1, 0}, {0.8, false, 1, 1}}, 1);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0] == std::pair<double, double>{1.0, 1.0});
  CHECK(c.points[1] == std::pair<double, double>{1.0, 0.5});
}

TEST_CASE("recall is non-decreasing along the curve") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<DetectionOutcome> outcomes;
    const int n = static_cast<int>(rng.uniform_int(0, 20));
    int tp = 0;
    for (int i = 0; i < n; ++i) {
      const bool is_tp = rng.bernoulli(0.5);
      tp += is_tp ? 1 : 0;
      outcomes.push_back({rng.next_double(), is_tp,
                          rng.uniform_int(1, 3), i});
    }
    const PRCurve c = pr_curve(outcomes, tp + static_cast<int>(rng.uniform_int(0, 3)));
    for (size_t i = 1; i < c.points.size(); ++i) {
      CHECK(c.points[i].first >= c.points[i - 1].first);
    }
  }
}

TEST_CASE("average_precision matches the hand-computed grid cases") {
  // perfect single detection
  CHECK(average_precision(pr_curve({{0.9, true, 1, 0}}, 1)) == 1.0);
  // FP ranked above the TP: every grid point sees precision 0.5
  const PRCurve c = pr_curve({{0.9, false, 1, 0}, {0.8, true, 1, 1}}, 1);
  CHECK(average_precision(c) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("coco_map perfect and empty predictions") {
  const Dataset ds = tiny_dataset();
  std::vector<Prediction> perfect = {
      {1, Box{0, 0, 10, 10}, 1.0, "cls1", 1},
      {2, Box{20, 20, 40, 40}, 1.0, "cls1", 1},
  };
  const auto thresholds = coco_default_thresholds();
  CHECK(coco_map(ds, perfect, thresholds).map == doctest::Approx(1.0));
  CHECK(coco_map(ds, {}, thresholds).map == 0.0);

  Dataset empty = ds;
  empty.ground_truth.clear();
  CHECK_THROWS_AS(coco_map(empty, perfect, thresholds), EmptyDatasetError);
}

TEST_CASE("coco_map equals the brute-force oracle on random instances") {
  Rng rng(2026);
  const auto thresholds = coco_default_thresholds();
  for (int trial = 0; trial < 120; ++trial) {
    const auto inst = ovd::testing::random_instance(rng, 4, 8, 3);
    const double engine = coco_map(inst.ds, inst.preds, thresholds).map;
    const double oracle = ovd::testing::oracle_map(inst.ds, inst.preds, thresholds);
    CHECK(std::abs(engine - oracle) <= 1e-9);
  }
}

TEST_CASE("mAP is monotone non-increasing in the threshold") {
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = ovd::testing::random_instance(rng, 3, 8, 2);
    double prev = 1.0 + 1e-12;
    for (double thr : {0.3, 0.5, 0.7, 0.9}) {
      const double v = coco_map(inst.ds, inst.preds, {thr}).map;
      CHECK(v <= prev + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("duplicating every prediction never increases mAP") {
  Rng rng(19);
  const auto thresholds = coco_default_thresholds();
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = ovd::testing::random_instance(rng, 3, 6, 2);
    const double base = coco_map(inst.ds, inst.preds, thresholds).map;
    std::vector<Prediction> doubled = inst.preds;
    doubled.insert(doubled.end(), inst.preds.begin(), inst.preds.end());
    const double dup = coco_map(inst.ds, doubled, thresholds).map;
    CHECK(dup <= base + 1e-12);
  }
}

TEST_CASE("coco_map is identical for any worker count") {
  Rng rng(23);
  const auto inst = ovd::testing::random_instance(rng, 4, 8, 3);
  const auto thresholds = coco_default_thresholds();
  const auto a = coco_map(inst.ds, inst.preds, thresholds, 1);
  const auto b = coco_map(inst.ds, inst.preds, thresholds, 4);
  CHECK(a.map == b.map);
  CHECK(a.per_class_ap == b.per_class_ap);
  CHECK(a.tp == b.tp);
  CHECK(a.fp == b.fp);
  CHECK(a.fn == b.fn);
}

TEST_CASE("classes without ground truth stay out of the mean") {
  Dataset ds = tiny_dataset();
  ClassEntry extra;
  extra.id = 2;
  extra.name = "cls2";
  extra.caption = "a cls2";
  extra.coarse_class_id = 1;
  extra.novelty = Novelty::kNovel;
  ds.classes.push_back(extra);
  ds.reindex();

  std::vector<Prediction> preds = {
      {1, Box{0, 0, 10, 10}, 1.0, "cls1", 1},
      {2, Box{20, 20, 40, 40}, 1.0, "cls1", 1},
      {1, Box{50, 50, 60, 60}, 0.9, "cls2", 2},  // class 2 has no gt
  };
  const auto report = coco_map(ds, preds, {0.5});
  CHECK(report.map == doctest::Approx(1.0));
  CHECK(report.per_class_ap.count(2) == 0);
  CHECK(report.fp == 1);  // the gt-less class still shows up in the counts
}

TEST_CASE("report serialization carries the table shape") {
  const Dataset ds = tiny_dataset();
  std::vector<Prediction> preds = {{1, Box{0, 0, 10, 10}, 1.0, "cls1", 1}};
  const auto report = coco_map(ds, preds, {0.5, 0.75});
  const auto j = report_to_json(report);
  CHECK(j["per_class_ap"]["1"].size() == 2);
  CHECK(j["counts"]["tp"] == 1);
  const std::string table = report_to_table(report);
  CHECK(table.find("mAP:") != std::string::npos);
  CHECK(table.find("AP@0.50") != std::string::npos);
}
