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

#include "doctest.h"
#include "oracles.hpp"
#include "ovd/matching.hpp"
#include "ovd/rng.hpp"

using namespace ovd;

namespace {

Prediction pred(Box b, double score) { return {1, b, score, "t", 1}; }
GroundTruth gt(Box b) { return {1, b, 1}; }

std::pair<std::vector<Prediction>, std::vector<GroundTruth>> random_cell(
    Rng& rng, int max_boxes) {
  auto random_box = [&]() {
    const double x0 = static_cast<double>(rng.uniform_int(0, 30));
    const double y0 = static_cast<double>(rng.uniform_int(0, 30));
    return Box{x0, y0, x0 + static_cast<double>(rng.uniform_int(1, 10)),
               y0 + static_cast<double>(rng.uniform_int(1, 10))};
  };
  std::vector<Prediction> preds;
  std::vector<GroundTruth> gts;
  const int n_gt = static_cast<int>(rng.uniform_int(0, max_boxes));
  for (int i = 0; i < n_gt; ++i) gts.push_back(gt(random_box()));
  const int n_pred = static_cast<int>(rng.uniform_int(0, max_boxes));
  for (int i = 0; i < n_pred; ++i) {
    Box b = random_box();
    if (!gts.empty() && rng.bernoulli(0.6)) {
      b = gts[static_cast<size_t>(rng.uniform_int(
                  0, static_cast<int64_t>(gts.size()) - 1))]
              .box;
      b.x_min += static_cast<double>(rng.uniform_int(-2, 2));
      b.x_max += static_cast<double>(rng.uniform_int(-2, 2));
      if (b.x_max < b.x_min) std::swap(b.x_min, b.x_max);
    }
    preds.push_back(pred(b, static_cast<double>(rng.uniform_int(0, 10)) / 10.0));
  }
  return {preds, gts};
}

}  // namespace

TEST_CASE("exact match is a pair") {
  const auto r = match_greedy({pred({0, 0, 10, 10}, 0.9)}, {gt({0, 0, 10, 10})},
                              0.5);
  REQUIRE(r.matched_pairs.size() == 1);
  CHECK(r.matched_pairs[0].iou == 1.0);
  CHECK(r.false_positives.empty());
  CHECK(r.false_negatives.empty());
}

TEST_CASE("iou below threshold gives FP and FN") {
  // 10x10 vs shifted by 5: iou 1/3 < 0.5
  const auto r = match_greedy({pred({0, 0, 10, 10}, 0.9)}, {gt({5, 0, 15, 10})},
                              0.5);
  CHECK(r.matched_pairs.empty());
  CHECK(r.false_positives == std::vector<int>{0});
  CHECK(r.false_negatives == std::vector<int>{0});
}

TEST_CASE("higher score wins the only gt") {
  const auto r = match_greedy(
      {pred({0, 0, 10, 10}, 0.8), pred({1, 0, 11, 10}, 0.9)},
      {gt({0, 0, 10, 10})}, 0.5);
  REQUIRE(r.matched_pairs.size() == 1);
  CHECK(r.matched_pairs[0].prediction_index == 1);  // score 0.9 goes first
  CHECK(r.false_positives == std::vector<int>{0});
}

TEST_CASE("match counts are consistent") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto [preds, gts] = random_cell(rng, 8);
    const auto r = match_greedy(preds, gts, 0.5);
    CHECK(r.matched_pairs.size() + r.false_positives.size() == preds.size());
    CHECK(r.matched_pairs.size() + r.false_negatives.size() == gts.size());
    for (const auto& p : r.matched_pairs) CHECK(p.iou >= 0.5);
  }
}

TEST_CASE("raising the threshold never increases matches") {
  Rng rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto [preds, gts] = random_cell(rng, 6);
    size_t prev = preds.size() + 1;
    for (double thr : {0.3, 0.5, 0.7, 0.9}) {
      const auto r = match_greedy(preds, gts, thr);
      CHECK(r.matched_pairs.size() <= prev);
      prev = r.matched_pairs.size();
    }
  }
}

TEST_CASE("greedy equals the explicit score-priority oracle") {
  Rng rng(9);
  for (int trial = 0; trial < 400; ++trial) {
    const auto [preds, gts] = random_cell(rng, 6);
    for (double thr : {0.3, 0.5, 0.75}) {
      const auto r = match_greedy(preds, gts, thr);
      CHECK(static_cast<int>(r.matched_pairs.size()) ==
            ovd::testing::oracle_greedy_tp_count(preds, gts, thr));
    }
  }
}
