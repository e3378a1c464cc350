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

#ifndef OVDBENCH_SPLITTING_HPP_
#define OVDBENCH_SPLITTING_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ovd/datamodel.hpp"

namespace ovd {

inline constexpr double kDefaultTemporalGapSeconds = 5.0;
// Achieved-vs-target ratio slack, as a fraction of total images. Exceeding it
// is a warning; a single cluster larger than max(target)+tolerance is
// infeasible.
inline constexpr double kSplitRatioTolerance = 0.02;

enum class SplitSet { kTrain = 0, kVal = 1, kTest = 2 };

struct SplitAssignment {
  std::map<int64_t, SplitSet> assignment;
  std::array<double, 3> achieved_ratios = {0.0, 0.0, 0.0};
  int cluster_count = 0;
};

// Groups video frames so that any two frames of one sequence within `gap`
// seconds of each other share a cluster (transitively chained). Images
// without a sequence form singleton clusters. Clusters come out sorted by
// their smallest image id.
std::vector<std::vector<int64_t>> temporal_clusters(
    const std::vector<ImageRecord>& images, double gap_seconds);

// Assigns clusters atomically: largest first (ties in seed-shuffled order)
// into the split with the largest remaining image-count deficit. Deterministic
// under (clusters, ratios, seed). Throws InfeasibleError when a single
// cluster cannot fit the largest target even with tolerance.
SplitAssignment split(const std::vector<std::vector<int64_t>>& clusters,
                      const std::array<double, 3>& target_ratios,
                      uint64_t seed);

// (class_id, number of distinct images with at least one box of the class),
// descending by count, ties by ascending class id.
std::vector<std::pair<int64_t, long>> class_distribution(const Dataset& ds);

// Post-hoc scan of the exact guarantee: no two same-sequence frames within
// `gap` seconds land in different splits.
bool leakage_free(const std::vector<ImageRecord>& images,
                  const SplitAssignment& assignment, double gap_seconds);

nlohmann::json splits_to_json(const SplitAssignment& assignment,
                              double gap_seconds, uint64_t seed);

}  // namespace ovd

#endif  // OVDBENCH_SPLITTING_HPP_
