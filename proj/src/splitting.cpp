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

#include "ovd/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ovd/errors.hpp"
#include "ovd/log.hpp"
#include "ovd/rng.hpp"

namespace ovd {

std::vector<std::vector<int64_t>> temporal_clusters(
    const std::vector<ImageRecord>& images, double gap_seconds) {
  if (gap_seconds <= 0.0) {
    throw InvalidArgumentError("temporal_clusters: gap must be positive");
  }

  std::vector<std::vector<int64_t>> clusters;

  std::map<int64_t, std::vector<const ImageRecord*>> sequences;
  for (const auto& im : images) {
    if (im.sequence_id.has_value()) {
      if (!im.timestamp.has_value()) {
        throw IntegrityError("image " + std::to_string(im.id) +
                             " has a sequence_id but no timestamp");
      }
      sequences[*im.sequence_id].push_back(&im);
    } else {
      clusters.push_back({im.id});
    }
  }

  for (auto& [_, frames] : sequences) {
    std::sort(frames.begin(), frames.end(),
              [](const ImageRecord* a, const ImageRecord* b) {
                if (*a->timestamp != *b->timestamp)
                  return *a->timestamp < *b->timestamp;
                return a->id < b->id;
              });
    // Sorted sweep: a gap > threshold between neighbours closes the chain.
    std::vector<int64_t> current;
    for (size_t i = 0; i < frames.size(); ++i) {
      if (!current.empty() &&
          *frames[i]->timestamp - *frames[i - 1]->timestamp > gap_seconds) {
        clusters.push_back(std::move(current));
        current.clear();
      }
      current.push_back(frames[i]->id);
    }
    if (!current.empty()) clusters.push_back(std::move(current));
  }

  std::sort(clusters.begin(), clusters.end(),
            [](const std::vector<int64_t>& a, const std::vector<int64_t>& b) {
              return *std::min_element(a.begin(), a.end()) <
                     *std::min_element(b.begin(), b.end());
            });
  return clusters;
}

SplitAssignment split(const std::vector<std::vector<int64_t>>& clusters,
                      const std::array<double, 3>& target_ratios,
                      uint64_t seed) {
  double ratio_sum = 0.0;
  for (double r : target_ratios) {
    if (r < 0.0) throw InvalidArgumentError("split: ratios must be >= 0");
    ratio_sum += r;
  }
  if (std::abs(ratio_sum - 1.0) > 1e-9) {
    throw InvalidArgumentError("split: ratios must sum to 1");
  }

  long total = 0;
  for (const auto& c : clusters) total += static_cast<long>(c.size());

  SplitAssignment out;
  out.cluster_count = static_cast<int>(clusters.size());
  if (total == 0) return out;

  const double max_target = *std::max_element(target_ratios.begin(),
                                              target_ratios.end());
  for (const auto& c : clusters) {
    if (static_cast<double>(c.size()) >
        max_target * static_cast<double>(total) +
            kSplitRatioTolerance * static_cast<double>(total)) {
      throw InfeasibleError("split: a cluster of " +
                            std::to_string(c.size()) +
                            " images exceeds the largest target of " +
                            std::to_string(max_target * total) + " images");
    }
  }

  std::vector<size_t> order(clusters.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return clusters[a].size() > clusters[b].size();
  });

  std::array<double, 3> target_counts;
  std::array<long, 3> assigned = {0, 0, 0};
  for (int s = 0; s < 3; ++s) {
    target_counts[s] = target_ratios[s] * static_cast<double>(total);
  }

  for (size_t idx : order) {
    int best = 0;
    double best_deficit = -1e300;
    for (int s = 0; s < 3; ++s) {
      const double deficit = target_counts[s] - static_cast<double>(assigned[s]);
      if (deficit > best_deficit) {
        best_deficit = deficit;
        best = s;
      }
    }
    assigned[best] += static_cast<long>(clusters[idx].size());
    for (int64_t id : clusters[idx]) {
      out.assignment[id] = static_cast<SplitSet>(best);
    }
  }

  for (int s = 0; s < 3; ++s) {
    out.achieved_ratios[s] =
        static_cast<double>(assigned[s]) / static_cast<double>(total);
    if (std::abs(out.achieved_ratios[s] - target_ratios[s]) >
        kSplitRatioTolerance) {
      log_warn("split " + std::to_string(s) + " achieved ratio " +
               std::to_string(out.achieved_ratios[s]) + " misses target " +
               std::to_string(target_ratios[s]) + " by more than the " +
               std::to_string(kSplitRatioTolerance) + " tolerance");
    }
  }
  return out;
}

std::vector<std::pair<int64_t, long>> class_distribution(const Dataset& ds) {
  std::map<int64_t, std::set<int64_t>> images_per_class;
  for (const auto& gt : ds.ground_truth) {
    images_per_class[gt.class_id].insert(gt.image_id);
  }
  std::vector<std::pair<int64_t, long>> out;
  out.reserve(images_per_class.size());
  for (const auto& [class_id, images] : images_per_class) {
    out.emplace_back(class_id, static_cast<long>(images.size()));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

bool leakage_free(const std::vector<ImageRecord>& images,
                  const SplitAssignment& assignment, double gap_seconds) {
  std::map<int64_t, std::vector<const ImageRecord*>> sequences;
  for (const auto& im : images) {
    if (im.sequence_id.has_value()) sequences[*im.sequence_id].push_back(&im);
  }
  for (const auto& [_, frames] : sequences) {
    for (size_t i = 0; i < frames.size(); ++i) {
      for (size_t j = i + 1; j < frames.size(); ++j) {
        if (std::abs(*frames[i]->timestamp - *frames[j]->timestamp) >
            gap_seconds) {
          continue;
        }
        auto a = assignment.assignment.find(frames[i]->id);
        auto b = assignment.assignment.find(frames[j]->id);
        if (a == assignment.assignment.end() ||
            b == assignment.assignment.end() || a->second != b->second) {
          return false;
        }
      }
    }
  }
  return true;
}

nlohmann::json splits_to_json(const SplitAssignment& assignment,
                              double gap_seconds, uint64_t seed) {
  std::array<std::vector<int64_t>, 3> ids;
  for (const auto& [id, set] : assignment.assignment) {
    ids[static_cast<size_t>(set)].push_back(id);
  }
  for (auto& v : ids) std::sort(v.begin(), v.end());
  nlohmann::json j;
  j["train"] = ids[0];
  j["val"] = ids[1];
  j["test"] = ids[2];
  j["gap_seconds"] = gap_seconds;
  j["seed"] = seed;
  return j;
}

}  // namespace ovd
