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

#include "ovd/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ovd {

bool box_is_valid(const Box& b) {
  return std::isfinite(b.x_min) && std::isfinite(b.y_min) &&
         std::isfinite(b.x_max) && std::isfinite(b.y_max) &&
         b.x_max >= b.x_min && b.y_max >= b.y_min;
}

double area(const Box& b) { return (b.x_max - b.x_min) * (b.y_max - b.y_min); }

double intersection_area(const Box& a, const Box& b) {
  const double w =
      std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double h =
      std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const Box& a, const Box& b) {
  const double inter = intersection_area(a, b);
  const double uni = area(a) + area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

double overlap_ratio(const Box& candidate, const Box& other) {
  const double own = area(candidate);
  if (own <= 0.0) return 0.0;
  return intersection_area(candidate, other) / own;
}

Box clamp_to_image(const Box& b, double width, double height) {
  Box out;
  out.x_min = std::clamp(b.x_min, 0.0, width);
  out.y_min = std::clamp(b.y_min, 0.0, height);
  out.x_max = std::clamp(b.x_max, 0.0, width);
  out.y_max = std::clamp(b.y_max, 0.0, height);
  return out;
}

}  // namespace ovd
