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

#ifndef OVDBENCH_GEOMETRY_HPP_
#define OVDBENCH_GEOMETRY_HPP_

namespace ovd {

// Axis-aligned box in pixel coordinates, corner form. Degenerate (zero-area)
// boxes are legal; inverted or non-finite ones are not.
struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }

  bool operator==(const Box&) const = default;
};

bool box_is_valid(const Box& b);

// (x_max-x_min) * (y_max-y_min); 0 for degenerate boxes.
double area(const Box& b);

double intersection_area(const Box& a, const Box& b);

// Intersection over union; 0 when the union has zero area.
double iou(const Box& a, const Box& b);

// Intersection area divided by area(candidate). Asymmetric: 1.0 whenever the
// candidate is contained in `other`. 0 when the candidate has zero area.
double overlap_ratio(const Box& candidate, const Box& other);

// Clamps the box to [0,width] x [0,height].
Box clamp_to_image(const Box& b, double width, double height);

}  // namespace ovd

#endif  // OVDBENCH_GEOMETRY_HPP_
