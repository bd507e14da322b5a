/*
 * Copyright 2026 The ACDC Workbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef ACDC_BASELINE_ASSIGNMENT_HPP_
#define ACDC_BASELINE_ASSIGNMENT_HPP_

#include <utility>
#include <vector>

#include <opencv2/core.hpp>

namespace acdc {

// Globally optimal one-to-one assignment minimizing total cost (Hungarian
// algorithm with potentials, O(n^2 m)). Any rectangular matrix is accepted;
// with more rows than columns, unassigned rows get -1. Throws
// std::invalid_argument on ragged input.
std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost);

struct Association {
  std::vector<std::pair<int, int>> matches;  // (track index, detection index)
  std::vector<int> unmatched_tracks;
  std::vector<int> unmatched_detections;
};

// Matches tracks to detections by center distance under a hard gate: pairs
// farther apart than `gate` pixels are never matched, even if that leaves
// both sides unmatched. Throws std::invalid_argument when gate <= 0.
Association associate(const std::vector<cv::Point2d>& track_centers,
                      const std::vector<cv::Point2d>& detection_centers, double gate);

}  // namespace acdc

#endif  // ACDC_BASELINE_ASSIGNMENT_HPP_
