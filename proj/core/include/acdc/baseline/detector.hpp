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
#ifndef ACDC_BASELINE_DETECTOR_HPP_
#define ACDC_BASELINE_DETECTOR_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "acdc/geometry.hpp"

namespace acdc {

struct Detection {
  BoundingBox box;  // FoV-local coordinates
  double score = 1.0;
};

// Noise model standing in for a real detector: drops, jitters, and fabricates
// boxes around the ground truth. With all noise at zero it reproduces the
// ground truth exactly.
struct NoisyOracleDetectorConfig {
  double center_jitter_sigma = 0;  // pixels
  double size_jitter_sigma = 0;    // fraction of box size
  double miss_prob = 0;
  double false_positive_rate = 0;  // expected spurious boxes per frame
  std::uint64_t seed = 0;

  void validate() const;
};

// Applies the noise model to the ground-truth FoV-local boxes of one frame.
// Deterministic per (config seed, frame_index).
std::vector<Detection> detect(const std::vector<BoundingBox>& fov_boxes,
                              const CameraIntrinsics& intr,
                              const NoisyOracleDetectorConfig& config, int frame_index);

// Replay adapter for detector outputs produced elsewhere. Line format:
//   frame x_min y_min x_max y_max score
// Blank lines and lines starting with '#' are skipped. Malformed lines raise
// LoadError naming the line number.
std::map<int, std::vector<Detection>> load_external_detections(
    const std::filesystem::path& path);

}  // namespace acdc

#endif  // ACDC_BASELINE_DETECTOR_HPP_
