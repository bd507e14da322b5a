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
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "acdc/geometry.hpp"
#include "acdc/sequence.hpp"

namespace acdc {

/// Where a sample was cropped from; enables exact re-cropping (translation
/// augmentation) and expert-label recomputation.
struct SampleProvenance {
  std::string sequence_id;
  int frame_index = -1;
  int camera_x = 0;
  int camera_y = 0;

  bool operator==(const SampleProvenance&) const = default;
};

/// One expert state-action pair: the observation crop and the control that
/// would center the visible targets.
struct TrainingSample {
  cv::Mat image;  // fov_height x fov_width x 3, 8-bit
  ControlLabel label;
  SampleProvenance provenance;
};

enum class Split { train, test };

struct DatasetManifest {
  CameraIntrinsics intrinsics;
  std::uint64_t seed = 0;
  std::vector<TrainingSample> samples;
  std::vector<Split> split;  // parallel to samples

  std::vector<int> train_indices() const;
  std::vector<int> test_indices() const;
};

/// Samples (frame, camera origin) pairs uniformly at random and records the
/// observation with its expert label. Deterministic given seed; sample i
/// depends only on (seed, i).
std::vector<TrainingSample> generate_pairs(const FrameSequence& seq,
                                           const CameraIntrinsics& intr,
                                           int n_samples, std::uint64_t seed);

/// Random train/test partition with |train| ~= train_fraction * N. Samples
/// originating from the same (sequence, frame) always land in the same split
/// so temporally correlated crops cannot leak across the boundary.
DatasetManifest split_dataset(std::vector<TrainingSample> samples,
                              const CameraIntrinsics& intr, double train_fraction,
                              std::uint64_t seed);

/// Dataset directory layout: images/NNNNNN.png plus manifest.jsonl (header
/// record, then one record per sample). Lossless round trip, pixel-exact
/// images.
void write_dataset(const DatasetManifest& manifest, const std::filesystem::path& dir);
DatasetManifest read_dataset(const std::filesystem::path& dir);

}  // namespace acdc
