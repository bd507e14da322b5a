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

namespace acdc {

struct AnnotatedFrame {
  cv::Mat image;                   // H x W x 3, 8-bit
  std::vector<BoundingBox> boxes;  // world-frame ground truth
};

/// Ordered annotated frames a virtual camera moves over. Immutable after
/// load/synthesis; shareable across concurrently running episodes.
struct FrameSequence {
  std::string id;
  int world_width = 0;
  int world_height = 0;
  double frame_rate = 0;
  std::vector<AnnotatedFrame> frames;
};

/// Parameters for the synthetic-sequence generator: rectangular targets with
/// constant velocity reflecting at the world borders over a static textured
/// background.
struct SynthConfig {
  int world_width = 768;
  int world_height = 576;
  int frame_count = 200;
  int target_count = 5;
  int target_min_w = 14;
  int target_max_w = 30;
  int target_min_h = 28;
  int target_max_h = 56;
  double speed_min = 0.5;       // px/frame
  double speed_max = 3.0;       // px/frame
  double pixel_noise_sigma = 0.0;  // per-frame sensor noise, 0 = off
  double frame_rate = 7.0;
  std::string sequence_id = "synth";

  void validate() const;  // throws ConfigError
};

/// Deterministic given (config, seed); annotations exactly match the
/// rendered target rectangles.
FrameSequence synthesize_sequence(const SynthConfig& config, std::uint64_t seed);

/// Reads a sequence directory (annotations.jsonl + referenced images).
/// Throws LoadError naming the offending record on any malformed input.
FrameSequence load_sequence(const std::filesystem::path& dir);

/// Writes frames/NNNNNN.png plus annotations.jsonl. write(load(dir)) is
/// byte-identical to the original directory.
void write_sequence(const FrameSequence& seq, const std::filesystem::path& dir);

}  // namespace acdc
