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
#include <span>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "acdc/geometry.hpp"
#include "acdc/sequence.hpp"

namespace acdc {

/// Everything a policy may look at for one simulation step. The observation
/// image is all a learned controller needs; world-frame boxes and camera
/// state are privileged information for the ground-truth expert, and
/// fov_boxes (clipped, FoV-local) are what a detector stage consumes.
struct Observation {
  int frame_index;
  const cv::Mat& image;
  const CameraState& camera;
  const CameraIntrinsics& intrinsics;
  std::span<const BoundingBox> world_boxes;
  std::span<const BoundingBox> fov_boxes;
};

/// A camera policy: one action per frame. Stateful controllers must be
/// reset() between episodes; a single episode is strictly sequential.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual std::string name() const = 0;
  virtual void reset() {}
  /// Re-derives any internal randomness; no-op for deterministic policies.
  virtual void reseed(std::uint64_t) {}
  virtual ControlLabel act(const Observation& obs) = 0;
};

struct StepRecord {
  int frame_index = 0;
  CameraState camera_before;
  CameraState camera_after;
  ControlLabel action_applied;
  ControlLabel expert;
  int visible_count = 0;
  double latency_s = 0;
};

struct EpisodeReport {
  std::string controller_name;
  std::string sequence_id;
  std::vector<StepRecord> steps;
  double mean_visible = 0;
  double mean_abs_control_error_x = 0;
  double mean_abs_control_error_y = 0;
  double throughput_fps = 0;
  bool complete = true;
};

/// Counters for conditions worth surfacing but not fatal.
struct SimStats {
  int clipped_actions = 0;  // actions outside [-1,1], clipped before applying
};

/// Boxes whose center lies strictly inside the FoV, translated to FoV-local
/// coordinates and clipped to the FoV rectangle.
std::vector<BoundingBox> visible_targets(const CameraState& camera,
                                         const CameraIntrinsics& intr,
                                         std::span<const BoundingBox> world_boxes);

/// Exact pixel crop of the world frame at the FoV rectangle.
cv::Mat render_observation(const CameraState& camera, const CameraIntrinsics& intr,
                           const cv::Mat& world);

/// Applies an action: origin shifts by the rounded pixel displacement, then
/// clamps to the world bounds. Out-of-range actions are clipped to [-1,1]
/// (mirroring the network's bounded output head) and counted in stats.
CameraState step(const CameraState& camera, const ControlLabel& action,
                 const CameraIntrinsics& intr, int world_width, int world_height,
                 SimStats* stats = nullptr);

/// Runs one controller over a full sequence from a given start state.
/// A controller exception aborts the episode; the partial report is flagged
/// incomplete.
EpisodeReport run_episode(const FrameSequence& seq, Controller& controller,
                          const CameraState& start, const CameraIntrinsics& intr);

/// Episode report export/ingest: JSONL with a header, one record per step,
/// and a trailing summary record.
void write_episode_report(const EpisodeReport& report, const std::filesystem::path& file);
EpisodeReport read_episode_report(const std::filesystem::path& file);

}  // namespace acdc
