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
#ifndef ACDC_BASELINE_TRACKER_HPP_
#define ACDC_BASELINE_TRACKER_HPP_

#include <vector>

#include "acdc/baseline/assignment.hpp"
#include "acdc/baseline/detector.hpp"
#include "acdc/baseline/kalman.hpp"

namespace acdc {

struct TrackerParams {
  KalmanConfig kalman;
  double gate = 40;      // association gate, pixels
  int confirm_hits = 3;  // tentative -> confirmed after this many consecutive hits
  int kill_misses = 5;   // dead after this many consecutive misses

  void validate() const;
};

// Tracking-by-detection over one camera's detection stream. Stateful and
// single-episode-exclusive; independent episodes own their own instance.
class MultiTargetTracker {
 public:
  explicit MultiTargetTracker(TrackerParams params = {});

  void reset();

  // One frame: predict every track, associate by center distance, update
  // matched tracks, spawn tentative tracks from unmatched detections, and
  // drop tracks whose consecutive miss count reaches the kill threshold.
  // A newly spawned track starts with one hit.
  void step(const std::vector<Detection>& detections);

  // Translates every track estimate, compensating camera motion between
  // frames so track coordinates stay FoV-local.
  void shift(double dx, double dy);

  const std::vector<TrackState>& tracks() const { return tracks_; }
  std::vector<cv::Point2d> confirmed_positions() const;
  int confirmed_count() const;

 private:
  TrackerParams params_;
  std::vector<TrackState> tracks_;
  int next_id_ = 1;
};

// COM control from confirmed track estimates: steers the center of mass of
// the given FoV-local positions toward the FoV center, clamped to the label
// range. Count is the number of confirmed tracks. (0,0,0) with no input.
ControlLabel com_control(const std::vector<cv::Point2d>& confirmed_positions,
                         const CameraIntrinsics& intr);

}  // namespace acdc

#endif  // ACDC_BASELINE_TRACKER_HPP_
