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
#include "acdc/baseline/tracker.hpp"

#include <algorithm>
#include <stdexcept>

namespace acdc {

void TrackerParams::validate() const {
  if (!(gate > 0)) throw std::invalid_argument("TrackerParams: gate must be > 0");
  if (confirm_hits < 1) throw std::invalid_argument("TrackerParams: confirm_hits must be >= 1");
  if (kill_misses < 1) throw std::invalid_argument("TrackerParams: kill_misses must be >= 1");
}

MultiTargetTracker::MultiTargetTracker(TrackerParams params) : params_(params) {
  params_.validate();
}

void MultiTargetTracker::reset() {
  tracks_.clear();
  next_id_ = 1;
}

void MultiTargetTracker::step(const std::vector<Detection>& detections) {
  for (TrackState& t : tracks_) kalman_predict(t, params_.kalman);

  std::vector<cv::Point2d> track_centers;
  track_centers.reserve(tracks_.size());
  for (const TrackState& t : tracks_) track_centers.push_back(t.position());
  std::vector<cv::Point2d> det_centers;
  det_centers.reserve(detections.size());
  for (const Detection& d : detections) det_centers.push_back(d.box.center());

  const Association assoc = associate(track_centers, det_centers, params_.gate);

  for (const auto& [ti, di] : assoc.matches) {
    TrackState& t = tracks_[ti];
    kalman_update(t, det_centers[di], params_.kalman);
    if (t.status == TrackStatus::dead) continue;
    ++t.hits;
    t.misses = 0;
    if (t.status == TrackStatus::tentative && t.hits >= params_.confirm_hits)
      t.status = TrackStatus::confirmed;
  }
  for (int ti : assoc.unmatched_tracks) {
    TrackState& t = tracks_[ti];
    t.hits = 0;
    ++t.misses;
    if (t.misses >= params_.kill_misses) t.status = TrackStatus::dead;
  }
  for (int di : assoc.unmatched_detections) {
    TrackState t = make_track(next_id_++, det_centers[di], params_.kalman);
    if (t.hits >= params_.confirm_hits) t.status = TrackStatus::confirmed;
    tracks_.push_back(t);
  }

  tracks_.erase(std::remove_if(tracks_.begin(), tracks_.end(),
                               [](const TrackState& t) {
                                 return t.status == TrackStatus::dead;
                               }),
                tracks_.end());
}

void MultiTargetTracker::shift(double dx, double dy) {
  for (TrackState& t : tracks_) {
    t.x(0) += dx;
    t.x(1) += dy;
  }
}

std::vector<cv::Point2d> MultiTargetTracker::confirmed_positions() const {
  std::vector<cv::Point2d> out;
  for (const TrackState& t : tracks_)
    if (t.status == TrackStatus::confirmed) out.push_back(t.position());
  return out;
}

int MultiTargetTracker::confirmed_count() const {
  int n = 0;
  for (const TrackState& t : tracks_)
    if (t.status == TrackStatus::confirmed) ++n;
  return n;
}

ControlLabel com_control(const std::vector<cv::Point2d>& confirmed_positions,
                         const CameraIntrinsics& intr) {
  if (confirmed_positions.empty()) return {0, 0, 0};
  double sx = 0, sy = 0;
  for (const cv::Point2d& p : confirmed_positions) {
    sx += p.x;
    sy += p.y;
  }
  const double n = static_cast<double>(confirmed_positions.size());
  ControlLabel label;
  label.u_x = std::clamp((sx / n - intr.fov_width / 2.0) / intr.fov_width, -0.5, 0.5);
  label.u_y = std::clamp((sy / n - intr.fov_height / 2.0) / intr.fov_height, -0.5, 0.5);
  label.count = static_cast<int>(confirmed_positions.size());
  return label;
}

}  // namespace acdc
