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
#ifndef ACDC_BASELINE_KALMAN_HPP_
#define ACDC_BASELINE_KALMAN_HPP_

#include <Eigen/Dense>

#include <opencv2/core.hpp>

namespace acdc {

// Constant-velocity model over (x, y, v_x, v_y) with box-center measurements,
// one step per frame. Defaults are tuned for pedestrian-scale motion and are
// fully configurable.
struct KalmanConfig {
  double q_pos = 1;    // process noise, position terms (px^2)
  double q_vel = 4;    // process noise, velocity terms
  double r_pos = 4;    // measurement noise (px^2)
  double p0_pos = 10;  // initial covariance, position terms
  double p0_vel = 100;

  Eigen::Matrix4d q() const {
    return Eigen::Vector4d(q_pos, q_pos, q_vel, q_vel).asDiagonal();
  }
  Eigen::Matrix2d r() const { return Eigen::Vector2d(r_pos, r_pos).asDiagonal(); }
  Eigen::Matrix4d p0() const {
    return Eigen::Vector4d(p0_pos, p0_pos, p0_vel, p0_vel).asDiagonal();
  }
};

enum class TrackStatus { tentative, confirmed, dead };

struct TrackState {
  int id = 0;
  Eigen::Vector4d x = Eigen::Vector4d::Zero();  // (x, y, v_x, v_y)
  Eigen::Matrix4d P = Eigen::Matrix4d::Zero();
  int hits = 0;    // consecutive matched frames
  int misses = 0;  // consecutive unmatched frames
  TrackStatus status = TrackStatus::tentative;

  cv::Point2d position() const { return {x(0), x(1)}; }
  cv::Point2d velocity() const { return {x(2), x(3)}; }
};

// Creates a tentative track centered on a measurement with zero velocity.
TrackState make_track(int id, const cv::Point2d& measurement, const KalmanConfig& config);

// Time update. A non-finite result kills the track with a note on stderr.
void kalman_predict(TrackState& track, const KalmanConfig& config);

// Measurement update (Joseph form, then symmetrization, so the covariance
// stays symmetric PSD). A non-finite result kills the track.
void kalman_update(TrackState& track, const cv::Point2d& measurement,
                   const KalmanConfig& config);

}  // namespace acdc

#endif  // ACDC_BASELINE_KALMAN_HPP_
