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
#include "acdc/baseline/kalman.hpp"

#include <iostream>

namespace acdc {
namespace {

Eigen::Matrix4d transition() {
  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 2) = 1;
  f(1, 3) = 1;
  return f;
}

Eigen::Matrix<double, 2, 4> measurement_matrix() {
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = 1;
  h(1, 1) = 1;
  return h;
}

bool kill_if_non_finite(TrackState& track, const char* where) {
  if (track.x.allFinite() && track.P.allFinite()) return false;
  std::clog << "kalman: non-finite state in " << where << ", killing track " << track.id
            << "\n";
  track.status = TrackStatus::dead;
  return true;
}

}  // namespace

TrackState make_track(int id, const cv::Point2d& measurement, const KalmanConfig& config) {
  TrackState t;
  t.id = id;
  t.x << measurement.x, measurement.y, 0, 0;
  t.P = config.p0();
  t.hits = 1;
  t.status = TrackStatus::tentative;
  return t;
}

void kalman_predict(TrackState& track, const KalmanConfig& config) {
  const Eigen::Matrix4d f = transition();
  track.x = f * track.x;
  track.P = f * track.P * f.transpose() + config.q();
  kill_if_non_finite(track, "predict");
}

void kalman_update(TrackState& track, const cv::Point2d& measurement,
                   const KalmanConfig& config) {
  const Eigen::Matrix<double, 2, 4> h = measurement_matrix();
  const Eigen::Vector2d z(measurement.x, measurement.y);
  const Eigen::Vector2d innovation = z - h * track.x;
  const Eigen::Matrix2d s = h * track.P * h.transpose() + config.r();
  const Eigen::Matrix<double, 4, 2> k = track.P * h.transpose() * s.inverse();

  track.x += k * innovation;
  const Eigen::Matrix4d ikh = Eigen::Matrix4d::Identity() - k * h;
  track.P = ikh * track.P * ikh.transpose() + k * config.r() * k.transpose();
  track.P = ((track.P + track.P.transpose()) / 2.0).eval();
  kill_if_non_finite(track, "update");
}

}  // namespace acdc
