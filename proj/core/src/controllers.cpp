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
#include "acdc/controllers.hpp"

#include <stdexcept>
#include <vector>

namespace acdc {

ControlLabel ExpertController::act(const Observation& obs) {
  return expert_label(obs.camera, obs.intrinsics, obs.world_boxes);
}

ModelController::ModelController(std::shared_ptr<const AcdcNetF> net, std::string name)
    : net_(std::move(net)), name_(std::move(name)) {
  if (!net_) throw std::invalid_argument("ModelController: null network");
}

ControlLabel ModelController::act(const Observation& obs) {
  const ModelOutput out = net_->forward(obs.image);
  return {out.u_x, out.u_y, out.count};
}

BaselineController::BaselineController(BaselineControllerConfig config, std::string name)
    : config_(config), name_(std::move(name)), tracker_(config.tracker) {
  config_.detector.validate();
}

void BaselineController::reset() {
  tracker_.reset();
  have_prev_camera_ = false;
}

ControlLabel BaselineController::act(const Observation& obs) {
  if (have_prev_camera_)
    tracker_.shift(static_cast<double>(prev_camera_.x - obs.camera.x),
                   static_cast<double>(prev_camera_.y - obs.camera.y));
  prev_camera_ = obs.camera;
  have_prev_camera_ = true;

  std::vector<BoundingBox> fov(obs.fov_boxes.begin(), obs.fov_boxes.end());
  const std::vector<Detection> detections =
      detect(fov, obs.intrinsics, config_.detector, obs.frame_index);
  tracker_.step(detections);
  return com_control(tracker_.confirmed_positions(), obs.intrinsics);
}

}  // namespace acdc
