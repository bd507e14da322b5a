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
#include "acdc/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace acdc {

void CameraIntrinsics::validate() const {
  if (fov_width <= 0 || fov_height <= 0)
    throw std::invalid_argument("intrinsics: FoV dimensions must be positive");
  if (aov_x_deg <= 0 || aov_x_deg > 180 || aov_y_deg <= 0 || aov_y_deg > 180)
    throw std::invalid_argument("intrinsics: angles of view must lie in (0, 180]");
}

std::optional<cv::Point2d> center_of_mass(std::span<const BoundingBox> boxes) {
  if (boxes.empty()) return std::nullopt;
  cv::Point2d sum{0, 0};
  for (const auto& b : boxes) {
    if (!b.valid())
      throw std::invalid_argument("center_of_mass: malformed box (min >= max)");
    sum += b.center();
  }
  return sum / static_cast<double>(boxes.size());
}

bool center_in_fov(const BoundingBox& world_box, const CameraState& camera,
                   const CameraIntrinsics& intr) {
  const cv::Point2d c = world_box.center();
  return c.x > camera.x && c.x < camera.x + intr.fov_width &&
         c.y > camera.y && c.y < camera.y + intr.fov_height;
}

ControlLabel expert_label(const CameraState& camera, const CameraIntrinsics& intr,
                          std::span<const BoundingBox> world_boxes) {
  std::vector<BoundingBox> visible;
  for (const auto& b : world_boxes) {
    if (!b.valid())
      throw std::invalid_argument("expert_label: malformed box (min >= max)");
    if (center_in_fov(b, camera, intr)) visible.push_back(b);
  }
  const auto com = center_of_mass(visible);
  if (!com) return {0, 0, 0};

  const cv::Point2d fov_center{camera.x + intr.fov_width / 2.0,
                               camera.y + intr.fov_height / 2.0};
  const double dx = com->x - fov_center.x;
  const double dy = com->y - fov_center.y;
  return {dx / intr.fov_width, dy / intr.fov_height,
          static_cast<double>(visible.size())};
}

ServoAction label_to_angles(const ControlLabel& label, const CameraIntrinsics& intr) {
  if (std::abs(label.u_x) > 1.0 || std::abs(label.u_y) > 1.0)
    throw std::invalid_argument("label_to_angles: |u| > 1 (got u_x=" +
                                std::to_string(label.u_x) + ", u_y=" +
                                std::to_string(label.u_y) + ")");
  return {label.u_x * intr.aov_x_deg / 2.0, label.u_y * intr.aov_y_deg / 2.0};
}

cv::Point2d label_to_pixel_shift(const ControlLabel& label, const CameraIntrinsics& intr) {
  return {label.u_x * intr.fov_width, label.u_y * intr.fov_height};
}

}  // namespace acdc
