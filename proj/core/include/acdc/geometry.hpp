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

#include <opencv2/core.hpp>

#include <optional>
#include <span>
#include <vector>

namespace acdc {

/// Pinhole pan-tilt camera parameters: the size of the field of view in
/// pixels and the angular extent it spans. Per-step camera motion is bounded
/// by half the angle of view on each axis.
struct CameraIntrinsics {
  int fov_width = 320;    ///< I_x, pixels
  int fov_height = 240;   ///< I_y, pixels
  double aov_x_deg = 60.0;  ///< horizontal angle of view, degrees
  double aov_y_deg = 45.0;  ///< vertical angle of view, degrees

  void validate() const;  // throws std::invalid_argument

  bool operator==(const CameraIntrinsics&) const = default;
};

/// Placement of the FoV inside the world frame, addressed by its top-left
/// corner in integer world pixels. Kept inside [0, W-I_x] x [0, H-I_y] by
/// clamping in the simulator.
struct CameraState {
  int x = 0;
  int y = 0;

  bool operator==(const CameraState&) const = default;
};

/// Axis-aligned box, world-frame or FoV-local depending on context.
struct BoundingBox {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

  cv::Point2d center() const { return {(x_min + x_max) / 2.0, (y_min + y_max) / 2.0}; }
  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool valid() const { return x_min < x_max && y_min < y_max; }

  bool operator==(const BoundingBox&) const = default;
};

/// Normalized control action: horizontal/vertical displacement as a fraction
/// of the FoV size, plus the target count. Labels generated from targets
/// inside the FoV have |u_x| <= 0.5 and |u_y| <= 0.5.
struct ControlLabel {
  double u_x = 0;
  double u_y = 0;
  double count = 0;

  bool operator==(const ControlLabel&) const = default;
};

/// Servo displacement in degrees, bounded by half the angle of view.
struct ServoAction {
  double pan_deg = 0;
  double tilt_deg = 0;
};

/// Unweighted mean of box centers; empty input yields nullopt.
/// Throws std::invalid_argument on a malformed box.
std::optional<cv::Point2d> center_of_mass(std::span<const BoundingBox> boxes);

/// True when the box center lies strictly inside the camera's FoV.
bool center_in_fov(const BoundingBox& world_box, const CameraState& camera,
                   const CameraIntrinsics& intr);

/// Ground-truth action for the current frame: displacement from the FoV
/// center to the center of mass of the visible targets, normalized by the
/// FoV size, plus the visible-target count. (0, 0, 0) when nothing is
/// visible.
ControlLabel expert_label(const CameraState& camera, const CameraIntrinsics& intr,
                          std::span<const BoundingBox> world_boxes);

/// Maps a normalized displacement to servo angles: each axis scales by half
/// the angle of view. Throws std::invalid_argument when |u| > 1.
ServoAction label_to_angles(const ControlLabel& label, const CameraIntrinsics& intr);

/// Inverse of the label normalization: displacement in pixels.
cv::Point2d label_to_pixel_shift(const ControlLabel& label, const CameraIntrinsics& intr);

}  // namespace acdc
