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
#include "acdc/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <opencv2/imgproc.hpp>

#include "acdc/simulator.hpp"
#include "acdc/util.hpp"

namespace acdc {

AugmentationPolicy AugmentationPolicy::identity() {
  AugmentationPolicy p;
  p.translate_prob = 0;
  p.flip_prob = 0;
  p.blur_prob = 0;
  p.sharpen_prob = 0;
  p.color_prob = 0;
  p.illumination_prob = 0;
  return p;
}

void AugmentationPolicy::validate(const CameraIntrinsics& intr) const {
  auto check_prob = [](double p, const char* name) {
    if (!(p >= 0 && p <= 1))
      throw std::invalid_argument(std::string("AugmentationPolicy: ") + name +
                                  " probability must be in [0,1]");
  };
  check_prob(translate_prob, "translate");
  check_prob(flip_prob, "flip");
  check_prob(blur_prob, "blur");
  check_prob(sharpen_prob, "sharpen");
  check_prob(color_prob, "color");
  check_prob(illumination_prob, "illumination");
  if (max_translate_px < 0)
    throw std::invalid_argument("AugmentationPolicy: max_translate_px must be >= 0");
  if (translate_prob > 0 &&
      max_translate_px >= std::min(intr.fov_width, intr.fov_height) / 4)
    throw std::invalid_argument(
        "AugmentationPolicy: max_translate_px must be in [0, min(fov)/4)");
  if (!(blur_sigma_min > 0 && blur_sigma_min <= blur_sigma_max))
    throw std::invalid_argument("AugmentationPolicy: bad blur sigma range");
  if (!(sharpen_min >= 0 && sharpen_min <= sharpen_max))
    throw std::invalid_argument("AugmentationPolicy: bad sharpen range");
  if (!(color_shift >= 0 && color_shift < 1))
    throw std::invalid_argument("AugmentationPolicy: color_shift must be in [0,1)");
  if (!(illumination_min > 0 && illumination_min <= illumination_max))
    throw std::invalid_argument("AugmentationPolicy: bad illumination range");
}

TrainingSample augment(const TrainingSample& sample, const AugmentationPolicy& policy,
                       const CameraIntrinsics& intr, std::uint64_t seed,
                       const FrameSequence* source) {
  policy.validate(intr);
  if (sample.image.cols != intr.fov_width || sample.image.rows != intr.fov_height)
    throw std::invalid_argument("augment: sample image does not match intrinsics");

  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Draw every decision up front in a fixed order.
  const double roll_translate = unit(rng);
  const double draw_tx = unit(rng);
  const double draw_ty = unit(rng);
  const double roll_flip = unit(rng);
  const double roll_blur = unit(rng);
  const double draw_sigma = unit(rng);
  const double roll_sharpen = unit(rng);
  const double draw_amount = unit(rng);
  const double roll_color = unit(rng);
  const double draw_color[3] = {unit(rng), unit(rng), unit(rng)};
  const double roll_illum = unit(rng);
  const double draw_illum = unit(rng);

  TrainingSample out;
  out.image = sample.image.clone();
  out.label = sample.label;
  out.provenance = sample.provenance;

  if (roll_translate < policy.translate_prob && policy.max_translate_px > 0 &&
      source != nullptr && source->id == sample.provenance.sequence_id) {
    const int span = 2 * policy.max_translate_px;
    const int tx = static_cast<int>(std::floor(draw_tx * (span + 1))) - policy.max_translate_px;
    const int ty = static_cast<int>(std::floor(draw_ty * (span + 1))) - policy.max_translate_px;
    const int fi = sample.provenance.frame_index;
    if (fi < 0 || fi >= static_cast<int>(source->frames.size()))
      throw std::invalid_argument("augment: provenance frame index outside source sequence");
    const AnnotatedFrame& frame = source->frames[fi];
    CameraState cam{
        std::clamp(sample.provenance.camera_x + tx, 0, source->world_width - intr.fov_width),
        std::clamp(sample.provenance.camera_y + ty, 0, source->world_height - intr.fov_height)};
    out.image = render_observation(cam, intr, frame.image);
    out.label = expert_label(cam, intr, frame.boxes);
    out.provenance.camera_x = cam.x;
    out.provenance.camera_y = cam.y;
  }

  if (roll_flip < policy.flip_prob) {
    cv::flip(out.image, out.image, 1);
    out.label.u_x = -out.label.u_x;
  }

  if (roll_blur < policy.blur_prob) {
    const double sigma =
        policy.blur_sigma_min + draw_sigma * (policy.blur_sigma_max - policy.blur_sigma_min);
    cv::GaussianBlur(out.image, out.image, cv::Size(0, 0), sigma, sigma);
  }

  if (roll_sharpen < policy.sharpen_prob) {
    const double amount =
        policy.sharpen_min + draw_amount * (policy.sharpen_max - policy.sharpen_min);
    cv::Mat blurred;
    cv::GaussianBlur(out.image, blurred, cv::Size(0, 0), 1.0, 1.0);
    cv::addWeighted(out.image, 1.0 + amount, blurred, -amount, 0.0, out.image);
  }

  if (roll_color < policy.color_prob) {
    cv::Scalar scale;
    for (int c = 0; c < 3; ++c)
      scale[c] = 1.0 + (2.0 * draw_color[c] - 1.0) * policy.color_shift;
    cv::multiply(out.image, scale, out.image);
  }

  if (roll_illum < policy.illumination_prob) {
    const double gain = policy.illumination_min +
                        draw_illum * (policy.illumination_max - policy.illumination_min);
    out.image.convertTo(out.image, -1, gain, 0.0);
  }

  return out;
}

}  // namespace acdc
