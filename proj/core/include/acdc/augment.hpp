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
#ifndef ACDC_AUGMENT_HPP_
#define ACDC_AUGMENT_HPP_

#include <cstdint>

#include "acdc/dataset.hpp"
#include "acdc/sequence.hpp"

namespace acdc {

// Probabilistic training-time augmentation. Transforms are considered in a
// fixed order (translate, flip, blur, sharpen, color shift, illumination) and
// every transform consumes its random draws whether applied or not, so the
// stream of decisions depends only on the seed.
struct AugmentationPolicy {
  double translate_prob = 0.3;
  int max_translate_px = 16;
  double flip_prob = 0.5;
  double blur_prob = 0.3;
  double blur_sigma_min = 0.5;
  double blur_sigma_max = 1.5;
  double sharpen_prob = 0.3;
  double sharpen_min = 0.2;
  double sharpen_max = 0.8;
  double color_prob = 0.3;
  double color_shift = 0.1;
  double illumination_prob = 0.3;
  double illumination_min = 0.7;
  double illumination_max = 1.3;

  // All probabilities zero; augment() returns the sample unchanged.
  static AugmentationPolicy identity();

  // Throws std::invalid_argument on out-of-range probabilities, inverted
  // magnitude ranges, or a translation bound >= min(I_x, I_y) / 4.
  void validate(const CameraIntrinsics& intr) const;
};

// Returns an augmented copy of `sample`. Pixel-only transforms never touch the
// label. A horizontal flip negates u_x. Translation moves the camera origin by
// up to max_translate_px per axis and re-crops from the source world frame,
// recomputing the label from ground truth; it therefore requires `source` to
// be the sequence named by the sample's provenance and is skipped otherwise.
TrainingSample augment(const TrainingSample& sample, const AugmentationPolicy& policy,
                       const CameraIntrinsics& intr, std::uint64_t seed,
                       const FrameSequence* source = nullptr);

}  // namespace acdc

#endif  // ACDC_AUGMENT_HPP_
