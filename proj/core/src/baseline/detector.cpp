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
#include "acdc/baseline/detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "acdc/error.hpp"
#include "acdc/util.hpp"

namespace acdc {

void NoisyOracleDetectorConfig::validate() const {
  if (!(miss_prob >= 0 && miss_prob <= 1))
    throw std::invalid_argument("NoisyOracleDetectorConfig: miss_prob must be in [0,1]");
  if (center_jitter_sigma < 0 || size_jitter_sigma < 0)
    throw std::invalid_argument("NoisyOracleDetectorConfig: jitter sigmas must be >= 0");
  if (false_positive_rate < 0)
    throw std::invalid_argument("NoisyOracleDetectorConfig: false_positive_rate must be >= 0");
}

namespace {

BoundingBox clip_to_fov(BoundingBox b, const CameraIntrinsics& intr) {
  b.x_min = std::clamp(b.x_min, 0.0, static_cast<double>(intr.fov_width));
  b.x_max = std::clamp(b.x_max, 0.0, static_cast<double>(intr.fov_width));
  b.y_min = std::clamp(b.y_min, 0.0, static_cast<double>(intr.fov_height));
  b.y_max = std::clamp(b.y_max, 0.0, static_cast<double>(intr.fov_height));
  return b;
}

}  // namespace

std::vector<Detection> detect(const std::vector<BoundingBox>& fov_boxes,
                              const CameraIntrinsics& intr,
                              const NoisyOracleDetectorConfig& config, int frame_index) {
  config.validate();
  auto rng = make_rng(derive_seed(config.seed, "detect", static_cast<std::uint64_t>(frame_index)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Detection> out;
  for (const BoundingBox& gt : fov_boxes) {
    if (unit(rng) < config.miss_prob) continue;
    BoundingBox b = gt;
    if (config.center_jitter_sigma > 0 || config.size_jitter_sigma > 0) {
      const cv::Point2d c = gt.center();
      const double w = gt.x_max - gt.x_min;
      const double h = gt.y_max - gt.y_min;
      const double cx = c.x + gauss(rng) * config.center_jitter_sigma;
      const double cy = c.y + gauss(rng) * config.center_jitter_sigma;
      const double nw = std::max(1.0, w * (1.0 + gauss(rng) * config.size_jitter_sigma));
      const double nh = std::max(1.0, h * (1.0 + gauss(rng) * config.size_jitter_sigma));
      b = {cx - nw / 2, cy - nh / 2, cx + nw / 2, cy + nh / 2};
    }
    b = clip_to_fov(b, intr);
    if (b.valid()) out.push_back({b, 1.0});
  }

  if (config.false_positive_rate > 0) {
    std::poisson_distribution<int> n_fp(config.false_positive_rate);
    const int count = n_fp(rng);
    std::uniform_real_distribution<double> dw(8.0, std::max(9.0, intr.fov_width / 4.0));
    std::uniform_real_distribution<double> dh(8.0, std::max(9.0, intr.fov_height / 4.0));
    std::uniform_real_distribution<double> dx(0.0, intr.fov_width);
    std::uniform_real_distribution<double> dy(0.0, intr.fov_height);
    for (int i = 0; i < count; ++i) {
      const double w = dw(rng), h = dh(rng);
      const double cx = dx(rng), cy = dy(rng);
      BoundingBox b = clip_to_fov({cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2}, intr);
      if (b.valid()) out.push_back({b, 0.5});
    }
  }
  return out;
}

std::map<int, std::vector<Detection>> load_external_detections(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open: " + path.string());

  std::map<int, std::vector<Detection>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    int frame = 0;
    Detection d;
    if (!(ss >> frame >> d.box.x_min >> d.box.y_min >> d.box.x_max >> d.box.y_max >> d.score))
      throw LoadError(path.string() + " line " + std::to_string(line_no) +
                      ": expected 'frame x_min y_min x_max y_max score'");
    std::string rest;
    if (ss >> rest)
      throw LoadError(path.string() + " line " + std::to_string(line_no) +
                      ": trailing content '" + rest + "'");
    if (frame < 0 || !d.box.valid() || d.score < 0 || d.score > 1)
      throw LoadError(path.string() + " line " + std::to_string(line_no) +
                      ": invalid detection record");
    out[frame].push_back(d);
  }
  return out;
}

}  // namespace acdc
