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
#include "acdc/nn/network.hpp"

#include <chrono>

namespace acdc {

void NetworkConfig::validate() const {
  if (input_width < 8 || input_height < 8)
    throw ConfigError("NetworkConfig: input must be at least 8x8");
  if (blocks.size() != 7)
    throw ConfigError("NetworkConfig: exactly 7 extractor blocks required, got " +
                      std::to_string(blocks.size()));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const BlockSpec& b = blocks[i];
    if (b.filters < 1 || b.filters > 128)
      throw ConfigError("NetworkConfig: block " + std::to_string(i + 1) +
                        " filter count must be in [1,128]");
    if (b.kernel < 1 || b.kernel % 2 == 0)
      throw ConfigError("NetworkConfig: block " + std::to_string(i + 1) +
                        " kernel must be odd and positive");
    const int want_stride = i < 3 ? 2 : 1;
    if (b.stride != want_stride)
      throw ConfigError("NetworkConfig: block " + std::to_string(i + 1) + " must have stride " +
                        std::to_string(want_stride));
  }
  if (leaky_slope != 0.3)
    throw ConfigError("NetworkConfig: leaky_slope is fixed at 0.3");
  if (!(dropout_rate >= 0 && dropout_rate < 1))
    throw ConfigError("NetworkConfig: dropout_rate must be in [0,1)");
  if (controller.condense_filters < 1 || controller.condense_filters > 128 ||
      controller.projection_width < 1 || controller.projection_width > 128)
    throw ConfigError("NetworkConfig: controller filter counts must be in [1,128]");
  if (controller.condense_kernel < 1 || controller.condense_kernel % 2 == 0)
    throw ConfigError("NetworkConfig: condense kernel must be odd and positive");
  if (controller.dense1 < 1 || controller.dense2 < 1)
    throw ConfigError("NetworkConfig: dense widths must be positive");
}

InferenceBenchmark benchmark_inference(const AcdcNetF& net, int n_frames) {
  if (n_frames < 10) throw std::invalid_argument("benchmark_inference: n_frames must be >= 10");
  const NetworkConfig& cfg = net.config();
  cv::Mat probe(cfg.input_height, cfg.input_width, CV_8UC3);
  cv::randu(probe, 0, 256);

  // Warm-up pass so one-time allocation cost stays out of the measurement.
  (void)net.forward(probe);

  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < n_frames; ++i) (void)net.forward(probe);
  const auto t1 = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(t1 - t0).count();

  InferenceBenchmark b;
  b.frames = n_frames;
  b.fps = seconds > 0 ? n_frames / seconds : 0.0;
  b.input_width = cfg.input_width;
  b.input_height = cfg.input_height;
  b.param_count = net.param_count();
  return b;
}

}  // namespace acdc
