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

// Microbenchmarks for the per-frame hot paths: model inference at both
// supported resolutions, the baseline detection-tracking-control step, the
// simulator's observation crop, and expert label computation.

#include <benchmark/benchmark.h>
#include <opencv2/core.hpp>

#include "acdc/controllers.hpp"
#include "acdc/geometry.hpp"
#include "acdc/nn/network.hpp"
#include "acdc/simulator.hpp"

namespace {

cv::Mat random_image(int width, int height, int seed) {
  cv::RNG rng(seed);
  cv::Mat img(height, width, CV_8UC3);
  rng.fill(img, cv::RNG::UNIFORM, 0, 256);
  return img;
}

std::vector<acdc::BoundingBox> world_boxes() {
  return {
      {140, 90, 160, 130},  {300, 200, 322, 244}, {480, 330, 500, 370},
      {620, 120, 646, 168}, {90, 400, 114, 444},
  };
}

void model_forward(benchmark::State& state, const acdc::NetworkConfig& cfg) {
  acdc::AcdcNetF net = acdc::build_network<float>(cfg);
  const cv::Mat img = random_image(cfg.input_width, cfg.input_height, 7);
  for (auto _ : state) {
    const acdc::ModelOutput out = net.forward(img);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_ModelForwardPaper(benchmark::State& state) {
  model_forward(state, acdc::NetworkConfig::paper_default());
}
BENCHMARK(BM_ModelForwardPaper)->Unit(benchmark::kMillisecond);

void BM_ModelForwardDesk(benchmark::State& state) {
  model_forward(state, acdc::NetworkConfig::desk_default());
}
BENCHMARK(BM_ModelForwardDesk)->Unit(benchmark::kMillisecond);

void BM_BaselineStep(benchmark::State& state) {
  const acdc::CameraIntrinsics intr;
  const acdc::CameraState camera{200, 150};
  const cv::Mat img = random_image(intr.fov_width, intr.fov_height, 11);
  const std::vector<acdc::BoundingBox> world = world_boxes();
  const std::vector<acdc::BoundingBox> fov =
      acdc::visible_targets(camera, intr, world);

  acdc::BaselineController controller({});
  controller.reseed(3);
  int frame = 0;
  for (auto _ : state) {
    const acdc::Observation obs{frame++, img, camera, intr, world, fov};
    const acdc::ControlLabel action = controller.act(obs);
    benchmark::DoNotOptimize(action);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BaselineStep)->Unit(benchmark::kMicrosecond);

void BM_RenderObservation(benchmark::State& state) {
  const acdc::CameraIntrinsics intr;
  const cv::Mat world = random_image(768, 576, 13);
  const acdc::CameraState camera{200, 150};
  for (auto _ : state) {
    const cv::Mat view = acdc::render_observation(camera, intr, world);
    benchmark::DoNotOptimize(view);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RenderObservation)->Unit(benchmark::kMicrosecond);

void BM_ExpertLabel(benchmark::State& state) {
  const acdc::CameraIntrinsics intr;
  const acdc::CameraState camera{200, 150};
  const std::vector<acdc::BoundingBox> world = world_boxes();
  for (auto _ : state) {
    const acdc::ControlLabel label = acdc::expert_label(camera, intr, world);
    benchmark::DoNotOptimize(label);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ExpertLabel)->Unit(benchmark::kNanosecond);

}  // namespace

BENCHMARK_MAIN();
