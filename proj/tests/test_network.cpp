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
#include <cmath>
#include <random>

#include <doctest.h>
#include <opencv2/core.hpp>

#include "acdc/error.hpp"
#include "acdc/nn/checkpoint.hpp"
#include "acdc/nn/loss.hpp"
#include "acdc/nn/network.hpp"
#include "acdc/nn/optimizer.hpp"
#include "acdc/util.hpp"
#include "test_util.hpp"

using namespace acdc;
using acdc_test::TempDir;

namespace {

// Small enough for exhaustive finite differences, structurally identical to
// the full model: 7 blocks, first 3 with stride 2, shared head layout.
NetworkConfig probe_config() {
  NetworkConfig cfg;
  cfg.input_width = 16;
  cfg.input_height = 12;
  cfg.blocks = {{2, 3, 2}, {2, 3, 2}, {2, 3, 2}, {3, 3, 1}, {3, 3, 1}, {3, 3, 1}, {4, 3, 1}};
  cfg.controller = {4, 3, 3, 5, 4};
  cfg.dropout_rate = 0.0;
  cfg.enforce_param_budget = false;
  cfg.seed = 5;
  return cfg;
}

cv::Mat random_image(int width, int height, std::uint64_t seed) {
  cv::Mat img(height, width, CV_8UC3);
  cv::RNG rng(seed);
  rng.fill(img, cv::RNG::UNIFORM, 0, 256);
  return img;
}

}  // namespace

// --------------------------------------------------------------------------
// Configuration validation

TEST_CASE("the default configuration is valid and within the budget") {
  CHECK_NOTHROW(NetworkConfig{}.validate());
  AcdcNetF net = build_network(NetworkConfig::paper_default());
  CHECK(net.param_count() == 395031);
  const double lo = kReferenceParamCount * (1.0 - kParamBudgetTolerance);
  const double hi = kReferenceParamCount * (1.0 + kParamBudgetTolerance);
  CHECK(net.param_count() >= lo);
  CHECK(net.param_count() <= hi);
}

TEST_CASE("structural violations are rejected") {
  NetworkConfig cfg;
  cfg.blocks.pop_back();  // 6 blocks
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = NetworkConfig{};
  cfg.blocks[6].filters = 129;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = NetworkConfig{};
  cfg.blocks[3].stride = 2;  // only the first three may downsample
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = NetworkConfig{};
  cfg.blocks[0].stride = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = NetworkConfig{};
  cfg.leaky_slope = 0.2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = NetworkConfig{};
  cfg.dropout_rate = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = NetworkConfig{};
  cfg.blocks[2].kernel = 4;  // even kernel
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("the parameter budget gate can be disabled for probes") {
  NetworkConfig tiny = probe_config();
  tiny.enforce_param_budget = true;
  CHECK_THROWS_AS(build_network(tiny), ConfigError);
  tiny.enforce_param_budget = false;
  CHECK_NOTHROW(build_network(tiny));
}

TEST_CASE("the desk resolution uses the same parameters as the full one") {
  AcdcNetF desk = build_network(NetworkConfig::desk_default());
  AcdcNetF paper = build_network(NetworkConfig::paper_default());
  CHECK(desk.param_count() == paper.param_count());
}

// --------------------------------------------------------------------------
// Forward pass

TEST_CASE("outputs respect the head bounds on random images") {
  AcdcNetF net = build_network(NetworkConfig::desk_default());
  for (int i = 0; i < 50; ++i) {
    const cv::Mat img = random_image(160, 120, 1000 + i);
    const ModelOutput out = net.forward(img);
    REQUIRE(out.u_x >= -1.0);
    REQUIRE(out.u_x <= 1.0);
    REQUIRE(out.u_y >= -1.0);
    REQUIRE(out.u_y <= 1.0);
    REQUIRE(out.count >= 0.0);
    REQUIRE(std::isfinite(out.count));
  }
}

TEST_CASE("inference is deterministic and finite on degenerate input") {
  AcdcNetF net = build_network(NetworkConfig::desk_default());
  const cv::Mat img = random_image(160, 120, 3);
  const ModelOutput a = net.forward(img);
  const ModelOutput b = net.forward(img);
  CHECK(a.u_x == b.u_x);
  CHECK(a.u_y == b.u_y);
  CHECK(a.count == b.count);

  const cv::Mat zeros = cv::Mat::zeros(120, 160, CV_8UC3);
  const ModelOutput z = net.forward(zeros);
  CHECK(std::isfinite(z.u_x));
  CHECK(std::isfinite(z.u_y));
  CHECK(std::isfinite(z.count));
}

TEST_CASE("images are scaled by 1/255 on entry") {
  AcdcNetF net = build_network(NetworkConfig::desk_default());
  cv::Mat img(120, 160, CV_8UC3, cv::Scalar(51, 51, 51));
  const nn::TensorF x = net.image_to_tensor(img);
  REQUIRE(x.shape == std::vector<int>{1, 3, 120, 160});
  for (float v : x.v) REQUIRE(v == doctest::Approx(51.0 / 255.0).epsilon(1e-6));
}

TEST_CASE("mismatched image shapes are rejected") {
  AcdcNetF net = build_network(NetworkConfig::desk_default());
  const cv::Mat wrong = random_image(320, 240, 4);
  CHECK_THROWS_AS(net.forward(wrong), std::invalid_argument);
  const cv::Mat gray(120, 160, CV_8UC1, cv::Scalar(0));
  CHECK_THROWS_AS(net.forward(gray), std::invalid_argument);
}

// --------------------------------------------------------------------------
// Loss

TEST_CASE("the loss matches hand-computed values") {
  nn::TensorD pred({1, 3});
  pred.v = {0.2, 0.0, 3.0};
  const std::vector<ControlLabel> truth = {{0.1, -0.2, 2}};
  // (2-3)^2 + |0.1-0.2| + |-0.2-0.0| = 1.3
  CHECK(control_loss(pred, truth) == doctest::Approx(1.3).epsilon(1e-12));

  nn::TensorD exact({1, 3});
  exact.v = {0.1, -0.2, 2.0};
  CHECK(control_loss(exact, truth) == 0.0);
}

TEST_CASE("the loss is a mean over the batch") {
  nn::TensorD one({1, 3});
  one.v = {0.2, 0.0, 3.0};
  const std::vector<ControlLabel> t1 = {{0.1, -0.2, 2}};
  nn::TensorD two({2, 3});
  two.v = {0.2, 0.0, 3.0, 0.2, 0.0, 3.0};
  const std::vector<ControlLabel> t2 = {{0.1, -0.2, 2}, {0.1, -0.2, 2}};
  CHECK(control_loss(two, t2) == doctest::Approx(control_loss(one, t1)).epsilon(1e-15));

  nn::TensorD mixed({2, 3});
  mixed.v = {0.2, 0.0, 3.0, -0.4, 0.25, 1.0};
  const std::vector<ControlLabel> tm = {{0.1, -0.2, 2}, {0.3, 0.05, 1}};
  nn::TensorD swapped({2, 3});
  swapped.v = {-0.4, 0.25, 1.0, 0.2, 0.0, 3.0};
  const std::vector<ControlLabel> ts = {{0.3, 0.05, 1}, {0.1, -0.2, 2}};
  CHECK(control_loss(mixed, tm) == doctest::Approx(control_loss(swapped, ts)).epsilon(1e-15));
}

TEST_CASE("empty batches are rejected") {
  nn::TensorD empty({0, 3});
  CHECK_THROWS_AS(control_loss(empty, {}), std::invalid_argument);
  CHECK_THROWS_AS(control_loss(std::vector<ModelOutput>{}, {}), std::invalid_argument);
}

TEST_CASE("the loss gradient uses sign subgradients for the control terms") {
  nn::TensorD pred({2, 3});
  pred.v = {0.3, -0.5, 3.0, 0.0, 0.2, 0.5};
  const std::vector<ControlLabel> truth = {{0.1, -0.2, 2}, {0.0, 0.4, 1}};
  const nn::TensorD g = control_loss_grad(pred, truth);
  CHECK(g.v[0] == doctest::Approx(0.5));    // sgn(0.3-0.1)/2
  CHECK(g.v[1] == doctest::Approx(-0.5));   // sgn(-0.5+0.2)/2
  CHECK(g.v[2] == doctest::Approx(1.0));    // 2*(3-2)/2
  CHECK(g.v[3] == 0.0);                     // at the kink
  CHECK(g.v[4] == doctest::Approx(-0.5));
  CHECK(g.v[5] == doctest::Approx(-0.5));   // 2*(0.5-1)/2
}

// --------------------------------------------------------------------------
// Optimizer

TEST_CASE("the learning-rate schedule steps down every five epochs") {
  CHECK(lr_schedule(0) == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(lr_schedule(4) == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(lr_schedule(5) == doctest::Approx(0.00095).epsilon(1e-12));
  CHECK(lr_schedule(9) == doctest::Approx(0.00095).epsilon(1e-12));
  CHECK(lr_schedule(10) == doctest::Approx(0.001 * 0.95 * 0.95).epsilon(1e-12));
  for (int e = 1; e < 100; ++e) REQUIRE(lr_schedule(e) <= lr_schedule(e - 1));
  CHECK_THROWS_AS(lr_schedule(-1), std::invalid_argument);
}

TEST_CASE("a single optimizer step moves a parameter by about lr") {
  std::vector<double> w = {1.0};
  std::vector<double> g = {0.5};
  std::vector<nn::TensorRef<double>> refs = {{"w", {1}, &w, &g}};
  Adam<double> adam(refs);
  adam.step(refs, 0.001);
  // After bias correction the first step is lr * g / (|g| + eps).
  CHECK(w[0] == doctest::Approx(1.0 - 0.001 * 0.5 / (0.5 + 1e-8)).epsilon(1e-12));
  CHECK(adam.step_count() == 1);

  g[0] = -2.0;
  adam.step(refs, 0.001);
  CHECK(adam.step_count() == 2);
  CHECK(w[0] > 1.0 - 0.001);  // second step pulled back upward
}

TEST_CASE("optimizer state is tied to the registry layout") {
  AcdcNetD net(probe_config());
  auto refs = net.tensors();
  Adam<double> adam(refs);
  std::vector<double> w = {1.0}, g = {0.0};
  std::vector<nn::TensorRef<double>> other = {{"w", {1}, &w, &g}};
  CHECK_THROWS_AS(adam.step(other, 0.001), std::invalid_argument);
}

// --------------------------------------------------------------------------
// Gradient check

TEST_CASE("analytic gradients match central finite differences") {
  AcdcNetD net(probe_config());
  auto refs = net.tensors();

  // Park the heads away from their saturation kinks.
  for (auto& r : refs)
    if (r.name == "heads.b") *r.value = {0.05, -0.04, 0.6};

  const int w = 16, h = 12, n = 2;
  nn::TensorD x({n, 3, h, w});
  auto img_rng = make_rng(99);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (auto& v : x.v) v = dist(img_rng);
  const std::vector<ControlLabel> truth = {{0.37, -0.23, 2}, {-0.12, 0.31, 1}};

  const auto loss = [&]() {
    auto rng = make_rng(0);  // dropout is disabled; the stream is unused
    return control_loss(net.forward_train(x, rng), truth);
  };

  // Outputs must sit strictly inside the head bounds so no gradient is masked.
  {
    auto rng = make_rng(0);
    const nn::TensorD y = net.forward_train(x, rng);
    for (int i = 0; i < n; ++i) {
      REQUIRE(std::fabs(y.v[i * 3 + 0]) < 0.99);
      REQUIRE(std::fabs(y.v[i * 3 + 1]) < 0.99);
      REQUIRE(y.v[i * 3 + 2] > 0.01);
    }
  }

  net.zero_grad();
  {
    auto rng = make_rng(0);
    const nn::TensorD y = net.forward_train(x, rng);
    net.backward(control_loss_grad(y, truth));
  }

  const double eps = 1e-6;
  int probed = 0;
  double worst = 0;
  for (auto& r : refs) {
    if (!r.is_param()) continue;
    const std::size_t sz = r.value->size();
    const std::size_t stride = std::max<std::size_t>(1, sz / 3);
    for (std::size_t i = 0; i < sz; i += stride) {
      const double orig = (*r.value)[i];
      (*r.value)[i] = orig + eps;
      const double lp = loss();
      (*r.value)[i] = orig - eps;
      const double lm = loss();
      (*r.value)[i] = orig;
      const double fd = (lp - lm) / (2 * eps);
      const double analytic = (*r.grad)[i];
      const double denom = std::max({std::fabs(fd), std::fabs(analytic), 1e-5});
      const double rel = std::fabs(fd - analytic) / denom;
      worst = std::max(worst, rel);
      INFO(r.name, "[", i, "] analytic=", analytic, " fd=", fd);
      REQUIRE(rel <= 1e-3);
      ++probed;
    }
  }
  CHECK(probed >= 80);
  MESSAGE("probed ", probed, " parameters, worst relative error ", worst);
}

// --------------------------------------------------------------------------
// Checkpoints

TEST_CASE("a checkpoint restores the exact model") {
  TempDir dir("ckpt");
  const auto path = dir.path() / "model.ckpt";
  AcdcNetF net = build_network(NetworkConfig::desk_default());
  save_checkpoint(net, path, {12, 0.034, false});

  CheckpointMeta meta;
  AcdcNetF restored = load_checkpoint(path, &meta);
  CHECK(meta.epoch == 12);
  CHECK(meta.train_loss == doctest::Approx(0.034).epsilon(1e-12));
  CHECK_FALSE(meta.has_optimizer);
  CHECK(restored.config().input_width == 160);

  for (int i = 0; i < 5; ++i) {
    const cv::Mat img = random_image(160, 120, 40 + i);
    const ModelOutput a = net.forward(img);
    const ModelOutput b = restored.forward(img);
    REQUIRE(a.u_x == b.u_x);
    REQUIRE(a.u_y == b.u_y);
    REQUIRE(a.count == b.count);
  }
}

TEST_CASE("optimizer state rides along when requested") {
  TempDir dir("ckpt-opt");
  const auto path = dir.path() / "model.ckpt";
  AcdcNetF net = build_network(NetworkConfig::desk_default());
  auto refs = net.tensors();
  Adam<float> adam(refs);
  for (auto& r : refs)
    if (r.is_param())
      for (auto& g : *r.grad) g = 0.01f;
  adam.step(refs, 0.001);
  adam.step(refs, 0.001);
  save_checkpoint(net, path, {3, 0.5, true}, &adam);

  AcdcNetF other = build_network(NetworkConfig::desk_default());
  Adam<float> other_adam(other.tensors());
  const CheckpointMeta meta = load_checkpoint_into(other, path, &other_adam);
  CHECK(meta.has_optimizer);
  CHECK(other_adam.step_count() == 2);
  REQUIRE(other_adam.slots().size() == adam.slots().size());
  for (std::size_t s = 0; s < adam.slots().size(); ++s) {
    REQUIRE(other_adam.slots()[s].m == adam.slots()[s].m);
    REQUIRE(other_adam.slots()[s].v == adam.slots()[s].v);
  }
}

TEST_CASE("weights transfer between the desk and full resolutions") {
  TempDir dir("ckpt-res");
  const auto path = dir.path() / "desk.ckpt";
  AcdcNetF desk = build_network(NetworkConfig::desk_default());
  save_checkpoint(desk, path);

  AcdcNetF paper = build_network(NetworkConfig::paper_default());
  CHECK_NOTHROW(load_checkpoint_into(paper, path));

  auto a = desk.tensors();
  auto b = paper.tensors();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].name == b[i].name);
    REQUIRE(*a[i].value == *b[i].value);
  }
}

TEST_CASE("shape mismatches name the offending tensor") {
  TempDir dir("ckpt-shape");
  const auto path = dir.path() / "model.ckpt";
  NetworkConfig narrow = probe_config();
  AcdcNetF src(narrow);
  save_checkpoint(src, path);

  NetworkConfig wider = probe_config();
  wider.controller.projection_width = 6;
  AcdcNetF dst(wider);
  try {
    load_checkpoint_into(dst, path);
    FAIL("expected LoadError");
  } catch (const LoadError& e) {
    CHECK(std::string(e.what()).find("proj") != std::string::npos);
  }
}

TEST_CASE("truncated checkpoint files are rejected") {
  TempDir dir("ckpt-trunc");
  const auto path = dir.path() / "model.ckpt";
  AcdcNetF net = build_network(NetworkConfig::desk_default());
  save_checkpoint(net, path);
  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size / 2);
  CHECK_THROWS_AS(load_checkpoint(path), LoadError);
  std::filesystem::resize_file(path, 0);
  CHECK_THROWS_AS(load_checkpoint(path), LoadError);
  CHECK_THROWS_AS(load_checkpoint(dir.path() / "missing.ckpt"), LoadError);
}

TEST_CASE("config snapshots round-trip through json") {
  NetworkConfig cfg = NetworkConfig::desk_default();
  cfg.seed = 77;
  cfg.dropout_rate = 0.1;
  const NetworkConfig back = network_config_from_json(network_config_to_json(cfg));
  CHECK(back.input_width == 160);
  CHECK(back.input_height == 120);
  CHECK(back.seed == 77);
  CHECK(back.dropout_rate == doctest::Approx(0.1));
  REQUIRE(back.blocks.size() == 7);
  CHECK(back.blocks[6].filters == 128);
  CHECK(back.controller.projection_width == 32);
}
