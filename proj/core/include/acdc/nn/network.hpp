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
#ifndef ACDC_NN_NETWORK_HPP_
#define ACDC_NN_NETWORK_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "acdc/error.hpp"
#include "acdc/nn/layers.hpp"
#include "acdc/nn/tensor.hpp"
#include "acdc/util.hpp"

namespace acdc {

// Regressor output: normalized pan/tilt controls and a visible-target count.
// Bounds hold by construction of the output heads.
struct ModelOutput {
  double u_x = 0;
  double u_y = 0;
  double count = 0;
};

struct BlockSpec {
  int filters = 0;
  int kernel = 3;
  int stride = 1;
};

struct ControllerSpec {
  int condense_filters = 64;
  int condense_kernel = 3;
  int projection_width = 32;
  int dense1 = 100;
  int dense2 = 50;
};

inline constexpr long long kReferenceParamCount = 386000;
inline constexpr double kParamBudgetTolerance = 0.15;

// Architecture description. The default schedule keeps every filter count at
// or below 128, downsamples only in the first three blocks, and lands within
// the parameter budget; the desk preset differs from the paper-scale preset
// only in input resolution (the head is resolution-independent thanks to
// global average pooling, so checkpoints transfer between the two).
struct NetworkConfig {
  int input_width = 320;
  int input_height = 240;
  std::vector<BlockSpec> blocks = default_blocks();
  double leaky_slope = 0.3;
  double dropout_rate = 0.2;
  ControllerSpec controller;
  std::uint64_t seed = 0;
  // Small probe networks used by diagnostics sit far below the budget; they
  // disable this check explicitly.
  bool enforce_param_budget = true;

  static std::vector<BlockSpec> default_blocks() {
    return {{16, 3, 2}, {32, 3, 2}, {64, 3, 2}, {64, 3, 1},
            {96, 3, 1}, {96, 3, 1}, {128, 3, 1}};
  }
  static NetworkConfig paper_default() { return {}; }
  static NetworkConfig desk_default() {
    NetworkConfig c;
    c.input_width = 160;
    c.input_height = 120;
    return c;
  }

  // Structural checks; throws ConfigError on violation.
  void validate() const;
};

template <typename T>
class AcdcNet {
 public:
  explicit AcdcNet(const NetworkConfig& config) : cfg_(config) {
    cfg_.validate();
    int in_ch = 3;
    for (std::size_t i = 0; i < cfg_.blocks.size(); ++i) {
      const BlockSpec& b = cfg_.blocks[i];
      const std::string base = "block" + std::to_string(i + 1);
      convs_.emplace_back(base + ".conv", in_ch, b.filters, b.kernel, b.stride);
      acts_.emplace_back(cfg_.leaky_slope);
      bns_.emplace_back(base + ".bn", b.filters);
      in_ch = b.filters;
    }
    const ControllerSpec& cs = cfg_.controller;
    condense_ = std::make_unique<nn::Conv2d<T>>("condense", in_ch, cs.condense_filters,
                                                cs.condense_kernel, 1);
    proj_ = std::make_unique<nn::Conv2d<T>>("proj", cs.condense_filters,
                                            cs.projection_width, 1, 1);
    fc1_ = std::make_unique<nn::Dense<T>>("fc1", cs.projection_width, cs.dense1);
    fc2_ = std::make_unique<nn::Dense<T>>("fc2", cs.dense1, cs.dense2);
    heads_ = std::make_unique<nn::Dense<T>>("heads", cs.dense2, 3);
    drop_mid_ = std::make_unique<nn::Dropout<T>>(cfg_.dropout_rate);
    drop_fc_ = std::make_unique<nn::Dropout<T>>(cfg_.dropout_rate);

    auto rng = make_rng(derive_seed(cfg_.seed, "init"));
    for (auto& c : convs_) c.init(rng);
    condense_->init(rng);
    proj_->init(rng);
    fc1_->init(rng);
    fc2_->init(rng);
    heads_->init(rng);
  }

  const NetworkConfig& config() const { return cfg_; }

  long long param_count() const {
    long long n = 0;
    for (const auto& c : convs_) n += c.param_count();
    for (const auto& b : bns_) n += b.param_count();
    n += condense_->param_count() + proj_->param_count();
    n += fc1_->param_count() + fc2_->param_count() + heads_->param_count();
    return n;
  }

  // Training-mode forward over a [N,3,H,W] batch already scaled to [0,1].
  // Batch-norm uses batch statistics and updates running stats; dropout draws
  // from `rng`. Returns head outputs [N,3] as (u_x, u_y, count).
  nn::Tensor<T> forward_train(const nn::Tensor<T>& x, std::mt19937_64& rng) {
    check_batch(x);
    nn::Tensor<T> h = x;
    for (std::size_t i = 0; i < convs_.size(); ++i) {
      h = convs_[i].forward(h, true);
      h = acts_[i].forward(h, true);
      h = bns_[i].forward(h, true);
      if (i == 3) h = drop_mid_->forward(h, true, rng);
    }
    h = condense_->forward(h, true);
    h = condense_act_.forward(h, true);
    h = proj_->forward(h, true);
    h = proj_act_.forward(h, true);
    nn::Tensor<T> v = gap_.forward(h, true);
    v = fc1_->forward(v, true);
    v = fc1_act_.forward(v, true);
    v = drop_fc_->forward(v, true, rng);
    v = fc2_->forward(v, true);
    v = fc2_act_.forward(v, true);
    v = heads_->forward(v, true);
    return head_act_.forward(v, true);
  }

  // Backpropagates a [N,3] output gradient, accumulating parameter gradients.
  void backward(const nn::Tensor<T>& gy) {
    nn::Tensor<T> g = head_act_.backward(gy);
    g = heads_->backward(g);
    g = fc2_act_.backward(g);
    g = fc2_->backward(g);
    g = drop_fc_->backward(g);
    g = fc1_act_.backward(g);
    g = fc1_->backward(g);
    g = gap_.backward(g);
    g = proj_act_.backward(g);
    g = proj_->backward(g);
    g = condense_act_.backward(g);
    g = condense_->backward(g);
    for (int i = static_cast<int>(convs_.size()) - 1; i >= 0; --i) {
      if (i == 3) g = drop_mid_->backward(g);
      g = bns_[i].backward(g);
      g = acts_[i].backward(g);
      g = convs_[i].backward(g);
    }
  }

  void zero_grad() {
    for (auto& t : tensors())
      if (t.grad) std::fill(t.grad->begin(), t.grad->end(), T(0));
  }

  // Inference-mode forward: running batch-norm statistics, dropout off.
  // Read-only and safe for concurrent callers.
  nn::Tensor<T> infer_batch(const nn::Tensor<T>& x) const {
    check_batch(x);
    nn::Tensor<T> h = x;
    for (std::size_t i = 0; i < convs_.size(); ++i) {
      h = convs_[i].infer(h);
      h = acts_[i].infer(h);
      h = bns_[i].infer(h);
    }
    h = condense_->infer(h);
    h = condense_act_.infer(h);
    h = proj_->infer(h);
    h = proj_act_.infer(h);
    nn::Tensor<T> v = gap_.infer(h);
    v = fc1_->infer(v);
    v = fc1_act_.infer(v);
    v = fc2_->infer(v);
    v = fc2_act_.infer(v);
    v = heads_->infer(v);
    return head_act_.infer(v);
  }

  // Single-image inference. The 8-bit image is scaled by 1/255 internally.
  // Throws std::invalid_argument when the shape does not match the config.
  ModelOutput forward(const cv::Mat& image) const {
    nn::Tensor<T> x = image_to_tensor(image);
    nn::Tensor<T> y = infer_batch(x);
    return {static_cast<double>(y.v[0]), static_cast<double>(y.v[1]),
            static_cast<double>(y.v[2])};
  }

  // [1,3,H,W] tensor in channel-planes order (as stored by the image type),
  // scaled to [0,1].
  nn::Tensor<T> image_to_tensor(const cv::Mat& image) const {
    if (image.empty() || image.type() != CV_8UC3 || image.cols != cfg_.input_width ||
        image.rows != cfg_.input_height)
      throw std::invalid_argument("AcdcNet: input image must be 8-bit color at " +
                                  std::to_string(cfg_.input_width) + "x" +
                                  std::to_string(cfg_.input_height));
    nn::Tensor<T> x({1, 3, cfg_.input_height, cfg_.input_width});
    const T scale = static_cast<T>(1.0 / 255.0);
    for (int c = 0; c < 3; ++c) {
      T* plane = x.data() + static_cast<long long>(c) * cfg_.input_height * cfg_.input_width;
      for (int i = 0; i < cfg_.input_height; ++i) {
        const cv::Vec3b* row = image.ptr<cv::Vec3b>(i);
        for (int j = 0; j < cfg_.input_width; ++j)
          plane[i * cfg_.input_width + j] = static_cast<T>(row[j][c]) * scale;
      }
    }
    return x;
  }

  // Batched variant of image_to_tensor.
  nn::Tensor<T> images_to_tensor(const std::vector<cv::Mat>& images) const {
    if (images.empty()) throw std::invalid_argument("AcdcNet: empty image batch");
    nn::Tensor<T> x({static_cast<int>(images.size()), 3, cfg_.input_height, cfg_.input_width});
    const long long per = 3LL * cfg_.input_height * cfg_.input_width;
    for (std::size_t i = 0; i < images.size(); ++i) {
      nn::Tensor<T> one = image_to_tensor(images[i]);
      std::copy(one.v.begin(), one.v.end(), x.v.begin() + static_cast<long long>(i) * per);
    }
    return x;
  }

  // Named parameters and buffers, in a fixed order shared with checkpoints.
  std::vector<nn::TensorRef<T>> tensors() {
    std::vector<nn::TensorRef<T>> out;
    for (std::size_t i = 0; i < convs_.size(); ++i) {
      convs_[i].collect(out);
      bns_[i].collect(out);
    }
    condense_->collect(out);
    proj_->collect(out);
    fc1_->collect(out);
    fc2_->collect(out);
    heads_->collect(out);
    return out;
  }

 private:
  void check_batch(const nn::Tensor<T>& x) const {
    if (x.shape.size() != 4 || x.dim(1) != 3 || x.dim(2) != cfg_.input_height ||
        x.dim(3) != cfg_.input_width)
      throw std::invalid_argument("AcdcNet: batch shape does not match config");
  }

  NetworkConfig cfg_;
  std::vector<nn::Conv2d<T>> convs_;
  std::vector<nn::LeakyRelu<T>> acts_;
  std::vector<nn::BatchNorm2d<T>> bns_;
  std::unique_ptr<nn::Dropout<T>> drop_mid_;
  std::unique_ptr<nn::Conv2d<T>> condense_;
  nn::Elu<T> condense_act_;
  std::unique_ptr<nn::Conv2d<T>> proj_;
  nn::Elu<T> proj_act_;
  nn::GlobalAvgPool<T> gap_;
  std::unique_ptr<nn::Dense<T>> fc1_;
  nn::Elu<T> fc1_act_;
  std::unique_ptr<nn::Dropout<T>> drop_fc_;
  std::unique_ptr<nn::Dense<T>> fc2_;
  nn::Elu<T> fc2_act_;
  std::unique_ptr<nn::Dense<T>> heads_;
  nn::HeadActivation<T> head_act_;
};

using AcdcNetF = AcdcNet<float>;
using AcdcNetD = AcdcNet<double>;

// Validates the config, constructs the network, and enforces the trainable
// parameter budget (within kParamBudgetTolerance of kReferenceParamCount)
// unless the config opts out. Throws ConfigError.
template <typename T = float>
AcdcNet<T> build_network(const NetworkConfig& config) {
  AcdcNet<T> net(config);
  if (config.enforce_param_budget) {
    const long long n = net.param_count();
    const double lo = kReferenceParamCount * (1.0 - kParamBudgetTolerance);
    const double hi = kReferenceParamCount * (1.0 + kParamBudgetTolerance);
    if (n < lo || n > hi)
      throw ConfigError("parameter count " + std::to_string(n) + " outside [" +
                        std::to_string(static_cast<long long>(lo)) + ", " +
                        std::to_string(static_cast<long long>(hi)) + "]");
  }
  return net;
}

struct InferenceBenchmark {
  double fps = 0;
  int frames = 0;
  int input_width = 0;
  int input_height = 0;
  long long param_count = 0;
  // Throughput reported in the original evaluation, on different hardware.
  // Recorded for context, never asserted.
  double reference_fps = 25.0;
};

InferenceBenchmark benchmark_inference(const AcdcNetF& net, int n_frames);

}  // namespace acdc

#endif  // ACDC_NN_NETWORK_HPP_
