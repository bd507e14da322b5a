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
#include "acdc/batching.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "acdc/util.hpp"

namespace acdc {

void BatchingConfig::validate() const {
  if (batch_size < 2) throw std::invalid_argument("BatchingConfig: batch_size must be >= 2");
  if (!(high_threshold >= 0))
    throw std::invalid_argument("BatchingConfig: high_threshold must be >= 0");
  if (!(high_fraction > 0 && high_fraction < 1))
    throw std::invalid_argument("BatchingConfig: high_fraction must be in (0,1)");
}

BalancedBatcher::BalancedBatcher(const std::vector<TrainingSample>& samples,
                                 std::vector<int> indices, BatchingConfig config,
                                 std::uint64_t seed)
    : config_(config), seed_(seed) {
  config_.validate();
  if (indices.empty()) throw std::invalid_argument("BalancedBatcher: empty pool");
  for (int i : indices)
    if (i < 0 || i >= static_cast<int>(samples.size()))
      throw std::invalid_argument("BalancedBatcher: pool index out of range");

  pool_size_ = static_cast<int>(indices.size());
  for (int i : indices) {
    const ControlLabel& l = samples[i].label;
    if (std::max(std::fabs(l.u_x), std::fabs(l.u_y)) >= config_.high_threshold)
      high_.push_back(i);
    else
      low_.push_back(i);
  }

  if (config_.batch_size >= pool_size_) {
    single_batch_ = true;
    batches_per_epoch_ = 1;
    return;
  }
  if (high_.empty()) {
    uniform_fallback_ = true;
    low_ = std::move(indices);
    high_.clear();
    batches_per_epoch_ =
        static_cast<int>((pool_size_ + config_.batch_size - 1) / config_.batch_size);
    std::clog << "balance_batches: no sample reaches high_threshold "
              << config_.high_threshold << ", falling back to uniform shuffling\n";
    return;
  }

  high_per_batch_ = std::max(
      1, static_cast<int>(std::floor(config_.high_fraction * config_.batch_size)));
  if (low_.empty()) high_per_batch_ = config_.batch_size;
  const int low_per_batch = config_.batch_size - high_per_batch_;
  const auto ceil_div = [](int a, int b) { return (a + b - 1) / b; };
  batches_per_epoch_ = ceil_div(static_cast<int>(high_.size()), high_per_batch_);
  if (!low_.empty())
    batches_per_epoch_ = std::max(
        batches_per_epoch_, ceil_div(static_cast<int>(low_.size()), low_per_batch));
}

std::vector<std::vector<int>> BalancedBatcher::epoch(int epoch_index) const {
  auto rng = make_rng(derive_seed(seed_, "epoch", static_cast<std::uint64_t>(epoch_index)));

  if (single_batch_) {
    std::vector<int> all;
    all.reserve(high_.size() + low_.size());
    all.insert(all.end(), low_.begin(), low_.end());
    all.insert(all.end(), high_.begin(), high_.end());
    std::shuffle(all.begin(), all.end(), rng);
    return {std::move(all)};
  }

  if (uniform_fallback_) {
    std::vector<int> order = low_;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<int>> batches;
    for (int b = 0; b < batches_per_epoch_; ++b) {
      const int begin = b * config_.batch_size;
      const int end = std::min<int>(begin + config_.batch_size, order.size());
      batches.emplace_back(order.begin() + begin, order.begin() + end);
    }
    return batches;
  }

  std::vector<int> high_order = high_;
  std::vector<int> low_order = low_;
  std::shuffle(high_order.begin(), high_order.end(), rng);
  std::shuffle(low_order.begin(), low_order.end(), rng);

  // Consume each stratum in shuffled order; once a stratum is exhausted the
  // remaining slots are filled by resampling it with replacement.
  std::size_t high_pos = 0, low_pos = 0;
  auto next_from = [&rng](const std::vector<int>& order, std::size_t& pos) {
    if (pos < order.size()) return order[pos++];
    std::uniform_int_distribution<std::size_t> pick(0, order.size() - 1);
    return order[pick(rng)];
  };

  const int low_per_batch = config_.batch_size - high_per_batch_;
  std::vector<std::vector<int>> batches;
  batches.reserve(batches_per_epoch_);
  for (int b = 0; b < batches_per_epoch_; ++b) {
    std::vector<int> batch;
    batch.reserve(config_.batch_size);
    for (int k = 0; k < high_per_batch_; ++k) batch.push_back(next_from(high_order, high_pos));
    for (int k = 0; k < low_per_batch; ++k) batch.push_back(next_from(low_order, low_pos));
    std::shuffle(batch.begin(), batch.end(), rng);
    batches.push_back(std::move(batch));
  }
  return batches;
}

std::vector<std::vector<int>> balance_batches(const std::vector<TrainingSample>& samples,
                                              int batch_size, double high_threshold,
                                              double high_fraction, std::uint64_t seed) {
  std::vector<int> indices(samples.size());
  std::iota(indices.begin(), indices.end(), 0);
  BatchingConfig cfg;
  cfg.batch_size = batch_size;
  cfg.high_threshold = high_threshold;
  cfg.high_fraction = high_fraction;
  return BalancedBatcher(samples, std::move(indices), cfg, seed).epoch(0);
}

}  // namespace acdc
