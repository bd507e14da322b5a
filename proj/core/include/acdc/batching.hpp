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
#ifndef ACDC_BATCHING_HPP_
#define ACDC_BATCHING_HPP_

#include <cstdint>
#include <vector>

#include "acdc/dataset.hpp"

namespace acdc {

struct BatchingConfig {
  int batch_size = 32;
  double high_threshold = 0.1;
  double high_fraction = 0.5;

  void validate() const;
};

// Emits index batches stratified by label magnitude so that gradient steps see
// off-center targets despite the pool being dominated by near-zero labels.
// A sample is "high" when max(|u_x|, |u_y|) >= high_threshold. Every batch
// carries at least floor(high_fraction * batch_size) high samples, drawing
// with replacement when the high stratum is too small. Every pool sample
// appears at least once per epoch, and batches for a given epoch index are a
// pure function of (seed, epoch).
class BalancedBatcher {
 public:
  // `indices` selects the pool (for example the train split); labels are taken
  // from `samples`. Throws std::invalid_argument on an invalid config or an
  // empty pool. If no pool sample clears the threshold, the batcher falls back
  // to plain shuffling and notes this once on stderr.
  BalancedBatcher(const std::vector<TrainingSample>& samples, std::vector<int> indices,
                  BatchingConfig config, std::uint64_t seed);

  std::vector<std::vector<int>> epoch(int epoch_index) const;

  int batches_per_epoch() const { return batches_per_epoch_; }
  bool uniform_fallback() const { return uniform_fallback_; }

 private:
  BatchingConfig config_;
  std::uint64_t seed_;
  std::vector<int> high_;
  std::vector<int> low_;
  int pool_size_ = 0;
  int high_per_batch_ = 0;
  int batches_per_epoch_ = 0;
  bool uniform_fallback_ = false;
  bool single_batch_ = false;
};

// One full epoch of batches over every sample, matching epoch 0 of a
// BalancedBatcher constructed over the whole pool.
std::vector<std::vector<int>> balance_batches(const std::vector<TrainingSample>& samples,
                                              int batch_size, double high_threshold,
                                              double high_fraction, std::uint64_t seed);

}  // namespace acdc

#endif  // ACDC_BATCHING_HPP_
