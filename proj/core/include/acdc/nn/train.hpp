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
#ifndef ACDC_NN_TRAIN_HPP_
#define ACDC_NN_TRAIN_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "acdc/augment.hpp"
#include "acdc/dataset.hpp"
#include "acdc/nn/checkpoint.hpp"
#include "acdc/nn/network.hpp"

namespace acdc {

struct TrainConfig {
  int epochs = 500;
  int batch_size = 32;
  double initial_lr = 0.001;
  double lr_decay_factor = 0.95;
  int lr_decay_every = 5;
  std::uint64_t seed = 0;

  double high_threshold = 0.1;
  double high_fraction = 0.5;

  // 0 disables the corresponding feature.
  int checkpoint_every = 0;
  int validate_every = 0;
  double early_stop_train_loss = 0;
  // Resume point: first epoch index to run (prior state comes from a loaded
  // checkpoint; the training log is appended rather than truncated).
  int start_epoch = 0;

  // When set, receives final.ckpt, periodic last.ckpt, and
  // training_log.jsonl. Empty trains in memory only.
  std::filesystem::path output_dir;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double lr = 0;
  double train_loss = 0;
  double val_loss = 0;
  bool has_val = false;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  bool early_stopped = false;
  std::filesystem::path final_checkpoint;
};

// Runs the full Adam training loop over the manifest's train split, with
// stratified batches and per-sample augmentation. Everything is derived from
// TrainConfig::seed, so a rerun reproduces the result bit for bit. Supply
// `source` (the generating sequence) to enable translation augmentation, and
// `opt` (e.g. restored from a checkpoint) to resume with prior Adam state;
// otherwise a fresh optimizer is created internally. Throws TrainingDiverged
// when the loss becomes non-finite, after writing a diagnostic checkpoint if
// output_dir is set.
TrainResult train(AcdcNetF& net, const DatasetManifest& manifest, const TrainConfig& cfg,
                  const AugmentationPolicy& policy, const FrameSequence* source = nullptr,
                  Adam<float>* opt = nullptr);

}  // namespace acdc

#endif  // ACDC_NN_TRAIN_HPP_
