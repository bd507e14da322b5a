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
#include "acdc/nn/train.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "acdc/batching.hpp"
#include "acdc/error.hpp"
#include "acdc/nn/loss.hpp"
#include "acdc/nn/optimizer.hpp"
#include "acdc/util.hpp"

namespace acdc {

using nlohmann::json;

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("TrainConfig: epochs must be >= 1");
  if (batch_size < 2) throw ConfigError("TrainConfig: batch_size must be >= 2");
  if (!(initial_lr > 0)) throw ConfigError("TrainConfig: initial_lr must be > 0");
  if (!(lr_decay_factor > 0 && lr_decay_factor <= 1))
    throw ConfigError("TrainConfig: lr_decay_factor must be in (0,1]");
  if (lr_decay_every < 1) throw ConfigError("TrainConfig: lr_decay_every must be >= 1");
  if (checkpoint_every < 0 || validate_every < 0)
    throw ConfigError("TrainConfig: intervals must be >= 0");
  if (early_stop_train_loss < 0)
    throw ConfigError("TrainConfig: early_stop_train_loss must be >= 0");
  if (start_epoch < 0 || start_epoch >= epochs)
    throw ConfigError("TrainConfig: start_epoch must be in [0, epochs)");
}

namespace {

double validation_loss(const AcdcNetF& net, const DatasetManifest& manifest,
                       const std::vector<int>& indices, int chunk) {
  double acc = 0;
  long long n = 0;
  for (std::size_t begin = 0; begin < indices.size(); begin += chunk) {
    const std::size_t end = std::min(indices.size(), begin + chunk);
    std::vector<cv::Mat> images;
    std::vector<ControlLabel> labels;
    for (std::size_t k = begin; k < end; ++k) {
      images.push_back(manifest.samples[indices[k]].image);
      labels.push_back(manifest.samples[indices[k]].label);
    }
    const nn::TensorF pred = net.infer_batch(net.images_to_tensor(images));
    acc += control_loss(pred, labels) * static_cast<double>(labels.size());
    n += static_cast<long long>(labels.size());
  }
  return acc / static_cast<double>(n);
}

}  // namespace

TrainResult train(AcdcNetF& net, const DatasetManifest& manifest, const TrainConfig& cfg,
                  const AugmentationPolicy& policy, const FrameSequence* source,
                  Adam<float>* opt) {
  cfg.validate();
  policy.validate(manifest.intrinsics);
  const std::vector<int> train_idx = manifest.train_indices();
  const std::vector<int> test_idx = manifest.test_indices();
  if (train_idx.empty()) throw std::invalid_argument("train: manifest has no train split");

  BatchingConfig bcfg;
  bcfg.batch_size = cfg.batch_size;
  bcfg.high_threshold = cfg.high_threshold;
  bcfg.high_fraction = cfg.high_fraction;
  BalancedBatcher batcher(manifest.samples, train_idx, bcfg, derive_seed(cfg.seed, "batch"));

  Adam<float> local_adam(net.tensors());
  Adam<float>& adam = opt != nullptr ? *opt : local_adam;

  std::ofstream log;
  const bool persist = !cfg.output_dir.empty();
  if (persist) {
    std::filesystem::create_directories(cfg.output_dir);
    log.open(cfg.output_dir / "training_log.jsonl",
             cfg.start_epoch == 0 ? std::ios::trunc : std::ios::app);
    if (!log)
      throw LoadError("cannot open for writing: " +
                      (cfg.output_dir / "training_log.jsonl").string());
  }

  TrainResult result;
  for (int epoch = cfg.start_epoch; epoch < cfg.epochs; ++epoch) {
    const double lr =
        lr_schedule(epoch, cfg.initial_lr, cfg.lr_decay_factor, cfg.lr_decay_every);
    const auto batches = batcher.epoch(epoch);
    auto dropout_rng = make_rng(derive_seed(cfg.seed, "dropout", epoch));

    double epoch_loss = 0;
    long long epoch_count = 0;
    std::uint64_t draw = 0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      std::vector<cv::Mat> images;
      std::vector<ControlLabel> labels;
      images.reserve(batches[b].size());
      labels.reserve(batches[b].size());
      for (int idx : batches[b]) {
        TrainingSample s =
            augment(manifest.samples[idx], policy, manifest.intrinsics,
                    derive_seed(cfg.seed, "aug", epoch, draw++), source);
        images.push_back(std::move(s.image));
        labels.push_back(s.label);
      }

      net.zero_grad();
      const nn::TensorF x = net.images_to_tensor(images);
      const nn::TensorF pred = net.forward_train(x, dropout_rng);
      const double loss = control_loss(pred, labels);
      if (!std::isfinite(loss)) {
        std::filesystem::path diag;
        if (persist) {
          diag = cfg.output_dir / "diverged.ckpt";
          save_checkpoint(net, diag, {epoch, loss, true}, &adam);
        }
        throw TrainingDiverged("loss became non-finite at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(b) +
                               (diag.empty() ? "" : "; diagnostic checkpoint: " + diag.string()));
      }
      net.backward(control_loss_grad(pred, labels));
      adam.step(net.tensors(), lr);

      epoch_loss += loss * static_cast<double>(labels.size());
      epoch_count += static_cast<long long>(labels.size());
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.train_loss = epoch_loss / static_cast<double>(epoch_count);
    if (cfg.validate_every > 0 && !test_idx.empty() && (epoch + 1) % cfg.validate_every == 0) {
      rec.val_loss = validation_loss(net, manifest, test_idx, cfg.batch_size);
      rec.has_val = true;
    }
    result.history.push_back(rec);

    if (persist) {
      json line;
      line["epoch"] = rec.epoch;
      line["lr"] = rec.lr;
      line["train_loss"] = rec.train_loss;
      if (rec.has_val) line["val_loss"] = rec.val_loss;
      log << line.dump() << "\n";
      log.flush();
      if (cfg.checkpoint_every > 0 && (epoch + 1) % cfg.checkpoint_every == 0)
        save_checkpoint(net, cfg.output_dir / "last.ckpt",
                        {epoch + 1, rec.train_loss, true}, &adam);
    }

    if (cfg.early_stop_train_loss > 0 && rec.train_loss < cfg.early_stop_train_loss) {
      result.early_stopped = true;
      break;
    }
  }

  if (persist) {
    const EpochRecord& last = result.history.back();
    result.final_checkpoint = cfg.output_dir / "final.ckpt";
    save_checkpoint(net, result.final_checkpoint, {last.epoch + 1, last.train_loss, true},
                    &adam);
  }
  return result;
}

}  // namespace acdc
