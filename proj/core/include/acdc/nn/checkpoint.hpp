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
#ifndef ACDC_NN_CHECKPOINT_HPP_
#define ACDC_NN_CHECKPOINT_HPP_

#include <filesystem>
#include <string>

#include "acdc/nn/network.hpp"
#include "acdc/nn/optimizer.hpp"

namespace acdc {

// Self-describing versioned container: magic + version, a JSON header with
// the config snapshot, metadata, and tensor descriptors, then raw
// little-endian payloads in descriptor order. Optimizer slots are optional so
// a checkpoint can either be a deployable model or a resumable training
// state.
struct CheckpointMeta {
  int epoch = 0;
  double train_loss = 0;
  bool has_optimizer = false;
};

void save_checkpoint(AcdcNetF& net, const std::filesystem::path& path,
                     const CheckpointMeta& meta = {}, const Adam<float>* opt = nullptr);

// Rebuilds the network from the stored config and loads every tensor.
AcdcNetF load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta = nullptr);

// Loads stored tensors into an existing network. Name or shape mismatches
// raise LoadError naming the offending tensor. Restores optimizer state into
// `opt` when both sides have it.
CheckpointMeta load_checkpoint_into(AcdcNetF& net, const std::filesystem::path& path,
                                    Adam<float>* opt = nullptr);

// Single-line JSON round trip for config snapshots embedded in artifacts.
std::string network_config_to_json(const NetworkConfig& config);
NetworkConfig network_config_from_json(const std::string& text);

}  // namespace acdc

#endif  // ACDC_NN_CHECKPOINT_HPP_
