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
#include "acdc/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "acdc/error.hpp"

namespace acdc {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'A', 'C', 'D', 'C', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

json config_to_json_obj(const NetworkConfig& c) {
  json blocks = json::array();
  for (const auto& b : c.blocks)
    blocks.push_back({{"filters", b.filters}, {"kernel", b.kernel}, {"stride", b.stride}});
  json j;
  j["input_width"] = c.input_width;
  j["input_height"] = c.input_height;
  j["blocks"] = blocks;
  j["leaky_slope"] = c.leaky_slope;
  j["dropout_rate"] = c.dropout_rate;
  j["controller"] = {{"condense_filters", c.controller.condense_filters},
                     {"condense_kernel", c.controller.condense_kernel},
                     {"projection_width", c.controller.projection_width},
                     {"dense1", c.controller.dense1},
                     {"dense2", c.controller.dense2}};
  j["seed"] = c.seed;
  j["enforce_param_budget"] = c.enforce_param_budget;
  return j;
}

NetworkConfig config_from_json_obj(const json& j) {
  NetworkConfig c;
  c.input_width = j.at("input_width");
  c.input_height = j.at("input_height");
  c.blocks.clear();
  for (const auto& b : j.at("blocks"))
    c.blocks.push_back({b.at("filters"), b.at("kernel"), b.at("stride")});
  c.leaky_slope = j.at("leaky_slope");
  c.dropout_rate = j.at("dropout_rate");
  const auto& cs = j.at("controller");
  c.controller = {cs.at("condense_filters"), cs.at("condense_kernel"),
                  cs.at("projection_width"), cs.at("dense1"), cs.at("dense2")};
  c.seed = j.at("seed");
  c.enforce_param_budget = j.at("enforce_param_budget");
  return c;
}

void write_raw(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_raw(std::ifstream& in, void* p, std::size_t n, const std::filesystem::path& path) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw LoadError("truncated checkpoint: " + path.string());
}

struct Header {
  NetworkConfig config;
  CheckpointMeta meta;
  std::vector<std::pair<std::string, std::vector<int>>> tensors;
  long long optimizer_step = 0;
};

Header read_header(std::ifstream& in, const std::filesystem::path& path) {
  char magic[8];
  read_raw(in, magic, sizeof(magic), path);
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw LoadError("not a checkpoint file: " + path.string());
  std::uint32_t version = 0;
  read_raw(in, &version, sizeof(version), path);
  if (version != kVersion)
    throw LoadError("unsupported checkpoint version " + std::to_string(version) + ": " +
                    path.string());
  std::uint64_t len = 0;
  read_raw(in, &len, sizeof(len), path);
  std::string text(len, '\0');
  read_raw(in, text.data(), len, path);

  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw LoadError("corrupt checkpoint header in " + path.string() + ": " + e.what());
  }
  Header h;
  try {
    h.config = config_from_json_obj(j.at("config"));
    h.meta.epoch = j.at("meta").at("epoch");
    h.meta.train_loss = j.at("meta").at("train_loss");
    h.meta.has_optimizer = j.at("meta").at("has_optimizer");
    for (const auto& t : j.at("tensors"))
      h.tensors.emplace_back(t.at("name"), t.at("shape").get<std::vector<int>>());
    if (h.meta.has_optimizer) h.optimizer_step = j.at("optimizer_step");
  } catch (const json::exception& e) {
    throw LoadError("corrupt checkpoint header in " + path.string() + ": " + e.what());
  }
  return h;
}

std::string shape_str(const std::vector<int>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

}  // namespace

void save_checkpoint(AcdcNetF& net, const std::filesystem::path& path,
                     const CheckpointMeta& meta, const Adam<float>* opt) {
  auto refs = net.tensors();

  json j;
  j["config"] = config_to_json_obj(net.config());
  j["meta"] = {{"epoch", meta.epoch},
               {"train_loss", meta.train_loss},
               {"has_optimizer", opt != nullptr}};
  json tensors = json::array();
  for (const auto& r : refs) tensors.push_back({{"name", r.name}, {"shape", r.shape}});
  j["tensors"] = tensors;
  if (opt) j["optimizer_step"] = opt->step_count();
  const std::string text = j.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot open for writing: " + path.string());
  write_raw(out, kMagic, sizeof(kMagic));
  write_raw(out, &kVersion, sizeof(kVersion));
  const std::uint64_t len = text.size();
  write_raw(out, &len, sizeof(len));
  write_raw(out, text.data(), text.size());
  for (const auto& r : refs) write_raw(out, r.value->data(), r.value->size() * sizeof(float));
  if (opt) {
    for (const auto& s : opt->slots()) {
      write_raw(out, s.m.data(), s.m.size() * sizeof(double));
      write_raw(out, s.v.data(), s.v.size() * sizeof(double));
    }
  }
  if (!out) throw LoadError("write failed: " + path.string());
}

CheckpointMeta load_checkpoint_into(AcdcNetF& net, const std::filesystem::path& path,
                                    Adam<float>* opt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open: " + path.string());
  Header h = read_header(in, path);

  auto refs = net.tensors();
  if (refs.size() != h.tensors.size())
    throw LoadError("checkpoint " + path.string() + " has " +
                    std::to_string(h.tensors.size()) + " tensors, network expects " +
                    std::to_string(refs.size()));
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto& [name, shape] = h.tensors[i];
    if (refs[i].name != name)
      throw LoadError("checkpoint tensor '" + name + "' does not match network tensor '" +
                      refs[i].name + "'");
    if (refs[i].shape != shape)
      throw LoadError("shape mismatch for tensor '" + name + "': checkpoint " +
                      shape_str(shape) + " vs network " + shape_str(refs[i].shape));
    read_raw(in, refs[i].value->data(), refs[i].value->size() * sizeof(float), path);
  }

  if (h.meta.has_optimizer && opt != nullptr) {
    for (auto& s : opt->slots()) {
      read_raw(in, s.m.data(), s.m.size() * sizeof(double), path);
      read_raw(in, s.v.data(), s.v.size() * sizeof(double), path);
    }
    opt->set_step_count(h.optimizer_step);
  }
  return h.meta;
}

AcdcNetF load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw LoadError("cannot open: " + path.string());
  Header h = read_header(probe, path);
  probe.close();

  AcdcNetF net(h.config);
  CheckpointMeta m = load_checkpoint_into(net, path);
  if (meta) *meta = m;
  return net;
}

std::string network_config_to_json(const NetworkConfig& config) {
  return config_to_json_obj(config).dump();
}

NetworkConfig network_config_from_json(const std::string& text) {
  try {
    return config_from_json_obj(json::parse(text));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad network config JSON: ") + e.what());
  }
}

}  // namespace acdc
