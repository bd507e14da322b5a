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
#include "acdc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <opencv2/imgcodecs.hpp>

#include <json.hpp>

#include "acdc/error.hpp"
#include "acdc/simulator.hpp"
#include "acdc/util.hpp"

namespace acdc {

using nlohmann::json;

std::vector<int> DatasetManifest::train_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < split.size(); ++i)
    if (split[i] == Split::train) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> DatasetManifest::test_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < split.size(); ++i)
    if (split[i] == Split::test) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<TrainingSample> generate_pairs(const FrameSequence& seq,
                                           const CameraIntrinsics& intr,
                                           int n_samples, std::uint64_t seed) {
  intr.validate();
  if (n_samples < 1) throw std::invalid_argument("generate_pairs: n_samples must be >= 1");
  if (seq.frames.empty()) throw std::invalid_argument("generate_pairs: empty sequence");
  if (seq.world_width <= intr.fov_width || seq.world_height <= intr.fov_height)
    throw std::invalid_argument("generate_pairs: sequence smaller than the FoV");

  std::vector<TrainingSample> samples;
  samples.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    auto rng = make_rng(derive_seed(seed, "sample", static_cast<std::uint64_t>(i)));
    std::uniform_int_distribution<int> dframe(0, static_cast<int>(seq.frames.size()) - 1);
    std::uniform_int_distribution<int> dx(0, seq.world_width - intr.fov_width);
    std::uniform_int_distribution<int> dy(0, seq.world_height - intr.fov_height);

    const int f = dframe(rng);
    const CameraState camera{dx(rng), dy(rng)};
    const auto& frame = seq.frames[f];

    TrainingSample s;
    s.image = render_observation(camera, intr, frame.image);
    s.label = expert_label(camera, intr, frame.boxes);
    s.provenance = {seq.id, f, camera.x, camera.y};
    samples.push_back(std::move(s));
  }
  return samples;
}

DatasetManifest split_dataset(std::vector<TrainingSample> samples,
                              const CameraIntrinsics& intr, double train_fraction,
                              std::uint64_t seed) {
  if (train_fraction <= 0 || train_fraction >= 1)
    throw std::invalid_argument("split_dataset: train_fraction must be in (0,1)");
  if (samples.size() < 2)
    throw std::invalid_argument("split_dataset: need at least 2 samples");

  // Group by source frame; ordered map keeps grouping independent of sample
  // order before the seeded shuffle.
  std::map<std::pair<std::string, int>, std::vector<int>> groups;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& p = samples[i].provenance;
    groups[{p.sequence_id, p.frame_index}].push_back(static_cast<int>(i));
  }
  std::vector<std::vector<int>> group_list;
  group_list.reserve(groups.size());
  for (auto& [key, idx] : groups) group_list.push_back(std::move(idx));

  auto rng = make_rng(derive_seed(seed, "split"));
  std::shuffle(group_list.begin(), group_list.end(), rng);

  const auto target =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(samples.size())));

  DatasetManifest manifest;
  manifest.intrinsics = intr;
  manifest.seed = seed;
  manifest.split.assign(samples.size(), Split::test);
  std::size_t train_count = 0;
  for (const auto& group : group_list) {
    if (train_count >= target) break;
    for (int i : group) manifest.split[i] = Split::train;
    train_count += group.size();
  }
  manifest.samples = std::move(samples);
  return manifest;
}

namespace {

std::string sample_image_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "images/%06d.png", index);
  return buf;
}

json intrinsics_to_json(const CameraIntrinsics& intr) {
  json j;
  j["fov_width"] = intr.fov_width;
  j["fov_height"] = intr.fov_height;
  j["aov_x_deg"] = intr.aov_x_deg;
  j["aov_y_deg"] = intr.aov_y_deg;
  return j;
}

CameraIntrinsics intrinsics_from_json(const json& j) {
  CameraIntrinsics intr;
  intr.fov_width = j.at("fov_width");
  intr.fov_height = j.at("fov_height");
  intr.aov_x_deg = j.at("aov_x_deg");
  intr.aov_y_deg = j.at("aov_y_deg");
  return intr;
}

}  // namespace

void write_dataset(const DatasetManifest& manifest, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (manifest.samples.size() != manifest.split.size())
    throw std::invalid_argument("write_dataset: split assignment out of sync");
  fs::create_directories(dir / "images");

  std::ofstream out(dir / "manifest.jsonl");
  if (!out) throw LoadError("cannot open for writing: " + (dir / "manifest.jsonl").string());

  json header;
  header["type"] = "dataset_header";
  header["intrinsics"] = intrinsics_to_json(manifest.intrinsics);
  header["seed"] = manifest.seed;
  header["count"] = static_cast<int>(manifest.samples.size());
  out << header.dump() << "\n";

  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    const auto& s = manifest.samples[i];
    const std::string name = sample_image_name(static_cast<int>(i));
    if (!cv::imwrite((dir / name).string(), s.image))
      throw LoadError("failed to write image: " + (dir / name).string());

    json rec;
    rec["type"] = "sample";
    rec["index"] = static_cast<int>(i);
    rec["image"] = name;
    rec["u_x"] = s.label.u_x;
    rec["u_y"] = s.label.u_y;
    rec["count"] = s.label.count;
    rec["provenance"] = {{"sequence", s.provenance.sequence_id},
                         {"frame", s.provenance.frame_index},
                         {"camera_x", s.provenance.camera_x},
                         {"camera_y", s.provenance.camera_y}};
    rec["split"] = manifest.split[i] == Split::train ? "train" : "test";
    out << rec.dump() << "\n";
  }
}

DatasetManifest read_dataset(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path path = dir / "manifest.jsonl";
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open: " + path.string());

  DatasetManifest manifest;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  int expected_count = 0;

  auto record_error = [&](const std::string& what) {
    return LoadError(path.string() + " line " + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      throw record_error(std::string("malformed record: ") + e.what());
    }
    try {
      const std::string type = rec.at("type");
      if (type == "dataset_header") {
        if (have_header) throw record_error("duplicate header");
        manifest.intrinsics = intrinsics_from_json(rec.at("intrinsics"));
        manifest.seed = rec.at("seed");
        expected_count = rec.at("count");
        have_header = true;
      } else if (type == "sample") {
        if (!have_header) throw record_error("sample record before header");
        const int idx = rec.at("index");
        if (idx != static_cast<int>(manifest.samples.size()))
          throw record_error("sample index " + std::to_string(idx) + " out of order");

        TrainingSample s;
        const std::string image_rel = rec.at("image");
        s.image = cv::imread((dir / image_rel).string(), cv::IMREAD_COLOR);
        if (s.image.empty())
          throw record_error("missing or unreadable image: " + (dir / image_rel).string());
        if (s.image.cols != manifest.intrinsics.fov_width ||
            s.image.rows != manifest.intrinsics.fov_height)
          throw record_error("image size does not match dataset intrinsics");
        s.label.u_x = rec.at("u_x");
        s.label.u_y = rec.at("u_y");
        s.label.count = rec.at("count");
        const auto& prov = rec.at("provenance");
        s.provenance = {prov.at("sequence"), prov.at("frame"), prov.at("camera_x"),
                        prov.at("camera_y")};
        const std::string split = rec.at("split");
        if (split != "train" && split != "test")
          throw record_error("unknown split tag: " + split);
        manifest.samples.push_back(std::move(s));
        manifest.split.push_back(split == "train" ? Split::train : Split::test);
      } else {
        throw record_error("unknown record type: " + type);
      }
    } catch (const json::exception& e) {
      throw record_error(std::string("malformed record: ") + e.what());
    }
  }

  if (!have_header) throw LoadError(path.string() + ": empty manifest");
  if (static_cast<int>(manifest.samples.size()) != expected_count)
    throw LoadError(path.string() + ": header count " + std::to_string(expected_count) +
                    " but " + std::to_string(manifest.samples.size()) + " sample records");
  return manifest;
}

}  // namespace acdc
