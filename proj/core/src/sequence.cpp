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
#include "acdc/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <json.hpp>

#include "acdc/error.hpp"
#include "acdc/util.hpp"

namespace acdc {

using nlohmann::json;

void SynthConfig::validate() const {
  if (world_width <= 0 || world_height <= 0)
    throw ConfigError("synth: world dimensions must be positive");
  if (frame_count <= 0) throw ConfigError("synth: frame_count must be positive");
  if (target_count < 0) throw ConfigError("synth: target_count must be non-negative");
  if (target_min_w <= 0 || target_min_h <= 0 || target_min_w > target_max_w ||
      target_min_h > target_max_h)
    throw ConfigError("synth: invalid target size range");
  if (target_max_w >= world_width || target_max_h >= world_height)
    throw ConfigError("synth: target size exceeds world dimensions");
  if (speed_min < 0 || speed_min > speed_max)
    throw ConfigError("synth: invalid speed range");
  if (pixel_noise_sigma < 0) throw ConfigError("synth: negative noise sigma");
}

namespace {

struct MovingTarget {
  double x, y;      // top-left, double precision between frames
  int w, h;
  double vx, vy;    // px/frame
  cv::Scalar fill;
  cv::Scalar border;
};

// Reflect pos into [0, limit], flipping velocity on each bounce.
void reflect(double& pos, double& vel, double limit) {
  if (limit <= 0) {
    pos = 0;
    return;
  }
  while (pos < 0 || pos > limit) {
    if (pos < 0) {
      pos = -pos;
      vel = -vel;
    } else {
      pos = 2 * limit - pos;
      vel = -vel;
    }
  }
}

cv::Mat make_background(const SynthConfig& cfg, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> base(70, 140);
  cv::Mat bg(cfg.world_height, cfg.world_width, CV_8UC3,
             cv::Scalar(base(rng), base(rng), base(rng)));

  // Sparse muted patches give the scene some structure without resembling
  // targets.
  const int patches = std::max(8, cfg.world_width * cfg.world_height / 12000);
  std::uniform_int_distribution<int> px(0, cfg.world_width - 1);
  std::uniform_int_distribution<int> py(0, cfg.world_height - 1);
  std::uniform_int_distribution<int> psize(8, std::max(9, cfg.world_width / 8));
  std::uniform_int_distribution<int> shade(-35, 35);
  for (int i = 0; i < patches; ++i) {
    const int x = px(rng), y = py(rng);
    const int w = psize(rng), h = psize(rng);
    cv::Scalar col = bg.at<cv::Vec3b>(0, 0);
    for (int c = 0; c < 3; ++c)
      col[c] = std::clamp(static_cast<int>(col[c]) + shade(rng), 0, 255);
    cv::rectangle(bg, {x, y, w, h}, col, cv::FILLED);
  }
  return bg;
}

cv::Scalar target_color(int index, std::mt19937_64& rng) {
  // Saturated hues spaced around the circle, slight per-target jitter.
  std::uniform_int_distribution<int> jitter(-12, 12);
  const int hue = (index * 47 + jitter(rng) + 180) % 180;
  cv::Mat hsv(1, 1, CV_8UC3, cv::Scalar(hue, 200, 230));
  cv::Mat bgr;
  cv::cvtColor(hsv, bgr, cv::COLOR_HSV2BGR);
  const auto px = bgr.at<cv::Vec3b>(0, 0);
  return {static_cast<double>(px[0]), static_cast<double>(px[1]),
          static_cast<double>(px[2])};
}

}  // namespace

FrameSequence synthesize_sequence(const SynthConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  auto rng = make_rng(derive_seed(seed, "synth"));

  const cv::Mat background = make_background(cfg, rng);

  std::vector<MovingTarget> targets;
  std::uniform_int_distribution<int> dw(cfg.target_min_w, cfg.target_max_w);
  std::uniform_int_distribution<int> dh(cfg.target_min_h, cfg.target_max_h);
  std::uniform_real_distribution<double> dspeed(cfg.speed_min, cfg.speed_max);
  std::uniform_real_distribution<double> dangle(0.0, 2.0 * CV_PI);
  for (int i = 0; i < cfg.target_count; ++i) {
    MovingTarget t;
    t.w = dw(rng);
    t.h = dh(rng);
    std::uniform_real_distribution<double> dx(0.0, cfg.world_width - t.w);
    std::uniform_real_distribution<double> dy(0.0, cfg.world_height - t.h);
    t.x = dx(rng);
    t.y = dy(rng);
    const double speed = dspeed(rng);
    const double angle = dangle(rng);
    t.vx = speed * std::cos(angle);
    t.vy = speed * std::sin(angle);
    t.fill = target_color(i, rng);
    t.border = t.fill * 0.45;
    targets.push_back(t);
  }

  FrameSequence seq;
  seq.id = cfg.sequence_id;
  seq.world_width = cfg.world_width;
  seq.world_height = cfg.world_height;
  seq.frame_rate = cfg.frame_rate;
  seq.frames.reserve(cfg.frame_count);

  for (int f = 0; f < cfg.frame_count; ++f) {
    AnnotatedFrame frame;
    frame.image = background.clone();
    for (auto& t : targets) {
      const int ix = std::clamp<int>(std::lround(t.x), 0, cfg.world_width - t.w);
      const int iy = std::clamp<int>(std::lround(t.y), 0, cfg.world_height - t.h);
      cv::rectangle(frame.image, {ix, iy, t.w, t.h}, t.fill, cv::FILLED);
      cv::rectangle(frame.image, {ix, iy, t.w, t.h}, t.border, 2);
      frame.boxes.push_back({static_cast<double>(ix), static_cast<double>(iy),
                             static_cast<double>(ix + t.w),
                             static_cast<double>(iy + t.h)});
    }
    if (cfg.pixel_noise_sigma > 0) {
      cv::Mat noise(frame.image.size(), CV_16SC3);
      cv::theRNG().state = derive_seed(seed, "noise", static_cast<std::uint64_t>(f));
      cv::randn(noise, 0, cfg.pixel_noise_sigma);
      cv::Mat tmp;
      frame.image.convertTo(tmp, CV_16SC3);
      tmp += noise;
      tmp.convertTo(frame.image, CV_8UC3);
    }
    seq.frames.push_back(std::move(frame));

    for (auto& t : targets) {
      t.x += t.vx;
      t.y += t.vy;
      reflect(t.x, t.vx, static_cast<double>(cfg.world_width - t.w));
      reflect(t.y, t.vy, static_cast<double>(cfg.world_height - t.h));
    }
  }
  return seq;
}

namespace {

std::string frame_image_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frames/%06d.png", index);
  return buf;
}

}  // namespace

void write_sequence(const FrameSequence& seq, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "frames");

  std::ofstream out(dir / "annotations.jsonl");
  if (!out) throw LoadError("cannot open for writing: " + (dir / "annotations.jsonl").string());

  json header;
  header["type"] = "sequence_header";
  header["sequence_id"] = seq.id;
  header["world_width"] = seq.world_width;
  header["world_height"] = seq.world_height;
  header["frame_rate"] = seq.frame_rate;
  header["frame_count"] = static_cast<int>(seq.frames.size());
  out << header.dump() << "\n";

  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    const auto& frame = seq.frames[i];
    const std::string name = frame_image_name(static_cast<int>(i));
    if (!cv::imwrite((dir / name).string(), frame.image))
      throw LoadError("failed to write image: " + (dir / name).string());

    json rec;
    rec["type"] = "frame";
    rec["frame"] = static_cast<int>(i);
    rec["image"] = name;
    json boxes = json::array();
    for (const auto& b : frame.boxes) {
      boxes.push_back({static_cast<long long>(std::llround(b.x_min)),
                       static_cast<long long>(std::llround(b.y_min)),
                       static_cast<long long>(std::llround(b.x_max)),
                       static_cast<long long>(std::llround(b.y_max))});
    }
    rec["boxes"] = boxes;
    out << rec.dump() << "\n";
  }
}

FrameSequence load_sequence(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path ann = dir / "annotations.jsonl";
  std::ifstream in(ann);
  if (!in) throw LoadError("cannot open: " + ann.string());

  FrameSequence seq;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  int expected_frame = 0;

  auto record_error = [&](const std::string& what) {
    return LoadError(ann.string() + " line " + std::to_string(line_no) + ": " + what);
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
      if (type == "sequence_header") {
        if (have_header) throw record_error("duplicate header");
        seq.id = rec.at("sequence_id");
        seq.world_width = rec.at("world_width");
        seq.world_height = rec.at("world_height");
        seq.frame_rate = rec.at("frame_rate");
        if (seq.world_width <= 0 || seq.world_height <= 0)
          throw record_error("non-positive world dimensions");
        have_header = true;
      } else if (type == "frame") {
        if (!have_header) throw record_error("frame record before header");
        const int idx = rec.at("frame");
        if (idx != expected_frame)
          throw record_error("frame index " + std::to_string(idx) +
                             " out of order (expected " + std::to_string(expected_frame) + ")");
        ++expected_frame;

        AnnotatedFrame frame;
        const std::string image_rel = rec.at("image");
        const fs::path image_path = dir / image_rel;
        frame.image = cv::imread(image_path.string(), cv::IMREAD_COLOR);
        if (frame.image.empty())
          throw record_error("missing or unreadable image: " + image_path.string());
        if (frame.image.cols != seq.world_width || frame.image.rows != seq.world_height)
          throw record_error("image size " + std::to_string(frame.image.cols) + "x" +
                             std::to_string(frame.image.rows) + " does not match world " +
                             std::to_string(seq.world_width) + "x" +
                             std::to_string(seq.world_height));

        for (const auto& b : rec.at("boxes")) {
          if (!b.is_array() || b.size() != 4) throw record_error("box is not a 4-tuple");
          BoundingBox box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                          b[3].get<double>()};
          if (!box.valid()) throw record_error("malformed box (min >= max)");
          if (box.x_min < 0 || box.y_min < 0 || box.x_max > seq.world_width ||
              box.y_max > seq.world_height)
            throw record_error("box outside world bounds");
          frame.boxes.push_back(box);
        }
        seq.frames.push_back(std::move(frame));
      } else {
        throw record_error("unknown record type: " + type);
      }
    } catch (const json::exception& e) {
      throw record_error(std::string("malformed record: ") + e.what());
    }
  }

  if (!have_header) throw LoadError(ann.string() + ": empty annotation file");
  if (seq.frames.empty()) throw LoadError(ann.string() + ": no frame records");
  return seq;
}

}  // namespace acdc
