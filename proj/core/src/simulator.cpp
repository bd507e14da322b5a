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
#include "acdc/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "acdc/error.hpp"

namespace acdc {

using nlohmann::json;

std::vector<BoundingBox> visible_targets(const CameraState& camera,
                                         const CameraIntrinsics& intr,
                                         std::span<const BoundingBox> world_boxes) {
  std::vector<BoundingBox> out;
  for (const auto& b : world_boxes) {
    if (!center_in_fov(b, camera, intr)) continue;
    BoundingBox local{b.x_min - camera.x, b.y_min - camera.y,
                      b.x_max - camera.x, b.y_max - camera.y};
    local.x_min = std::max(local.x_min, 0.0);
    local.y_min = std::max(local.y_min, 0.0);
    local.x_max = std::min(local.x_max, static_cast<double>(intr.fov_width));
    local.y_max = std::min(local.y_max, static_cast<double>(intr.fov_height));
    out.push_back(local);
  }
  return out;
}

cv::Mat render_observation(const CameraState& camera, const CameraIntrinsics& intr,
                           const cv::Mat& world) {
  if (camera.x < 0 || camera.y < 0 || camera.x + intr.fov_width > world.cols ||
      camera.y + intr.fov_height > world.rows)
    throw std::invalid_argument("render_observation: camera outside world bounds");
  return world(cv::Rect(camera.x, camera.y, intr.fov_width, intr.fov_height)).clone();
}

CameraState step(const CameraState& camera, const ControlLabel& action,
                 const CameraIntrinsics& intr, int world_width, int world_height,
                 SimStats* stats) {
  ControlLabel a = action;
  if (std::abs(a.u_x) > 1.0 || std::abs(a.u_y) > 1.0) {
    a.u_x = std::clamp(a.u_x, -1.0, 1.0);
    a.u_y = std::clamp(a.u_y, -1.0, 1.0);
    if (stats) ++stats->clipped_actions;
  }
  const cv::Point2d shift = label_to_pixel_shift(a, intr);
  CameraState next;
  next.x = std::clamp<int>(camera.x + static_cast<int>(std::lround(shift.x)), 0,
                           world_width - intr.fov_width);
  next.y = std::clamp<int>(camera.y + static_cast<int>(std::lround(shift.y)), 0,
                           world_height - intr.fov_height);
  return next;
}

EpisodeReport run_episode(const FrameSequence& seq, Controller& controller,
                          const CameraState& start, const CameraIntrinsics& intr) {
  intr.validate();
  if (seq.frames.empty()) throw std::invalid_argument("run_episode: empty sequence");
  if (seq.world_width <= intr.fov_width || seq.world_height <= intr.fov_height)
    throw std::invalid_argument("run_episode: world must be larger than the FoV");

  EpisodeReport report;
  report.controller_name = controller.name();
  report.sequence_id = seq.id;
  report.steps.reserve(seq.frames.size());

  CameraState camera;
  camera.x = std::clamp(start.x, 0, seq.world_width - intr.fov_width);
  camera.y = std::clamp(start.y, 0, seq.world_height - intr.fov_height);

  controller.reset();
  SimStats stats;
  double latency_total = 0;

  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    const auto& frame = seq.frames[t];
    const cv::Mat obs_image = render_observation(camera, intr, frame.image);
    const auto fov_boxes = visible_targets(camera, intr, frame.boxes);
    const ControlLabel expert = expert_label(camera, intr, frame.boxes);

    StepRecord rec;
    rec.frame_index = static_cast<int>(t);
    rec.camera_before = camera;
    rec.expert = expert;
    rec.visible_count = static_cast<int>(fov_boxes.size());

    Observation obs{static_cast<int>(t), obs_image, camera, intr, frame.boxes, fov_boxes};
    ControlLabel action;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      action = controller.act(obs);
    } catch (const std::exception&) {
      report.complete = false;
      break;
    }
    rec.latency_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    latency_total += rec.latency_s;

    camera = step(camera, action, intr, seq.world_width, seq.world_height, &stats);
    rec.action_applied = action;
    rec.action_applied.u_x = std::clamp(action.u_x, -1.0, 1.0);
    rec.action_applied.u_y = std::clamp(action.u_y, -1.0, 1.0);
    rec.camera_after = camera;
    report.steps.push_back(rec);
  }

  if (!report.steps.empty()) {
    double vis = 0, ex = 0, ey = 0;
    for (const auto& s : report.steps) {
      vis += s.visible_count;
      ex += std::abs(s.action_applied.u_x - s.expert.u_x);
      ey += std::abs(s.action_applied.u_y - s.expert.u_y);
    }
    const double n = static_cast<double>(report.steps.size());
    report.mean_visible = vis / n;
    report.mean_abs_control_error_x = ex / n;
    report.mean_abs_control_error_y = ey / n;
    report.throughput_fps = latency_total > 0 ? n / latency_total : 0;
  }
  return report;
}

namespace {

json label_to_json(const ControlLabel& l) { return json{l.u_x, l.u_y, l.count}; }

ControlLabel label_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace

void write_episode_report(const EpisodeReport& report, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw LoadError("cannot open for writing: " + file.string());

  json header;
  header["type"] = "episode_header";
  header["controller"] = report.controller_name;
  header["sequence"] = report.sequence_id;
  out << header.dump() << "\n";

  for (const auto& s : report.steps) {
    json rec;
    rec["type"] = "step";
    rec["frame"] = s.frame_index;
    rec["camera_before"] = {s.camera_before.x, s.camera_before.y};
    rec["camera_after"] = {s.camera_after.x, s.camera_after.y};
    rec["action"] = label_to_json(s.action_applied);
    rec["expert"] = label_to_json(s.expert);
    rec["visible"] = s.visible_count;
    rec["latency_s"] = s.latency_s;
    out << rec.dump() << "\n";
  }

  json summary;
  summary["type"] = "episode_summary";
  summary["controller_name"] = report.controller_name;
  summary["sequence_id"] = report.sequence_id;
  summary["steps"] = static_cast<int>(report.steps.size());
  summary["mean_visible"] = report.mean_visible;
  summary["mean_abs_control_error"] = {report.mean_abs_control_error_x,
                                       report.mean_abs_control_error_y};
  summary["throughput_fps"] = report.throughput_fps;
  summary["complete"] = report.complete;
  out << summary.dump() << "\n";
}

EpisodeReport read_episode_report(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw LoadError("cannot open: " + file.string());

  EpisodeReport report;
  std::string line;
  int line_no = 0;
  bool have_summary = false;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json rec = json::parse(line);
      const std::string type = rec.at("type");
      if (type == "episode_header") {
        report.controller_name = rec.at("controller");
        report.sequence_id = rec.at("sequence");
      } else if (type == "step") {
        StepRecord s;
        s.frame_index = rec.at("frame");
        s.camera_before = {rec.at("camera_before").at(0), rec.at("camera_before").at(1)};
        s.camera_after = {rec.at("camera_after").at(0), rec.at("camera_after").at(1)};
        s.action_applied = label_from_json(rec.at("action"));
        s.expert = label_from_json(rec.at("expert"));
        s.visible_count = rec.at("visible");
        s.latency_s = rec.at("latency_s");
        report.steps.push_back(s);
      } else if (type == "episode_summary") {
        report.mean_visible = rec.at("mean_visible");
        report.mean_abs_control_error_x = rec.at("mean_abs_control_error").at(0);
        report.mean_abs_control_error_y = rec.at("mean_abs_control_error").at(1);
        report.throughput_fps = rec.at("throughput_fps");
        report.complete = rec.at("complete");
        have_summary = true;
      }
    }
  } catch (const json::exception& e) {
    throw LoadError(file.string() + " line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_summary)
    throw LoadError(file.string() + ": missing episode_summary record");
  return report;
}

}  // namespace acdc
