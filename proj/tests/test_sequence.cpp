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
#include <fstream>

#include <doctest.h>

#include "acdc/error.hpp"
#include "acdc/sequence.hpp"
#include "acdc/simulator.hpp"
#include "test_util.hpp"

using namespace acdc;
using acdc_test::box_at;
using acdc_test::images_equal;
using acdc_test::scripted_sequence;
using acdc_test::TempDir;

// --------------------------------------------------------------------------
// Synthesis

TEST_CASE("synthesis is deterministic for a fixed seed") {
  SynthConfig cfg;
  cfg.frame_count = 12;
  cfg.target_count = 3;
  cfg.world_width = 300;
  cfg.world_height = 200;
  const FrameSequence a = synthesize_sequence(cfg, 7);
  const FrameSequence b = synthesize_sequence(cfg, 7);
  REQUIRE(a.frames.size() == b.frames.size());
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    REQUIRE(a.frames[i].boxes == b.frames[i].boxes);
    REQUIRE(images_equal(a.frames[i].image, b.frames[i].image));
  }
  const FrameSequence c = synthesize_sequence(cfg, 8);
  CHECK_FALSE(images_equal(a.frames[0].image, c.frames[0].image));
}

TEST_CASE("every synthesized frame carries the requested target count") {
  SynthConfig cfg;
  cfg.frame_count = 20;
  cfg.target_count = 5;
  const FrameSequence seq = synthesize_sequence(cfg, 1);
  REQUIRE(seq.frames.size() == 20);
  for (const AnnotatedFrame& f : seq.frames) REQUIRE(f.boxes.size() == 5);
}

TEST_CASE("synthesized annotations stay inside the world and match invariants") {
  SynthConfig cfg;
  cfg.frame_count = 40;
  cfg.target_count = 6;
  const FrameSequence seq = synthesize_sequence(cfg, 3);
  for (const AnnotatedFrame& f : seq.frames) {
    REQUIRE(f.image.cols == cfg.world_width);
    REQUIRE(f.image.rows == cfg.world_height);
    for (const BoundingBox& b : f.boxes) {
      REQUIRE(b.valid());
      REQUIRE(b.x_min >= 0);
      REQUIRE(b.y_min >= 0);
      REQUIRE(b.x_max <= cfg.world_width);
      REQUIRE(b.y_max <= cfg.world_height);
    }
  }
}

TEST_CASE("infeasible synthesis configs are rejected") {
  SynthConfig cfg;
  cfg.world_width = 20;
  cfg.world_height = 20;  // smaller than the max target size
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  SynthConfig zero;
  zero.frame_count = 0;
  CHECK_THROWS_AS(zero.validate(), ConfigError);
}

// --------------------------------------------------------------------------
// Directory round trip

TEST_CASE("sequence write/load round-trips bit-exactly") {
  TempDir dir("seq_rt");
  SynthConfig cfg;
  cfg.frame_count = 6;
  cfg.target_count = 2;
  cfg.world_width = 200;
  cfg.world_height = 150;
  const FrameSequence seq = synthesize_sequence(cfg, 11);
  write_sequence(seq, dir.path());
  const FrameSequence loaded = load_sequence(dir.path());
  REQUIRE(loaded.id == seq.id);
  REQUIRE(loaded.world_width == seq.world_width);
  REQUIRE(loaded.world_height == seq.world_height);
  REQUIRE(loaded.frame_rate == seq.frame_rate);
  REQUIRE(loaded.frames.size() == seq.frames.size());
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    REQUIRE(loaded.frames[i].boxes == seq.frames[i].boxes);
    REQUIRE(images_equal(loaded.frames[i].image, seq.frames[i].image));
  }

  // Second write of the loaded copy is byte-identical.
  TempDir dir2("seq_rt2");
  write_sequence(loaded, dir2.path());
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir.path())) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), dir.path());
    std::ifstream f1(entry.path(), std::ios::binary);
    std::ifstream f2(dir2.path() / rel, std::ios::binary);
    std::string c1((std::istreambuf_iterator<char>(f1)), {});
    std::string c2((std::istreambuf_iterator<char>(f2)), {});
    REQUIRE(c1 == c2);
  }
}

TEST_CASE("loading an empty annotation file fails") {
  TempDir dir("seq_empty");
  std::ofstream(dir.path() / "annotations.jsonl").close();
  CHECK_THROWS_AS(load_sequence(dir.path()), LoadError);
}

TEST_CASE("loading reports malformed records with context") {
  TempDir dir("seq_bad");
  SynthConfig cfg;
  cfg.frame_count = 2;
  cfg.world_width = 120;
  cfg.world_height = 120;
  cfg.target_count = 1;
  write_sequence(synthesize_sequence(cfg, 5), dir.path());
  {
    std::ofstream f(dir.path() / "annotations.jsonl", std::ios::app);
    f << "{\"broken\n";
  }
  try {
    load_sequence(dir.path());
    FAIL("expected LoadError");
  } catch (const LoadError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("loading rejects out-of-world boxes") {
  TempDir dir("seq_oob");
  SynthConfig cfg;
  cfg.frame_count = 1;
  cfg.world_width = 120;
  cfg.world_height = 120;
  cfg.target_count = 1;
  FrameSequence seq = synthesize_sequence(cfg, 5);
  seq.frames[0].boxes[0].x_max = 10'000;
  write_sequence(seq, dir.path());
  CHECK_THROWS_AS(load_sequence(dir.path()), LoadError);
}

TEST_CASE("a single-frame single-box sequence loads") {
  TempDir dir("seq_one");
  FrameSequence seq = scripted_sequence(100, 80, 1, 50, 40, 0, 0);
  write_sequence(seq, dir.path());
  const FrameSequence loaded = load_sequence(dir.path());
  REQUIRE(loaded.frames.size() == 1);
  REQUIRE(loaded.frames[0].boxes.size() == 1);
}

// --------------------------------------------------------------------------
// Visibility and rendering

TEST_CASE("visibility requires the center strictly inside the FoV") {
  CameraIntrinsics intr;
  CameraState cam{0, 0};
  // Center 1 px inside the right edge: included and clipped.
  std::vector<BoundingBox> just_in = {box_at(319, 120, 10, 10)};
  auto vis = visible_targets(cam, intr, just_in);
  REQUIRE(vis.size() == 1);
  CHECK(vis[0].x_max == 320);  // clipped to the FoV bound
  CHECK(vis[0].x_min == 314);

  // Center exactly on the border: excluded.
  std::vector<BoundingBox> on_edge = {box_at(320, 120, 10, 10)};
  CHECK(visible_targets(cam, intr, on_edge).empty());
  std::vector<BoundingBox> on_origin = {box_at(0, 0, 10, 10)};
  CHECK(visible_targets(cam, intr, on_origin).empty());

  CHECK(visible_targets(cam, intr, {}).empty());
}

TEST_CASE("visible boxes are translated to FoV-local coordinates") {
  CameraIntrinsics intr;
  CameraState cam{100, 50};
  std::vector<BoundingBox> boxes = {box_at(150, 100, 20, 20)};
  auto vis = visible_targets(cam, intr, boxes);
  REQUIRE(vis.size() == 1);
  CHECK(vis[0].center().x == doctest::Approx(50));
  CHECK(vis[0].center().y == doctest::Approx(50));
}

TEST_CASE("rendering crops the exact FoV rectangle") {
  CameraIntrinsics intr;
  intr.fov_width = 60;
  intr.fov_height = 40;
  cv::Mat world(200, 300, CV_8UC3);
  cv::randu(world, 0, 255);

  const cv::Mat at_origin = render_observation({0, 0}, intr, world);
  REQUIRE(images_equal(at_origin, world(cv::Rect(0, 0, 60, 40))));

  const cv::Mat shifted = render_observation({100, 50}, intr, world);
  REQUIRE(images_equal(shifted, world(cv::Rect(100, 50, 60, 40))));
  CHECK(shifted.at<cv::Vec3b>(0, 0) == world.at<cv::Vec3b>(50, 100));

  cv::Mat gray(200, 300, CV_8UC3, cv::Scalar(77, 77, 77));
  const cv::Mat obs = render_observation({10, 10}, intr, gray);
  REQUIRE(images_equal(obs, cv::Mat(40, 60, CV_8UC3, cv::Scalar(77, 77, 77))));
}

// --------------------------------------------------------------------------
// Stepping

TEST_CASE("zero action leaves the camera in place") {
  CameraIntrinsics intr;
  const CameraState cam{100, 100};
  CHECK(step(cam, {0, 0, 0}, intr, 768, 576) == cam);
}

TEST_CASE("steps clamp at the world boundary") {
  CameraIntrinsics intr;
  const CameraState next = step({0, 100}, {-0.3, 0, 0}, intr, 768, 576);
  CHECK(next.x == 0);
  CHECK(next.y == 100);
  const CameraState far_right = step({448, 100}, {0.9, 0, 0}, intr, 768, 576);
  CHECK(far_right.x == 448);  // 768 - 320
}

TEST_CASE("step applies the rounded pixel displacement") {
  CameraIntrinsics intr;  // 320x240
  const CameraState next = step({100, 100}, {0.25, 0, 0}, intr, 768, 576);
  CHECK(next.x == 180);
  CHECK(next.y == 100);
}

TEST_CASE("out-of-range actions are clipped and counted") {
  CameraIntrinsics intr;
  SimStats stats;
  const CameraState next = step({100, 100}, {2.0, 0, 0}, intr, 768, 576, &stats);
  CHECK(next.x == 420);  // clipped to u_x = 1 -> +320
  CHECK(stats.clipped_actions == 1);
  step({100, 100}, {0.5, 0, 0}, intr, 768, 576, &stats);
  CHECK(stats.clipped_actions == 1);
}

TEST_CASE("rendering and stepping commute with a world translation") {
  const int dx = 17, dy = 9;
  CameraIntrinsics intr;
  intr.fov_width = 50;
  intr.fov_height = 40;

  cv::Mat small(120, 160, CV_8UC3);
  cv::randu(small, 0, 255);
  cv::Mat big(120 + dy, 160 + dx, CV_8UC3, cv::Scalar(0, 0, 0));
  small.copyTo(big(cv::Rect(dx, dy, 160, 120)));

  std::vector<BoundingBox> boxes = {box_at(60, 50, 10, 10), box_at(90, 70, 8, 8)};
  std::vector<BoundingBox> shifted;
  for (const BoundingBox& b : boxes)
    shifted.push_back({b.x_min + dx, b.y_min + dy, b.x_max + dx, b.y_max + dy});

  const CameraState cam{30, 25};
  const CameraState cam_shifted{30 + dx, 25 + dy};
  REQUIRE(images_equal(render_observation(cam, intr, small),
                       render_observation(cam_shifted, intr, big)));
  CHECK(visible_targets(cam, intr, boxes) == visible_targets(cam_shifted, intr, shifted));

  const ControlLabel action{0.2, -0.1, 0};
  const CameraState a = step(cam, action, intr, 160, 120);
  const CameraState b = step(cam_shifted, action, intr, 160 + dx, 120 + dy);
  CHECK(b.x - a.x == dx);
  CHECK(b.y - a.y == dy);
}

// --------------------------------------------------------------------------
// Episodes

namespace {

class ExpertPolicy : public Controller {
 public:
  std::string name() const override { return "expert-test"; }
  ControlLabel act(const Observation& obs) override {
    return expert_label(obs.camera, obs.intrinsics, obs.world_boxes);
  }
};

class ZeroPolicy : public Controller {
 public:
  std::string name() const override { return "zero-test"; }
  ControlLabel act(const Observation&) override { return {0, 0, 0}; }
};

class ThrowingPolicy : public Controller {
 public:
  std::string name() const override { return "throwing"; }
  ControlLabel act(const Observation& obs) override {
    if (obs.frame_index >= 3) throw std::runtime_error("boom");
    return {0, 0, 0};
  }
};

}  // namespace

TEST_CASE("the expert controller has zero per-step control error") {
  CameraIntrinsics intr;
  intr.fov_width = 64;
  intr.fov_height = 48;
  const FrameSequence seq = scripted_sequence(200, 150, 25, 40, 40, 3, 1);
  ExpertPolicy expert;
  const EpisodeReport rep = run_episode(seq, expert, {20, 20}, intr);
  REQUIRE(rep.complete);
  REQUIRE(rep.steps.size() == 25);
  CHECK(rep.mean_abs_control_error_x == 0);
  CHECK(rep.mean_abs_control_error_y == 0);
  for (const StepRecord& s : rep.steps) {
    CHECK(s.action_applied == s.expert);
  }
}

TEST_CASE("the zero controller never moves the camera") {
  CameraIntrinsics intr;
  intr.fov_width = 64;
  intr.fov_height = 48;
  const FrameSequence seq = scripted_sequence(200, 150, 10, 100, 75, 2, 0);
  ZeroPolicy zero;
  const EpisodeReport rep = run_episode(seq, zero, {30, 30}, intr);
  for (const StepRecord& s : rep.steps) {
    CHECK(s.camera_before == CameraState{30, 30});
    CHECK(s.camera_after == CameraState{30, 30});
  }
}

TEST_CASE("the expert keeps a slow lone target visible after the first step") {
  CameraIntrinsics intr;
  intr.fov_width = 64;
  intr.fov_height = 48;
  // Per-frame motion 3 px, far below half the FoV width; target starts inside
  // the initial FoV.
  const FrameSequence seq = scripted_sequence(300, 150, 60, 50, 40, 3, 0.5);
  ExpertPolicy expert;
  const EpisodeReport rep = run_episode(seq, expert, {30, 20}, intr);
  REQUIRE(rep.complete);
  for (std::size_t i = 1; i < rep.steps.size(); ++i)
    REQUIRE(rep.steps[i].visible_count == 1);
  double vis_after_first = 0;
  for (std::size_t i = 1; i < rep.steps.size(); ++i)
    vis_after_first += rep.steps[i].visible_count;
  CHECK(vis_after_first / (rep.steps.size() - 1) == 1.0);
}

TEST_CASE("episode reports are deterministic modulo latency") {
  CameraIntrinsics intr;
  intr.fov_width = 64;
  intr.fov_height = 48;
  const FrameSequence seq = scripted_sequence(200, 150, 15, 60, 60, 2, 1);
  ExpertPolicy expert;
  const EpisodeReport a = run_episode(seq, expert, {10, 10}, intr);
  const EpisodeReport b = run_episode(seq, expert, {10, 10}, intr);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].camera_after == b.steps[i].camera_after);
    CHECK(a.steps[i].action_applied == b.steps[i].action_applied);
    CHECK(a.steps[i].visible_count == b.steps[i].visible_count);
  }
  CHECK(a.mean_visible == b.mean_visible);
}

TEST_CASE("camera stays inside the world for arbitrary action streams") {
  CameraIntrinsics intr;
  intr.fov_width = 64;
  intr.fov_height = 48;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  CameraState cam{0, 0};
  SimStats stats;
  for (int i = 0; i < 2000; ++i) {
    cam = step(cam, {u(rng), u(rng), 0}, intr, 200, 150, &stats);
    REQUIRE(cam.x >= 0);
    REQUIRE(cam.x <= 200 - 64);
    REQUIRE(cam.y >= 0);
    REQUIRE(cam.y <= 150 - 48);
  }
  CHECK(stats.clipped_actions > 0);
}

TEST_CASE("a throwing controller yields a partial incomplete report") {
  CameraIntrinsics intr;
  intr.fov_width = 64;
  intr.fov_height = 48;
  const FrameSequence seq = scripted_sequence(200, 150, 10, 60, 60, 1, 1);
  ThrowingPolicy bad;
  const EpisodeReport rep = run_episode(seq, bad, {10, 10}, intr);
  CHECK_FALSE(rep.complete);
  CHECK(rep.steps.size() == 3);
}

TEST_CASE("mean_visible equals the arithmetic mean of per-step counts") {
  CameraIntrinsics intr;
  intr.fov_width = 64;
  intr.fov_height = 48;
  const FrameSequence seq = scripted_sequence(200, 150, 20, 60, 60, 4, 2);
  ZeroPolicy zero;
  const EpisodeReport rep = run_episode(seq, zero, {40, 40}, intr);
  double acc = 0;
  for (const StepRecord& s : rep.steps) acc += s.visible_count;
  CHECK(rep.mean_visible == doctest::Approx(acc / rep.steps.size()).epsilon(1e-15));
}

TEST_CASE("episode report files round-trip") {
  TempDir dir("ep_rt");
  CameraIntrinsics intr;
  intr.fov_width = 64;
  intr.fov_height = 48;
  const FrameSequence seq = scripted_sequence(200, 150, 8, 60, 60, 2, 1);
  ExpertPolicy expert;
  const EpisodeReport rep = run_episode(seq, expert, {10, 10}, intr);
  const auto file = dir.path() / "episode.jsonl";
  write_episode_report(rep, file);
  const EpisodeReport back = read_episode_report(file);
  REQUIRE(back.steps.size() == rep.steps.size());
  CHECK(back.controller_name == rep.controller_name);
  CHECK(back.sequence_id == rep.sequence_id);
  CHECK(back.mean_visible == rep.mean_visible);
  CHECK(back.complete == rep.complete);
  for (std::size_t i = 0; i < rep.steps.size(); ++i) {
    CHECK(back.steps[i].camera_after == rep.steps[i].camera_after);
    CHECK(back.steps[i].action_applied == rep.steps[i].action_applied);
    CHECK(back.steps[i].visible_count == rep.steps[i].visible_count);
  }
}
