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

// acdc: command-line workbench tying the pipeline together.
// Subcommands: synth, dataset, train, eval, bench.
//
// Configuration precedence: compiled defaults < --config JSON file < flags.
// The config file holds a top-level "seed"/"threads" plus one object per
// subcommand, e.g. {"seed": 7, "train": {"epochs": 100}}. Every subcommand
// writes a config.json snapshot of its resolved settings into its output
// directory so a run can be reproduced from the artifact alone.
//
// Exit codes: 0 success, 1 user or configuration error, 2 internal error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <json.hpp>
#include <opencv2/core.hpp>

#include "acdc/augment.hpp"
#include "acdc/controllers.hpp"
#include "acdc/dataset.hpp"
#include "acdc/error.hpp"
#include "acdc/eval.hpp"
#include "acdc/geometry.hpp"
#include "acdc/nn/checkpoint.hpp"
#include "acdc/nn/network.hpp"
#include "acdc/nn/optimizer.hpp"
#include "acdc/nn/train.hpp"
#include "acdc/sequence.hpp"
#include "acdc/simulator.hpp"
#include "acdc/util.hpp"

namespace {

using nlohmann::json;

constexpr double kDefaultTrainFraction = 0.75;
constexpr int kDefaultSampleCount = 3100;

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 1;
};

struct SynthOpts {
  acdc::SynthConfig cfg;
  std::string out;
};

struct DatasetOpts {
  std::string sequence_dir;  // empty: synthesize the source in memory
  std::string out;
  int n_samples = kDefaultSampleCount;
  double train_fraction = kDefaultTrainFraction;
  acdc::CameraIntrinsics intr;
  acdc::SynthConfig synth;  // used when sequence_dir is empty
};

struct TrainOpts {
  std::string dataset_dir;
  std::string sequence_dir;  // optional; enables translation augmentation
  std::string out;
  std::string preset = "paper";  // paper | desk
  std::string resume;            // checkpoint path
  acdc::TrainConfig cfg;
  bool augment = true;
  bool preset_epochs_set = false;  // true once a preset default was applied
};

struct EvalOpts {
  std::string sequence_dir;
  std::string dataset_dir;  // optional; enables static eval
  std::string checkpoint;   // optional; enables the model rows
  std::string out;
  int start_x = -1;  // -1: centered
  int start_y = -1;
  acdc::NoisyOracleDetectorConfig detector;
  acdc::TrackerParams tracker;
};

struct BenchOpts {
  std::string out;  // optional; bench.json destination
  int frames = 50;
  int repeats = 3;
  int episode_steps = 100;
};

// ---------------------------------------------------------------------------
// Config file handling

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw acdc::ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw acdc::ConfigError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw acdc::ConfigError("config file " + path + ": not a JSON object");
  return j;
}

class SectionReader {
 public:
  SectionReader(const json& section, std::string name)
      : section_(section), name_(std::move(name)) {}

  template <typename T>
  void get(const char* key, T& out) {
    if (!section_.contains(key)) return;
    try {
      out = section_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw acdc::ConfigError("config section '" + name_ + "', key '" + key +
                              "': " + e.what());
    }
    seen_.push_back(key);
  }

  void finish() const {
    for (const auto& [key, value] : section_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
        throw acdc::ConfigError("config section '" + name_ + "': unknown key '" + key + "'");
    }
  }

 private:
  const json& section_;
  std::string name_;
  std::vector<std::string> seen_;
};

void apply_synth_section(SectionReader& r, acdc::SynthConfig& c) {
  r.get("world_width", c.world_width);
  r.get("world_height", c.world_height);
  r.get("frames", c.frame_count);
  r.get("targets", c.target_count);
  r.get("target_min_w", c.target_min_w);
  r.get("target_max_w", c.target_max_w);
  r.get("target_min_h", c.target_min_h);
  r.get("target_max_h", c.target_max_h);
  r.get("speed_min", c.speed_min);
  r.get("speed_max", c.speed_max);
  r.get("pixel_noise_sigma", c.pixel_noise_sigma);
  r.get("frame_rate", c.frame_rate);
  r.get("id", c.sequence_id);
}

void apply_config(const json& cfg, const std::string& active, GlobalOpts& g, SynthOpts& sy,
                  DatasetOpts& ds, TrainOpts& tr, EvalOpts& ev, BenchOpts& be) {
  static const std::vector<std::string> sections = {"synth", "dataset", "train", "eval",
                                                    "bench"};
  for (const auto& [key, value] : cfg.items()) {
    if (key == "seed" || key == "threads" || key == "command") continue;
    if (std::find(sections.begin(), sections.end(), key) == sections.end())
      throw acdc::ConfigError("config: unknown top-level key '" + key + "'");
    if (!value.is_object())
      throw acdc::ConfigError("config: section '" + key + "' must be an object");
  }
  if (cfg.contains("seed")) g.seed = cfg.at("seed").get<std::uint64_t>();
  if (cfg.contains("threads")) g.threads = cfg.at("threads").get<int>();
  if (!cfg.contains(active)) return;

  SectionReader r(cfg.at(active), active);
  if (active == "synth") {
    apply_synth_section(r, sy.cfg);
    r.get("out", sy.out);
  } else if (active == "dataset") {
    r.get("sequence", ds.sequence_dir);
    r.get("out", ds.out);
    r.get("samples", ds.n_samples);
    r.get("train_fraction", ds.train_fraction);
    r.get("fov_width", ds.intr.fov_width);
    r.get("fov_height", ds.intr.fov_height);
    r.get("aov_x", ds.intr.aov_x_deg);
    r.get("aov_y", ds.intr.aov_y_deg);
    apply_synth_section(r, ds.synth);
  } else if (active == "train") {
    r.get("dataset", tr.dataset_dir);
    r.get("sequence", tr.sequence_dir);
    r.get("out", tr.out);
    r.get("preset", tr.preset);
    r.get("resume", tr.resume);
    r.get("epochs", tr.cfg.epochs);
    r.get("batch_size", tr.cfg.batch_size);
    r.get("lr", tr.cfg.initial_lr);
    r.get("lr_decay_factor", tr.cfg.lr_decay_factor);
    r.get("lr_decay_every", tr.cfg.lr_decay_every);
    r.get("high_threshold", tr.cfg.high_threshold);
    r.get("high_fraction", tr.cfg.high_fraction);
    r.get("checkpoint_every", tr.cfg.checkpoint_every);
    r.get("validate_every", tr.cfg.validate_every);
    r.get("early_stop_train_loss", tr.cfg.early_stop_train_loss);
    r.get("augment", tr.augment);
  } else if (active == "eval") {
    r.get("sequence", ev.sequence_dir);
    r.get("dataset", ev.dataset_dir);
    r.get("checkpoint", ev.checkpoint);
    r.get("out", ev.out);
    r.get("start_x", ev.start_x);
    r.get("start_y", ev.start_y);
    r.get("det_center_jitter", ev.detector.center_jitter_sigma);
    r.get("det_size_jitter", ev.detector.size_jitter_sigma);
    r.get("det_miss_prob", ev.detector.miss_prob);
    r.get("det_fp_rate", ev.detector.false_positive_rate);
    r.get("gate", ev.tracker.gate);
    r.get("confirm_hits", ev.tracker.confirm_hits);
    r.get("kill_misses", ev.tracker.kill_misses);
  } else if (active == "bench") {
    r.get("out", be.out);
    r.get("frames", be.frames);
    r.get("repeats", be.repeats);
    r.get("episode_steps", be.episode_steps);
  }
  r.finish();
}

// ---------------------------------------------------------------------------
// Snapshots

json synth_section_json(const acdc::SynthConfig& c) {
  return {{"world_width", c.world_width},
          {"world_height", c.world_height},
          {"frames", c.frame_count},
          {"targets", c.target_count},
          {"target_min_w", c.target_min_w},
          {"target_max_w", c.target_max_w},
          {"target_min_h", c.target_min_h},
          {"target_max_h", c.target_max_h},
          {"speed_min", c.speed_min},
          {"speed_max", c.speed_max},
          {"pixel_noise_sigma", c.pixel_noise_sigma},
          {"frame_rate", c.frame_rate},
          {"id", c.sequence_id}};
}

void write_snapshot(const std::filesystem::path& dir, const std::string& command,
                    const GlobalOpts& g, json section) {
  std::filesystem::create_directories(dir);
  json snap;
  snap["command"] = command;
  snap["seed"] = g.seed;
  snap["threads"] = g.threads;
  snap[command] = std::move(section);
  std::ofstream out(dir / "config.json");
  if (!out)
    throw acdc::LoadError("cannot open for writing: " + (dir / "config.json").string());
  out << snap.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Subcommand bodies

int cmd_synth(const GlobalOpts& g, const SynthOpts& o) {
  o.cfg.validate();
  if (o.out.empty()) throw acdc::ConfigError("synth: --out is required");
  const acdc::FrameSequence seq = acdc::synthesize_sequence(o.cfg, g.seed);
  acdc::write_sequence(seq, o.out);
  write_snapshot(o.out, "synth", g, synth_section_json(o.cfg));
  std::cout << "sequence '" << seq.id << "': " << seq.frames.size() << " frames, "
            << o.cfg.target_count << " targets, world " << seq.world_width << "x"
            << seq.world_height << " -> " << o.out << "\n";
  return 0;
}

void print_label_histogram(const acdc::DatasetManifest& m) {
  constexpr int kBins = 10;  // |u| in [0, 0.5], width 0.05
  std::array<int, kBins> pan{}, tilt{};
  for (const acdc::TrainingSample& s : m.samples) {
    const auto bin = [](double u) {
      return std::min(kBins - 1, static_cast<int>(std::fabs(u) / 0.05));
    };
    ++pan[bin(s.label.u_x)];
    ++tilt[bin(s.label.u_y)];
  }
  const int peak = std::max(*std::max_element(pan.begin(), pan.end()),
                            *std::max_element(tilt.begin(), tilt.end()));
  std::cout << "label magnitude histogram (|u|, bin width 0.05):\n";
  std::cout << "  bin          pan   tilt\n";
  for (int b = 0; b < kBins; ++b) {
    const double lo = b * 0.05;
    char range[32];
    std::snprintf(range, sizeof(range), "[%.2f,%.2f)", lo, lo + 0.05);
    const int bar = peak > 0 ? (40 * pan[b] + peak - 1) / peak : 0;
    std::printf("  %-11s %5d  %5d  %s\n", range, pan[b], tilt[b],
                std::string(bar, '#').c_str());
  }
}

int cmd_dataset(const GlobalOpts& g, const DatasetOpts& o) {
  if (o.out.empty()) throw acdc::ConfigError("dataset: --out is required");
  if (o.n_samples <= 0) throw acdc::ConfigError("dataset: --samples must be positive");
  if (o.train_fraction <= 0 || o.train_fraction >= 1)
    throw acdc::ConfigError("dataset: --train-fraction must be in (0,1)");
  o.intr.validate();

  acdc::FrameSequence seq;
  if (o.sequence_dir.empty()) {
    o.synth.validate();
    seq = acdc::synthesize_sequence(o.synth, acdc::derive_seed(g.seed, "source"));
    std::cout << "synthesized source '" << seq.id << "' (" << seq.frames.size()
              << " frames)\n";
  } else {
    seq = acdc::load_sequence(o.sequence_dir);
    std::cout << "loaded source '" << seq.id << "' (" << seq.frames.size() << " frames)\n";
  }

  std::vector<acdc::TrainingSample> samples =
      acdc::generate_pairs(seq, o.intr, o.n_samples, g.seed);
  acdc::DatasetManifest manifest =
      acdc::split_dataset(std::move(samples), o.intr, o.train_fraction, g.seed);

  acdc::write_dataset(manifest, o.out);
  json section = {{"sequence", o.sequence_dir}, {"out", o.out},
                  {"samples", o.n_samples},     {"train_fraction", o.train_fraction},
                  {"fov_width", o.intr.fov_width}, {"fov_height", o.intr.fov_height},
                  {"aov_x", o.intr.aov_x_deg},  {"aov_y", o.intr.aov_y_deg}};
  if (o.sequence_dir.empty()) section.update(synth_section_json(o.synth));
  write_snapshot(o.out, "dataset", g, std::move(section));

  const std::size_t n_train = manifest.train_indices().size();
  const std::size_t n_test = manifest.test_indices().size();
  std::cout << "dataset: " << manifest.samples.size() << " samples -> " << n_train
            << " train / " << n_test << " test (fraction "
            << acdc::format_double(o.train_fraction) << ")\n";
  print_label_histogram(manifest);
  return 0;
}

int cmd_train(const GlobalOpts& g, TrainOpts o) {
  if (o.dataset_dir.empty()) throw acdc::ConfigError("train: --dataset is required");
  if (o.out.empty()) throw acdc::ConfigError("train: --out is required");
  if (o.preset != "paper" && o.preset != "desk")
    throw acdc::ConfigError("train: unknown preset '" + o.preset + "' (paper|desk)");

  const acdc::DatasetManifest manifest = acdc::read_dataset(o.dataset_dir);
  std::cout << "dataset: " << manifest.samples.size() << " samples ("
            << manifest.train_indices().size() << " train), fov "
            << manifest.intrinsics.fov_width << "x" << manifest.intrinsics.fov_height
            << "\n";

  acdc::FrameSequence source;
  const acdc::FrameSequence* source_ptr = nullptr;
  if (!o.sequence_dir.empty()) {
    source = acdc::load_sequence(o.sequence_dir);
    source_ptr = &source;
  }

  o.cfg.seed = g.seed;
  o.cfg.output_dir = o.out;
  if (o.preset == "desk" && !o.preset_epochs_set) {
    o.cfg.epochs = 300;
    o.cfg.early_stop_train_loss = 0.045;
  }

  acdc::AcdcNetF net = [&] {
    if (!o.resume.empty()) return acdc::load_checkpoint(o.resume);
    acdc::NetworkConfig nc =
        o.preset == "desk" ? acdc::NetworkConfig::desk_default() : acdc::NetworkConfig();
    nc.input_width = manifest.intrinsics.fov_width;
    nc.input_height = manifest.intrinsics.fov_height;
    nc.seed = acdc::derive_seed(g.seed, "init");
    return acdc::build_network<float>(nc);
  }();

  acdc::Adam<float> adam(net.tensors());
  if (!o.resume.empty()) {
    const acdc::CheckpointMeta meta = acdc::load_checkpoint_into(net, o.resume, &adam);
    o.cfg.start_epoch = meta.epoch;
    if (o.cfg.epochs <= o.cfg.start_epoch)
      throw acdc::ConfigError("train: --epochs " + std::to_string(o.cfg.epochs) +
                              " does not extend resumed checkpoint at epoch " +
                              std::to_string(meta.epoch));
    std::cout << "resumed from '" << o.resume << "' at epoch " << meta.epoch << "\n";
  }

  json section = {{"dataset", o.dataset_dir},
                  {"sequence", o.sequence_dir},
                  {"out", o.out},
                  {"preset", o.preset},
                  {"resume", o.resume},
                  {"epochs", o.cfg.epochs},
                  {"batch_size", o.cfg.batch_size},
                  {"lr", o.cfg.initial_lr},
                  {"lr_decay_factor", o.cfg.lr_decay_factor},
                  {"lr_decay_every", o.cfg.lr_decay_every},
                  {"high_threshold", o.cfg.high_threshold},
                  {"high_fraction", o.cfg.high_fraction},
                  {"checkpoint_every", o.cfg.checkpoint_every},
                  {"validate_every", o.cfg.validate_every},
                  {"early_stop_train_loss", o.cfg.early_stop_train_loss},
                  {"augment", o.augment},
                  {"network", json::parse(acdc::network_config_to_json(net.config()))}};
  write_snapshot(o.out, "train", g, std::move(section));

  const acdc::AugmentationPolicy policy =
      o.augment ? acdc::AugmentationPolicy{} : acdc::AugmentationPolicy::identity();

  std::cout << "training: " << o.cfg.epochs << " epochs (from " << o.cfg.start_epoch
            << "), batch " << o.cfg.batch_size << ", lr "
            << acdc::format_double(o.cfg.initial_lr) << " x"
            << acdc::format_double(o.cfg.lr_decay_factor) << " every "
            << o.cfg.lr_decay_every << " epochs, params " << net.param_count() << "\n";

  const acdc::TrainResult result =
      acdc::train(net, manifest, o.cfg, policy, source_ptr, &adam);
  for (const acdc::EpochRecord& rec : result.history) {
    std::cout << "epoch " << rec.epoch << " lr " << acdc::format_double(rec.lr)
              << " train_loss " << acdc::format_double(rec.train_loss);
    if (rec.has_val) std::cout << " val_loss " << acdc::format_double(rec.val_loss);
    std::cout << "\n";
  }
  if (result.early_stopped) std::cout << "early stop: train loss below threshold\n";
  std::cout << "checkpoint: " << result.final_checkpoint.string() << "\n";
  return 0;
}

int cmd_eval(const GlobalOpts& g, const EvalOpts& o) {
  if (o.sequence_dir.empty()) throw acdc::ConfigError("eval: --sequence is required");
  if (o.out.empty()) throw acdc::ConfigError("eval: --out is required");
  o.detector.validate();
  o.tracker.validate();

  const acdc::FrameSequence seq = acdc::load_sequence(o.sequence_dir);

  std::shared_ptr<const acdc::AcdcNetF> net;
  if (!o.checkpoint.empty())
    net = std::make_shared<const acdc::AcdcNetF>(acdc::load_checkpoint(o.checkpoint));

  acdc::CameraIntrinsics intr;  // paper FoV unless a dataset overrides it
  std::unique_ptr<acdc::DatasetManifest> manifest;
  if (!o.dataset_dir.empty()) {
    manifest = std::make_unique<acdc::DatasetManifest>(acdc::read_dataset(o.dataset_dir));
    intr = manifest->intrinsics;
  } else if (net) {
    intr.fov_width = net->config().input_width;
    intr.fov_height = net->config().input_height;
  }
  intr.validate();
  if (seq.world_width <= intr.fov_width || seq.world_height <= intr.fov_height)
    throw acdc::ConfigError("eval: sequence world must exceed the FoV");

  acdc::CameraState start{o.start_x, o.start_y};
  if (o.start_x < 0) start.x = (seq.world_width - intr.fov_width) / 2;
  if (o.start_y < 0) start.y = (seq.world_height - intr.fov_height) / 2;

  acdc::StaticController static_ctrl;
  acdc::BaselineControllerConfig bl;
  bl.detector = o.detector;
  bl.tracker = o.tracker;
  acdc::BaselineController baseline(bl);
  std::vector<acdc::Controller*> controllers = {&static_ctrl, &baseline};
  std::unique_ptr<acdc::ModelController> model_ctrl;
  if (net) {
    model_ctrl = std::make_unique<acdc::ModelController>(net);
    controllers.push_back(model_ctrl.get());
  }

  acdc::ComparisonReport report =
      acdc::episode_eval(controllers, {&seq}, intr, start, g.seed);

  if (manifest) {
    report.static_results.push_back(
        acdc::static_eval("zero", acdc::zero_policy(), *manifest));
    report.static_results.push_back(
        acdc::static_eval("mean_count", acdc::mean_count_policy(*manifest), *manifest));
    report.static_results.push_back(
        acdc::static_eval("expert", acdc::expert_policy(), *manifest));
    if (net)
      report.static_results.push_back(
          acdc::static_eval("acdcnet", acdc::model_policy(net), *manifest));
    const bool provenance_matches =
        !manifest->samples.empty() &&
        std::all_of(manifest->samples.begin(), manifest->samples.end(),
                    [&](const acdc::TrainingSample& s) {
                      return s.provenance.sequence_id == seq.id;
                    });
    if (provenance_matches) {
      acdc::NoisyOracleDetectorConfig det = o.detector;
      det.seed = acdc::derive_seed(g.seed, "static-detector");
      auto shared_seq = std::make_shared<const acdc::FrameSequence>(seq);
      report.static_results.push_back(acdc::static_eval(
          "detector_com", acdc::detector_com_policy(shared_seq, intr, det), *manifest));
    }
  }

  acdc::emit_report(report, o.out);
  json section = {{"sequence", o.sequence_dir},
                  {"dataset", o.dataset_dir},
                  {"checkpoint", o.checkpoint},
                  {"out", o.out},
                  {"start_x", start.x},
                  {"start_y", start.y},
                  {"det_center_jitter", o.detector.center_jitter_sigma},
                  {"det_size_jitter", o.detector.size_jitter_sigma},
                  {"det_miss_prob", o.detector.miss_prob},
                  {"det_fp_rate", o.detector.false_positive_rate},
                  {"gate", o.tracker.gate},
                  {"confirm_hits", o.tracker.confirm_hits},
                  {"kill_misses", o.tracker.kill_misses}};
  write_snapshot(o.out, "eval", g, std::move(section));

  std::cout << "episodes (controller, mean_visible, |err_x|, |err_y|, fps):\n";
  for (const acdc::EpisodeSummary& e : report.episodes) {
    std::printf("  %-12s %-10s visible %.4f errx %.4f erry %.4f fps %.1f%s\n",
                e.controller.c_str(), e.sequence_id.c_str(), e.mean_visible,
                e.mean_abs_control_error_x, e.mean_abs_control_error_y, e.throughput_fps,
                e.complete ? "" : "  [incomplete]");
  }
  if (!report.static_results.empty()) {
    std::cout << "static eval (test split):\n";
    for (const acdc::StaticEvalResult& r : report.static_results)
      std::printf("  %-12s pan_mae %.4f tilt_mae %.4f count_mae %.4f (n=%d)\n",
                  r.controller.c_str(), r.pan_mae, r.tilt_mae, r.count_mae, r.n_samples);
  }
  std::cout << "report -> " << o.out << "\n";
  return 0;
}

struct BenchRow {
  std::string method;
  double mean_fps = 0;
  double stdev_fps = 0;
  std::vector<double> runs;
};

BenchRow summarize_runs(std::string method, std::vector<double> runs) {
  BenchRow row;
  row.method = std::move(method);
  row.runs = std::move(runs);
  const double n = static_cast<double>(row.runs.size());
  row.mean_fps = std::accumulate(row.runs.begin(), row.runs.end(), 0.0) / n;
  double acc = 0;
  for (double v : row.runs) acc += (v - row.mean_fps) * (v - row.mean_fps);
  row.stdev_fps = n > 1 ? std::sqrt(acc / (n - 1)) : 0.0;
  return row;
}

int cmd_bench(const GlobalOpts& g, const BenchOpts& o) {
  if (o.frames < 10) throw acdc::ConfigError("bench: --frames must be at least 10");
  if (o.repeats < 1) throw acdc::ConfigError("bench: --repeats must be at least 1");

  std::vector<BenchRow> rows;
  for (const auto& [label, cfg] :
       {std::pair{"acdcnet-paper", acdc::NetworkConfig::paper_default()},
        std::pair{"acdcnet-desk", acdc::NetworkConfig::desk_default()}}) {
    acdc::NetworkConfig nc = cfg;
    nc.seed = acdc::derive_seed(g.seed, "bench", label);
    const acdc::AcdcNetF net = acdc::build_network<float>(nc);
    std::vector<double> runs;
    for (int r = 0; r < o.repeats; ++r)
      runs.push_back(acdc::benchmark_inference(net, o.frames).fps);
    rows.push_back(summarize_runs(label, std::move(runs)));
  }

  {
    acdc::SynthConfig sc;
    sc.frame_count = std::max(o.episode_steps, 10);
    sc.sequence_id = "bench";
    const acdc::FrameSequence seq =
        acdc::synthesize_sequence(sc, acdc::derive_seed(g.seed, "bench", "seq"));
    acdc::CameraIntrinsics intr;
    const acdc::CameraState start{(seq.world_width - intr.fov_width) / 2,
                                  (seq.world_height - intr.fov_height) / 2};
    std::vector<double> runs;
    for (int r = 0; r < o.repeats; ++r) {
      acdc::BaselineController baseline{acdc::BaselineControllerConfig{}};
      baseline.reseed(acdc::derive_seed(g.seed, "bench", "baseline", r));
      const acdc::EpisodeReport ep = acdc::run_episode(seq, baseline, start, intr);
      runs.push_back(ep.throughput_fps);
    }
    rows.push_back(summarize_runs("baseline-pipeline", std::move(runs)));
  }

  std::cout << "method              mean_fps   stdev_fps   repeats\n";
  for (const BenchRow& row : rows)
    std::printf("%-18s %9.2f  %9.2f  %8zu\n", row.method.c_str(), row.mean_fps,
                row.stdev_fps, row.runs.size());
  std::cout << "reference: 25 FPS reported for the original full-scale system "
               "(different hardware; non-binding)\n";

  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    json doc;
    doc["reference_fps"] = 25.0;
    doc["reference_binding"] = false;
    doc["frames"] = o.frames;
    doc["repeats"] = o.repeats;
    for (const BenchRow& row : rows)
      doc["rows"].push_back({{"method", row.method},
                             {"mean_fps", row.mean_fps},
                             {"stdev_fps", row.stdev_fps},
                             {"runs", row.runs}});
    std::ofstream f(std::filesystem::path(o.out) / "bench.json");
    f << doc.dump(2) << "\n";
    write_snapshot(o.out, "bench", g,
                   {{"out", o.out},
                    {"frames", o.frames},
                    {"repeats", o.repeats},
                    {"episode_steps", o.episode_steps}});
    std::cout << "report -> " << o.out << "\n";
  }
  return 0;
}

std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOpts g;
  SynthOpts synth_opts;
  DatasetOpts dataset_opts;
  TrainOpts train_opts;
  EvalOpts eval_opts;
  BenchOpts bench_opts;

  CLI::App app{"Active-camera control workbench: simulate, imitate, evaluate"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (defaults < file < flags)");
  app.add_option("--seed", g.seed, "Global seed; all randomness derives from it")
      ->capture_default_str();
  app.add_option("--threads", g.threads, "Worker parallelism cap")->capture_default_str();

  CLI::App* synth = app.add_subcommand("synth", "Synthesize an annotated sequence");
  synth->add_option("--out", synth_opts.out, "Output sequence directory");
  synth->add_option("--world-width", synth_opts.cfg.world_width)->capture_default_str();
  synth->add_option("--world-height", synth_opts.cfg.world_height)->capture_default_str();
  synth->add_option("--frames", synth_opts.cfg.frame_count)->capture_default_str();
  synth->add_option("--targets", synth_opts.cfg.target_count)->capture_default_str();
  synth->add_option("--speed-min", synth_opts.cfg.speed_min)->capture_default_str();
  synth->add_option("--speed-max", synth_opts.cfg.speed_max)->capture_default_str();
  synth->add_option("--pixel-noise-sigma", synth_opts.cfg.pixel_noise_sigma)
      ->capture_default_str();
  synth->add_option("--frame-rate", synth_opts.cfg.frame_rate)->capture_default_str();
  synth->add_option("--id", synth_opts.cfg.sequence_id)->capture_default_str();

  CLI::App* dataset =
      app.add_subcommand("dataset", "Generate an expert state-action dataset");
  dataset->add_option("--sequence", dataset_opts.sequence_dir,
                      "Source sequence directory (omit to synthesize one)");
  dataset->add_option("--out", dataset_opts.out, "Output dataset directory");
  dataset->add_option("--samples", dataset_opts.n_samples)->capture_default_str();
  dataset->add_option("--train-fraction", dataset_opts.train_fraction)
      ->capture_default_str();
  dataset->add_option("--fov-width", dataset_opts.intr.fov_width)->capture_default_str();
  dataset->add_option("--fov-height", dataset_opts.intr.fov_height)->capture_default_str();
  dataset->add_option("--aov-x", dataset_opts.intr.aov_x_deg)->capture_default_str();
  dataset->add_option("--aov-y", dataset_opts.intr.aov_y_deg)->capture_default_str();

  CLI::App* train = app.add_subcommand("train", "Train the controller network");
  train->add_option("--dataset", train_opts.dataset_dir, "Dataset directory");
  train->add_option("--sequence", train_opts.sequence_dir,
                    "Source sequence (enables translation augmentation)");
  train->add_option("--out", train_opts.out, "Output directory");
  train->add_option("--preset", train_opts.preset, "paper|desk")->capture_default_str();
  train->add_option("--resume", train_opts.resume, "Checkpoint to continue from");
  auto* epochs_opt = train->add_option("--epochs", train_opts.cfg.epochs);
  epochs_opt->capture_default_str();
  train->add_option("--batch-size", train_opts.cfg.batch_size)->capture_default_str();
  train->add_option("--lr", train_opts.cfg.initial_lr)->capture_default_str();
  train->add_option("--lr-decay-factor", train_opts.cfg.lr_decay_factor)
      ->capture_default_str();
  train->add_option("--lr-decay-every", train_opts.cfg.lr_decay_every)
      ->capture_default_str();
  train->add_option("--high-threshold", train_opts.cfg.high_threshold)
      ->capture_default_str();
  train->add_option("--high-fraction", train_opts.cfg.high_fraction)->capture_default_str();
  train->add_option("--checkpoint-every", train_opts.cfg.checkpoint_every)
      ->capture_default_str();
  train->add_option("--validate-every", train_opts.cfg.validate_every)
      ->capture_default_str();
  auto* early_opt =
      train->add_option("--early-stop-train-loss", train_opts.cfg.early_stop_train_loss);
  early_opt->capture_default_str();
  train->add_flag("--augment,!--no-augment", train_opts.augment,
                  "Per-sample augmentation (default on)");

  CLI::App* eval = app.add_subcommand("eval", "Compare controllers on a sequence");
  eval->add_option("--sequence", eval_opts.sequence_dir, "Sequence directory");
  eval->add_option("--dataset", eval_opts.dataset_dir,
                   "Dataset directory (enables static eval)");
  eval->add_option("--checkpoint", eval_opts.checkpoint, "Trained model checkpoint");
  eval->add_option("--out", eval_opts.out, "Report directory");
  eval->add_option("--start-x", eval_opts.start_x, "Initial camera x (default centered)");
  eval->add_option("--start-y", eval_opts.start_y, "Initial camera y (default centered)");
  eval->add_option("--det-center-jitter", eval_opts.detector.center_jitter_sigma)
      ->capture_default_str();
  eval->add_option("--det-size-jitter", eval_opts.detector.size_jitter_sigma)
      ->capture_default_str();
  eval->add_option("--det-miss-prob", eval_opts.detector.miss_prob)->capture_default_str();
  eval->add_option("--det-fp-rate", eval_opts.detector.false_positive_rate)
      ->capture_default_str();
  eval->add_option("--gate", eval_opts.tracker.gate)->capture_default_str();
  eval->add_option("--confirm-hits", eval_opts.tracker.confirm_hits)->capture_default_str();
  eval->add_option("--kill-misses", eval_opts.tracker.kill_misses)->capture_default_str();

  CLI::App* bench = app.add_subcommand("bench", "Measure inference and pipeline throughput");
  bench->add_option("--out", bench_opts.out, "Optional report directory");
  bench->add_option("--frames", bench_opts.frames)->capture_default_str();
  bench->add_option("--repeats", bench_opts.repeats)->capture_default_str();
  bench->add_option("--episode-steps", bench_opts.episode_steps)->capture_default_str();

  try {
    json cfg_json = json::object();
    const std::string pre_config = find_config_arg(argc, argv);
    if (!pre_config.empty()) {
      cfg_json = load_config_file(pre_config);
      std::string active;
      for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "synth" || a == "dataset" || a == "train" || a == "eval" || a == "bench") {
          active = a;
          break;
        }
      }
      if (active.empty() && cfg_json.contains("command"))
        active = cfg_json.at("command").get<std::string>();
      apply_config(cfg_json, active, g, synth_opts, dataset_opts, train_opts, eval_opts,
                   bench_opts);
    }

    app.parse(argc, argv);
    const bool cfg_sets_schedule =
        cfg_json.contains("train") && (cfg_json["train"].contains("epochs") ||
                                       cfg_json["train"].contains("early_stop_train_loss"));
    train_opts.preset_epochs_set =
        epochs_opt->count() > 0 || early_opt->count() > 0 || cfg_sets_schedule;

    g.threads = std::max(1, g.threads);
    cv::setNumThreads(g.threads);
    Eigen::setNbThreads(g.threads);

    if (synth->parsed()) return cmd_synth(g, synth_opts);
    if (dataset->parsed()) return cmd_dataset(g, dataset_opts);
    if (train->parsed()) return cmd_train(g, train_opts);
    if (eval->parsed()) return cmd_eval(g, eval_opts);
    if (bench->parsed()) return cmd_bench(g, bench_opts);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const acdc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const acdc::LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
