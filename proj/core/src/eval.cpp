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
#include "acdc/eval.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "acdc/controllers.hpp"
#include "acdc/error.hpp"
#include "acdc/util.hpp"

namespace acdc {

StaticEvalResult static_eval(const std::string& name, const StaticPolicy& policy,
                             const DatasetManifest& manifest, Split split) {
  if (!policy) throw std::invalid_argument("static_eval: empty policy");
  StaticEvalResult result;
  result.controller = name;

  double sx = 0, sy = 0, sc = 0;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    if (manifest.split[i] != split) continue;
    const TrainingSample& sample = manifest.samples[i];
    const ModelOutput pred = policy(sample);
    ModelOutput res;
    res.u_x = pred.u_x - sample.label.u_x;
    res.u_y = pred.u_y - sample.label.u_y;
    res.count = pred.count - sample.label.count;
    sx += std::fabs(res.u_x);
    sy += std::fabs(res.u_y);
    sc += std::fabs(res.count);
    result.residuals.push_back(res);
    ++result.n_samples;
  }
  if (result.n_samples == 0) throw std::invalid_argument("static_eval: empty split");
  result.pan_mae = sx / result.n_samples;
  result.tilt_mae = sy / result.n_samples;
  result.count_mae = sc / result.n_samples;
  return result;
}

StaticPolicy zero_policy() {
  return [](const TrainingSample&) { return ModelOutput{0, 0, 0}; };
}

StaticPolicy expert_policy() {
  return [](const TrainingSample& s) {
    return ModelOutput{s.label.u_x, s.label.u_y, s.label.count};
  };
}

StaticPolicy mean_count_policy(const DatasetManifest& manifest) {
  double sum = 0;
  int n = 0;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    if (manifest.split[i] != Split::train) continue;
    sum += manifest.samples[i].label.count;
    ++n;
  }
  const double mean = n > 0 ? sum / n : 0.0;
  return [mean](const TrainingSample&) { return ModelOutput{0, 0, mean}; };
}

StaticPolicy model_policy(std::shared_ptr<const AcdcNetF> net) {
  if (!net) throw std::invalid_argument("model_policy: null network");
  return [net](const TrainingSample& s) { return net->forward(s.image); };
}

StaticPolicy detector_com_policy(std::shared_ptr<const FrameSequence> source,
                                 const CameraIntrinsics& intr,
                                 const NoisyOracleDetectorConfig& detector) {
  if (!source) throw std::invalid_argument("detector_com_policy: null sequence");
  detector.validate();
  return [source, intr, detector](const TrainingSample& s) {
    if (s.provenance.sequence_id != source->id)
      throw std::invalid_argument("detector_com_policy: sample from sequence '" +
                                  s.provenance.sequence_id + "', source is '" + source->id +
                                  "'");
    const int fi = s.provenance.frame_index;
    if (fi < 0 || fi >= static_cast<int>(source->frames.size()))
      throw std::invalid_argument("detector_com_policy: provenance frame out of range");
    const CameraState cam{s.provenance.camera_x, s.provenance.camera_y};
    const std::vector<BoundingBox> fov =
        visible_targets(cam, intr, source->frames[fi].boxes);
    const std::vector<Detection> dets = detect(fov, intr, detector, fi);
    std::vector<cv::Point2d> centers;
    centers.reserve(dets.size());
    for (const Detection& d : dets) centers.push_back(d.box.center());
    const ControlLabel label = com_control(centers, intr);
    return ModelOutput{label.u_x, label.u_y, static_cast<double>(dets.size())};
  };
}

EpisodeSummary summarize(const EpisodeReport& report, std::uint64_t seed) {
  EpisodeSummary s;
  s.controller = report.controller_name;
  s.sequence_id = report.sequence_id;
  s.seed = seed;
  s.steps = static_cast<int>(report.steps.size());
  s.mean_visible = report.mean_visible;
  s.mean_abs_control_error_x = report.mean_abs_control_error_x;
  s.mean_abs_control_error_y = report.mean_abs_control_error_y;
  s.throughput_fps = report.throughput_fps;
  s.complete = report.complete;
  int any = 0;
  for (const StepRecord& r : report.steps)
    if (r.visible_count >= 1) ++any;
  s.frac_any_visible = report.steps.empty() ? 0.0 : static_cast<double>(any) / report.steps.size();
  return s;
}

std::vector<double> visible_series(const EpisodeReport& report, int window) {
  if (window < 1) throw std::invalid_argument("visible_series: window must be >= 1");
  std::vector<double> out;
  out.reserve(report.steps.size());
  double acc = 0;
  for (std::size_t i = 0; i < report.steps.size(); ++i) {
    acc += report.steps[i].visible_count;
    if (i >= static_cast<std::size_t>(window))
      acc -= report.steps[i - window].visible_count;
    const double n = std::min<std::size_t>(i + 1, window);
    out.push_back(acc / n);
  }
  return out;
}

ComparisonReport episode_eval(const std::vector<Controller*>& controllers,
                              const std::vector<const FrameSequence*>& sequences,
                              const CameraIntrinsics& intr, const CameraState& start,
                              std::uint64_t seed) {
  if (sequences.empty()) throw std::invalid_argument("episode_eval: no sequences");
  for (const FrameSequence* s : sequences)
    if (s == nullptr) throw std::invalid_argument("episode_eval: null sequence");
  for (Controller* c : controllers)
    if (c == nullptr) throw std::invalid_argument("episode_eval: null controller");

  ExpertController expert;
  std::vector<Controller*> all;
  all.push_back(&expert);
  all.insert(all.end(), controllers.begin(), controllers.end());

  ComparisonReport report;
  for (const FrameSequence* seq : sequences) {
    for (Controller* c : all) {
      const std::uint64_t episode_seed = derive_seed(seed, c->name(), seq->id);
      c->reseed(episode_seed);
      EpisodeReport ep;
      try {
        ep = run_episode(*seq, *c, start, intr);
      } catch (const std::exception&) {
        ep.controller_name = c->name();
        ep.sequence_id = seq->id;
        ep.complete = false;
      }
      report.episodes.push_back(summarize(ep, episode_seed));
      report.episode_details.push_back(std::move(ep));
    }
  }
  return report;
}

namespace {

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out.empty() ? "unnamed" : out;
}

void check_field(const std::string& s) {
  if (s.find(',') != std::string::npos || s.find('\n') != std::string::npos)
    throw std::invalid_argument("emit_report: field contains a delimiter: " + s);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

void emit_report(const ComparisonReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);

  {
    std::ofstream out(dir / "episodes.csv");
    if (!out) throw LoadError("cannot open for writing: " + (dir / "episodes.csv").string());
    out << "controller,sequence,seed,steps,mean_visible,frac_any_visible,"
           "mean_abs_control_error_x,mean_abs_control_error_y,throughput_fps,complete\n";
    for (const EpisodeSummary& e : report.episodes) {
      check_field(e.controller);
      check_field(e.sequence_id);
      out << e.controller << "," << e.sequence_id << "," << e.seed << "," << e.steps << ","
          << format_double(e.mean_visible) << "," << format_double(e.frac_any_visible) << ","
          << format_double(e.mean_abs_control_error_x) << ","
          << format_double(e.mean_abs_control_error_y) << ","
          << format_double(e.throughput_fps) << "," << (e.complete ? 1 : 0) << "\n";
    }
  }
  {
    std::ofstream out(dir / "static_eval.csv");
    if (!out)
      throw LoadError("cannot open for writing: " + (dir / "static_eval.csv").string());
    out << "controller,n_samples,pan_mae,tilt_mae,count_mae\n";
    for (const StaticEvalResult& r : report.static_results) {
      check_field(r.controller);
      out << r.controller << "," << r.n_samples << "," << format_double(r.pan_mae) << ","
          << format_double(r.tilt_mae) << "," << format_double(r.count_mae) << "\n";
    }
  }
  for (std::size_t i = 0; i < report.episode_details.size(); ++i) {
    const EpisodeSummary& e = report.episodes[i];
    const std::string name = sanitize(e.controller) + "_" + sanitize(e.sequence_id) + "_" +
                             std::to_string(e.seed) + ".jsonl";
    write_episode_report(report.episode_details[i], dir / name);
  }
}

std::vector<EpisodeSummary> read_episode_summaries_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw LoadError("cannot open: " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw LoadError("empty file: " + file.string());

  std::vector<EpisodeSummary> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 10)
      throw LoadError(file.string() + " line " + std::to_string(line_no) +
                      ": expected 10 fields, got " + std::to_string(f.size()));
    EpisodeSummary e;
    try {
      e.controller = f[0];
      e.sequence_id = f[1];
      e.seed = std::stoull(f[2]);
      e.steps = std::stoi(f[3]);
      e.mean_visible = std::stod(f[4]);
      e.frac_any_visible = std::stod(f[5]);
      e.mean_abs_control_error_x = std::stod(f[6]);
      e.mean_abs_control_error_y = std::stod(f[7]);
      e.throughput_fps = std::stod(f[8]);
      e.complete = std::stoi(f[9]) != 0;
    } catch (const std::exception& ex) {
      throw LoadError(file.string() + " line " + std::to_string(line_no) + ": " + ex.what());
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<StaticEvalResult> read_static_results_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw LoadError("cannot open: " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw LoadError("empty file: " + file.string());

  std::vector<StaticEvalResult> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5)
      throw LoadError(file.string() + " line " + std::to_string(line_no) +
                      ": expected 5 fields, got " + std::to_string(f.size()));
    StaticEvalResult r;
    try {
      r.controller = f[0];
      r.n_samples = std::stoi(f[1]);
      r.pan_mae = std::stod(f[2]);
      r.tilt_mae = std::stod(f[3]);
      r.count_mae = std::stod(f[4]);
    } catch (const std::exception& ex) {
      throw LoadError(file.string() + " line " + std::to_string(line_no) + ": " + ex.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace acdc
