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
#ifndef ACDC_EVAL_HPP_
#define ACDC_EVAL_HPP_

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "acdc/baseline/detector.hpp"
#include "acdc/dataset.hpp"
#include "acdc/nn/network.hpp"
#include "acdc/sequence.hpp"
#include "acdc/simulator.hpp"

namespace acdc {

// Per-output accuracy of a single-frame policy against stored expert labels.
struct StaticEvalResult {
  std::string controller;
  int n_samples = 0;
  double pan_mae = 0;
  double tilt_mae = 0;
  double count_mae = 0;
  // Signed residuals (prediction minus truth), one per evaluated sample.
  std::vector<ModelOutput> residuals;
};

// Maps one dataset sample to predicted controls. Policies may look at the
// image, the provenance, or (for reference rows) the stored label itself.
using StaticPolicy = std::function<ModelOutput(const TrainingSample&)>;

StaticEvalResult static_eval(const std::string& name, const StaticPolicy& policy,
                             const DatasetManifest& manifest, Split split = Split::test);

// Reference policies for report rows.
StaticPolicy zero_policy();
StaticPolicy expert_policy();
StaticPolicy mean_count_policy(const DatasetManifest& manifest);  // train-split mean count
StaticPolicy model_policy(std::shared_ptr<const AcdcNetF> net);
// Single-frame detector + COM variant of the baseline (no temporal state);
// recomputes ground-truth boxes from sample provenance against `source`.
StaticPolicy detector_com_policy(std::shared_ptr<const FrameSequence> source,
                                 const CameraIntrinsics& intr,
                                 const NoisyOracleDetectorConfig& detector);

struct EpisodeSummary {
  std::string controller;
  std::string sequence_id;
  std::uint64_t seed = 0;
  int steps = 0;
  double mean_visible = 0;
  double frac_any_visible = 0;
  double mean_abs_control_error_x = 0;
  double mean_abs_control_error_y = 0;
  double throughput_fps = 0;
  bool complete = true;
};

EpisodeSummary summarize(const EpisodeReport& report, std::uint64_t seed);

// Moving average of visible_count over trailing windows of `window` steps
// (shorter at the start), for plotting coverage over time. window >= 1.
std::vector<double> visible_series(const EpisodeReport& report, int window);

struct ComparisonReport {
  std::vector<EpisodeSummary> episodes;
  std::vector<EpisodeReport> episode_details;  // parallel to episodes
  std::vector<StaticEvalResult> static_results;
};

// Runs every controller over every sequence from the same start state. A
// ground-truth expert row is always evaluated first. Controllers are reseeded
// from (seed, controller name, sequence id), so adding or removing one never
// changes another's numbers. An aborted episode is flagged incomplete; the
// rest of the grid still runs.
ComparisonReport episode_eval(const std::vector<Controller*>& controllers,
                              const std::vector<const FrameSequence*>& sequences,
                              const CameraIntrinsics& intr, const CameraState& start,
                              std::uint64_t seed);

// Writes episodes.csv, static_eval.csv, and one step-level JSONL per episode
// (named controller_sequence_seed.jsonl) into `dir`. Numbers round-trip
// exactly. Throws LoadError on an unwritable path.
void emit_report(const ComparisonReport& report, const std::filesystem::path& dir);

std::vector<EpisodeSummary> read_episode_summaries_csv(const std::filesystem::path& file);
// Residuals are not stored in the CSV; returned results carry summary fields only.
std::vector<StaticEvalResult> read_static_results_csv(const std::filesystem::path& file);

}  // namespace acdc

#endif  // ACDC_EVAL_HPP_
