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
#ifndef ACDC_CONTROLLERS_HPP_
#define ACDC_CONTROLLERS_HPP_

#include <memory>
#include <string>

#include "acdc/baseline/tracker.hpp"
#include "acdc/nn/network.hpp"
#include "acdc/simulator.hpp"

namespace acdc {

/// Ground-truth controller: centers the COM of the currently visible targets
/// using perfect knowledge of their world positions.
class ExpertController : public Controller {
 public:
  std::string name() const override { return "expert"; }
  ControlLabel act(const Observation& obs) override;
};

/// Never moves the camera; coverage and error floor reference.
class StaticController : public Controller {
 public:
  std::string name() const override { return "static"; }
  ControlLabel act(const Observation&) override { return {0, 0, 0}; }
};

/// Runs the trained regressor on each observation image.
class ModelController : public Controller {
 public:
  explicit ModelController(std::shared_ptr<const AcdcNetF> net, std::string name = "acdcnet");
  std::string name() const override { return name_; }
  ControlLabel act(const Observation& obs) override;

 private:
  std::shared_ptr<const AcdcNetF> net_;
  std::string name_;
};

struct BaselineControllerConfig {
  NoisyOracleDetectorConfig detector;
  TrackerParams tracker;
};

/// Traditional pipeline: detector over the current FoV, multi-target Kalman
/// tracking, COM control from confirmed tracks. Between frames the track
/// estimates are shifted by the observed camera displacement so they remain
/// valid in the new FoV frame.
class BaselineController : public Controller {
 public:
  explicit BaselineController(BaselineControllerConfig config, std::string name = "baseline");
  std::string name() const override { return name_; }
  void reset() override;
  void reseed(std::uint64_t seed) override { config_.detector.seed = seed; }
  ControlLabel act(const Observation& obs) override;

  const MultiTargetTracker& tracker() const { return tracker_; }

 private:
  BaselineControllerConfig config_;
  std::string name_;
  MultiTargetTracker tracker_;
  bool have_prev_camera_ = false;
  CameraState prev_camera_{0, 0};
};

}  // namespace acdc

#endif  // ACDC_CONTROLLERS_HPP_
