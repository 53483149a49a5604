// Copyright 2026 The topomap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TOPOMAP__CALIBRATE_HPP_
#define TOPOMAP__CALIBRATE_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "topomap/experiments.hpp"
#include "topomap/platform.hpp"

namespace topomap
{

class CalibrationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A measured speedup for one pub-sub cell. `hw_path` selects the slowest
/// hardware subscriber, otherwise the software subscriber is measured.
struct SpeedupTarget
{
  std::string label;
  PubSubCell cell;
  bool hw_path = true;
  double speedup = 1.0;
};

using SpeedupEvaluator = std::function<double(const PlatformModel &, const SpeedupTarget &)>;

struct CalibrationOptions
{
  /// Names from calibratable_parameters(). Empty means all of them.
  std::vector<std::string> free_parameters;
  double initial_step = 2.0;
  /// Search stops once the multiplicative step drops below 1 + this.
  double step_tolerance = 1e-3;
  std::size_t max_evaluations = 20000;
  /// Root-mean-square log error above which the fit counts as failed.
  double residual_threshold = std::log(1.25);
};

struct TargetResidual
{
  SpeedupTarget target;
  double simulated = 0.0;
  double log_error = 0.0;
};

struct CalibrationResult
{
  PlatformModel model;
  std::vector<TargetResidual> residuals;
  /// Sum of squared log errors.
  double objective = 0.0;
  double rms_log_error = 0.0;
  bool within_threshold = true;
  std::size_t evaluations = 0;
};

/// Parameter names accepted in CalibrationOptions::free_parameters.
std::vector<std::string> calibratable_parameters();
double get_parameter(const PlatformModel & model, std::string_view name);
void set_parameter(PlatformModel & model, std::string_view name, double value);

/// Coordinate descent in log space on the free parameters, minimizing the
/// sum of squared log errors between evaluated and target speedups. Moves
/// are accepted only on strict improvement, so a model that already fits
/// comes back unchanged. Candidates violating PlatformModel::validate() or
/// hmt < memif bandwidth are skipped.
CalibrationResult calibrate(
  const std::vector<SpeedupTarget> & targets, const PlatformModel & initial,
  const SpeedupEvaluator & evaluate, const CalibrationOptions & options = {});

/// Simulates both the all-SMT and the gateway mapping of the target's cell.
SpeedupEvaluator simulated_speedup_evaluator(
  std::size_t repetitions = 20, double period_us = 1.0e7, std::uint64_t seed = 42);

struct TargetsDocument
{
  std::vector<SpeedupTarget> targets;
  PlatformModel initial;
  CalibrationOptions options;
  std::size_t repetitions = 20;
  std::uint64_t seed = 42;
};

TargetsDocument parse_targets(std::string_view text);

std::string calibration_report_json(const CalibrationResult & result);

}  // namespace topomap

#endif  // TOPOMAP__CALIBRATE_HPP_
