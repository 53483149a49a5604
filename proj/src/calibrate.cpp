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

#include "topomap/calibrate.hpp"

#include <limits>
#include <utility>

#include "json.hpp"

namespace topomap
{

using json = nlohmann::json;

namespace
{

struct ParameterRef
{
  const char * name;
  double PlatformModel::* field;
};

constexpr ParameterRef kTopLevel[] = {
  {"memif_bandwidth_bytes_per_s", &PlatformModel::memif_bandwidth_bytes_per_s},
  {"hmt_bandwidth_bytes_per_s", &PlatformModel::hmt_bandwidth_bytes_per_s},
  {"hmt_latency_us", &PlatformModel::hmt_latency_us},
  {"osif_roundtrip_us", &PlatformModel::osif_roundtrip_us},
  {"delegate_publish_us", &PlatformModel::delegate_publish_us},
  {"sw_copy_bandwidth_bytes_per_s", &PlatformModel::sw_copy_bandwidth_bytes_per_s},
};

constexpr const char * kDdsIntercept = "sw_dds_latency.intercept_us";
constexpr const char * kDdsSlope = "sw_dds_latency.us_per_byte";

double * parameter_slot(PlatformModel & model, std::string_view name)
{
  for (const auto & p : kTopLevel) {
    if (name == p.name) {
      return &(model.*(p.field));
    }
  }
  if (name == kDdsIntercept) {
    return &model.sw_dds_latency.intercept_us;
  }
  if (name == kDdsSlope) {
    return &model.sw_dds_latency.us_per_byte;
  }
  throw CalibrationError("unknown calibration parameter \"" + std::string(name) + "\"");
}

bool admissible(const PlatformModel & m)
{
  try {
    m.validate();
  } catch (const SimulationError &) {
    return false;
  }
  return m.hmt_bandwidth_bytes_per_s >= m.memif_bandwidth_bytes_per_s;
}

}  // namespace

std::vector<std::string> calibratable_parameters()
{
  std::vector<std::string> out;
  for (const auto & p : kTopLevel) {
    out.emplace_back(p.name);
  }
  out.emplace_back(kDdsIntercept);
  out.emplace_back(kDdsSlope);
  return out;
}

double get_parameter(const PlatformModel & model, std::string_view name)
{
  PlatformModel copy = model;
  return *parameter_slot(copy, name);
}

void set_parameter(PlatformModel & model, std::string_view name, double value)
{
  *parameter_slot(model, name) = value;
}

CalibrationResult calibrate(
  const std::vector<SpeedupTarget> & targets, const PlatformModel & initial,
  const SpeedupEvaluator & evaluate, const CalibrationOptions & options)
{
  if (targets.empty()) {
    throw CalibrationError("no calibration targets");
  }
  for (const auto & t : targets) {
    if (!(t.speedup > 0.0)) {
      throw CalibrationError("target \"" + t.label + "\" must have a positive speedup");
    }
  }
  if (!(options.initial_step > 1.0) || !(options.step_tolerance > 0.0)) {
    throw CalibrationError("calibration step must exceed 1 and tolerance must be positive");
  }
  std::vector<std::string> free = options.free_parameters;
  if (free.empty()) {
    free = calibratable_parameters();
  }
  PlatformModel x = initial;
  for (const auto & name : free) {
    (void)parameter_slot(x, name);
  }
  initial.validate();

  CalibrationResult result;
  auto objective = [&](const PlatformModel & m) {
      ++result.evaluations;
      double sum = 0.0;
      for (const auto & t : targets) {
        const double s = evaluate(m, t);
        if (!(s > 0.0)) {
          return std::numeric_limits<double>::infinity();
        }
        const double e = std::log(s) - std::log(t.speedup);
        sum += e * e;
      }
      return sum;
    };

  double best = objective(x);
  double step = options.initial_step;
  while (step > 1.0 + options.step_tolerance && result.evaluations < options.max_evaluations) {
    bool improved = false;
    for (const auto & name : free) {
      for (double factor : {step, 1.0 / step}) {
        PlatformModel candidate = x;
        set_parameter(candidate, name, get_parameter(x, name) * factor);
        if (!admissible(candidate)) {
          continue;
        }
        const double f = objective(candidate);
        if (f < best) {
          best = f;
          x = candidate;
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      step = std::sqrt(step);
    }
  }

  result.model = x;
  result.objective = 0.0;
  for (const auto & t : targets) {
    const double s = evaluate(x, t);
    const double e = s > 0.0 ? std::log(s) - std::log(t.speedup) :
      std::numeric_limits<double>::infinity();
    result.residuals.push_back(TargetResidual{t, s, e});
    result.objective += e * e;
  }
  result.rms_log_error = std::sqrt(result.objective / static_cast<double>(targets.size()));
  result.within_threshold = result.rms_log_error <= options.residual_threshold;
  return result;
}

SpeedupEvaluator simulated_speedup_evaluator(
  std::size_t repetitions, double period_us, std::uint64_t seed)
{
  return [repetitions, period_us, seed](const PlatformModel & m, const SpeedupTarget & t) {
           const CellComparison c = compare_cell(
             t.cell, m, MappingPolicy::AlwaysSmt, MappingPolicy::MultiHwSub, repetitions,
             period_us, seed);
           return t.hw_path ? c.speedup_hw : c.speedup_sw;
         };
}

TargetsDocument parse_targets(std::string_view text)
{
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error & e) {
    throw GraphError(
            GraphError::Kind::Syntax,
            "targets: syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  TargetsDocument out;
  try {
    if (!doc.is_object() || !doc.contains("targets") || !doc["targets"].is_array()) {
      throw GraphError(GraphError::Kind::Schema, "targets: missing array field \"targets\"");
    }
    for (const auto & t : doc["targets"]) {
      SpeedupTarget st;
      st.label = t.value("label", std::string());
      st.cell.publisher = node_impl_from_string(t.at("publisher").get<std::string>());
      const std::string path = t.at("path").get<std::string>();
      if (path != "hw" && path != "sw") {
        throw GraphError(
                GraphError::Kind::InvalidValue, "targets: path must be \"hw\" or \"sw\"");
      }
      st.hw_path = path == "hw";
      st.cell.hw_subscribers = t.at("hw_subscribers").get<std::size_t>();
      st.cell.size_bytes = t.at("size_bytes").get<std::uint64_t>();
      st.speedup = t.at("speedup").get<double>();
      if (st.cell.hw_subscribers < 2) {
        throw GraphError(
                GraphError::Kind::InvalidValue,
                "targets: hw_subscribers must be at least 2 for a gateway comparison");
      }
      if (st.cell.size_bytes == 0 || !(st.speedup > 0.0)) {
        throw GraphError(
                GraphError::Kind::InvalidValue,
                "targets: size_bytes and speedup must be positive");
      }
      out.targets.push_back(std::move(st));
    }
    if (out.targets.empty()) {
      throw GraphError(GraphError::Kind::Schema, "targets: no targets");
    }
    if (doc.contains("initial_platform")) {
      out.initial = platform_from_json(doc["initial_platform"].dump());
    }
    if (doc.contains("free_parameters")) {
      out.options.free_parameters = doc["free_parameters"].get<std::vector<std::string>>();
      PlatformModel probe;
      for (const auto & name : out.options.free_parameters) {
        (void)parameter_slot(probe, name);
      }
    }
    out.options.residual_threshold =
      doc.value("residual_threshold", out.options.residual_threshold);
    out.options.step_tolerance = doc.value("step_tolerance", out.options.step_tolerance);
    out.repetitions = doc.value("repetitions", out.repetitions);
    out.seed = doc.value("seed", out.seed);
  } catch (const json::exception & e) {
    throw GraphError(GraphError::Kind::Schema, std::string("targets: ") + e.what());
  } catch (const CalibrationError & e) {
    throw GraphError(GraphError::Kind::InvalidValue, std::string("targets: ") + e.what());
  }
  if (out.repetitions == 0) {
    throw GraphError(GraphError::Kind::InvalidValue, "targets: repetitions must be positive");
  }
  return out;
}

std::string calibration_report_json(const CalibrationResult & result)
{
  json doc;
  doc["objective"] = result.objective;
  doc["rms_log_error"] = result.rms_log_error;
  doc["within_threshold"] = result.within_threshold;
  doc["evaluations"] = result.evaluations;
  doc["residuals"] = json::array();
  for (const auto & r : result.residuals) {
    doc["residuals"].push_back(
    {
      {"label", r.target.label},
      {"publisher", std::string(to_string(r.target.cell.publisher))},
      {"path", r.target.hw_path ? "hw" : "sw"},
      {"hw_subscribers", r.target.cell.hw_subscribers},
      {"size_bytes", r.target.cell.size_bytes},
      {"target", r.target.speedup},
      {"simulated", r.simulated},
      {"log_error", r.log_error},
      {"relative_error", r.simulated / r.target.speedup - 1.0},
    });
  }
  return doc.dump(2) + "\n";
}

}  // namespace topomap
