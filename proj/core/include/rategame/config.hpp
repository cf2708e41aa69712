// Copyright 2026 The rategame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rategame/data.hpp"
#include "rategame/linear_fit.hpp"
#include "rategame/optimizers.hpp"

namespace rategame {

enum class TaskKind { kKldParity, kFMeasureParity, kCustom };
TaskKind parse_task_kind(std::string_view name);
std::string_view task_kind_name(TaskKind kind);

/// Where the examples come from. A path of the form "synthetic:<seed>"
/// draws the Gaussian two-group data instead of reading a file.
struct DatasetConfig {
  std::string name;
  std::string path;
  TabularSchema schema;
  std::size_t synthetic_size = 2000;
};

/// Metric-based problem for the custom task. Metric names: gmean, hmean,
/// qmean, kld or error.
struct CustomTaskConfig {
  std::string objective = "error";
  struct Constraint {
    std::string metric;
    double bound = 0.0;
  };
  std::vector<Constraint> constraints;
};

struct SweepConfig {
  std::vector<double> eta_theta = {0.001, 0.01, 0.1, 1.0};
  std::vector<double> eta_lambda = {0.001, 0.01, 0.1, 1.0};
  /// Concurrent sweep points; 0 uses the hardware concurrency.
  int jobs = 0;
};

struct BaselineConfig {
  FitOptions fit;
  std::vector<double> step_grid = {0.001, 0.01, 0.1, 1.0};
};

struct ExperimentConfig {
  TaskKind task = TaskKind::kKldParity;
  DatasetConfig dataset;
  Algorithm algorithm = Algorithm::kSurrogate;
  OgdConfig optimizer;
  SweepConfig sweep;
  BaselineConfig baselines;
  CustomTaskConfig custom;
  /// Error budget multiplier for kld-parity.
  double error_slack = 1.1;
  /// Allowed F-measure gap for fmeasure-parity.
  double delta = 0.01;
  /// Validation max-violation below which the objective decides.
  double selection_tolerance = 0.02;
  /// Dataset the shrinking LP is solved on: "train" or "validation".
  std::string shrink_on = "train";
  std::uint64_t seed = 0;
  std::string output_dir = "runs";

  /// Throws ConfigError on unknown names or incompatible task/algorithm pairs.
  void validate() const;
};

/// Applies "section.key=value" (a leading "--" is accepted). The value is
/// parsed as JSON when possible and as a string otherwise.
void apply_override(nlohmann::json& config, std::string_view assignment);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Reads a JSON config file and applies the overrides in order.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

/// Directory for relative dataset paths: RATEGAME_DATA_DIR if set, else "data".
std::filesystem::path default_data_dir();

}  // namespace rategame
