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

#include <filesystem>
#include <string>
#include <vector>

#include "rategame/config.hpp"
#include "rategame/data.hpp"
#include "rategame/problem.hpp"
#include "rategame/report.hpp"
#include "rategame/shrinking.hpp"
#include "rategame/trace.hpp"

namespace rategame {

/// Reads (or draws) the configured dataset. Relative paths resolve against `data_dir`.
Dataset load_experiment_dataset(const DatasetConfig& cfg, const std::filesystem::path& data_dir);

/// Problem and test-time evaluation for a task on one set of splits.
struct TaskSetup {
  TaskKind kind = TaskKind::kKldParity;
  ProblemSpec problem;
  /// Reference hinge-loss classifier, step size chosen on validation.
  LinearModel unc_error;
  double unc_step = 0.0;
  /// Positive proportion of the training split.
  double prior = 0.0;
  /// fmeasure-parity groups: the constraint is F(other) - F(protected) <= delta.
  int protected_group = -1;
  int other_group = -1;
  double delta = 0.0;
  std::string metric_name;
  std::string constraint_name;

  /// kld-parity: sum over groups of KLD(prior, positive rate). fmeasure-parity:
  /// overall F-measure. custom: the problem objective.
  double metric(const StochasticModel& model, const Dataset& ds) const;
  /// kld-parity: error ratio against unc_error. fmeasure-parity:
  /// F(other) - F(protected) - delta. custom: max violation.
  double constraint(const StochasticModel& model, const Dataset& ds) const;
};

TaskSetup build_task(const ExperimentConfig& cfg, const DatasetSplits& splits);

/// Custom task problem from metric names over overall rates.
ProblemSpec make_custom_problem(const CustomTaskConfig& cfg, const Dataset& train);

struct SweepPoint {
  double eta_theta = 0.0;
  double eta_lambda = 0.0;
  std::string trace_path;
  double runtime_seconds = 0.0;
  ShrinkOutcome stochastic;
  double stochastic_objective = 0.0;
  double stochastic_violation = 0.0;
  BestIterate deterministic;
  double deterministic_objective = 0.0;
  double deterministic_violation = 0.0;
  /// SPADE+ only.
  std::optional<LinearModel> average;
};

struct ExperimentResult {
  Report report;
  std::vector<SweepPoint> points;
  std::size_t selected_stochastic = 0;
  std::size_t selected_deterministic = 0;
};

/// Loads and splits the data, builds the task, runs the configured optimizer
/// for every sweep point (or once with the optimizer's own step sizes when
/// `sweep` is false), selects on validation and reports test metrics.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& data_dir,
                                bool sweep = true);

/// UncError plus PostShift (kld-parity) or UncF1 (fmeasure-parity) on test.
Report run_baselines(const ExperimentConfig& cfg, const std::filesystem::path& data_dir);

/// Rebuilds the model a report row refers to.
StochasticModel model_from_selection(const Trace& trace, const std::string& selection);

}  // namespace rategame
