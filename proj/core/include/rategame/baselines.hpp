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

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rategame/data.hpp"
#include "rategame/linear_fit.hpp"
#include "rategame/rates.hpp"

namespace rategame {

/// Error rate and F-measure of deterministic or stochastic models.
double error_rate(const LinearModel& model, const Dataset& ds);
double error_rate(const StochasticModel& model, const Dataset& ds);
double f1_score(const LinearModel& model, const Dataset& ds);
double f1_score(const StochasticModel& model, const Dataset& ds);
/// 2TP / (2TP + FP + FN) for predictions score >= 0; 0 when undefined.
double f1_from_scores(const Eigen::VectorXd& scores, std::span<const int> labels);

/// Hinge-loss linear classifier trained from zero for options.steps steps.
LinearModel baseline_unc_error(const Dataset& train, const FitOptions& options = {});

/// Trains baseline_unc_error for every step size in `grid` and keeps the one
/// with the lowest validation error (earliest on ties).
struct UncErrorSelection {
  LinearModel model;
  double step_size = 0.0;
  double validation_error = 0.0;
};
UncErrorSelection select_unc_error(const Dataset& train, const Dataset& validation,
                                   std::span<const double> grid, const FitOptions& options = {});

struct ThresholdShift {
  double shift = 0.0;
  double f1 = 0.0;
};

/// Best additive score shift for F1 among every cut of the sorted scores,
/// the zero shift included. Strict improvement is required to leave zero.
ThresholdShift best_f1_shift(const Eigen::VectorXd& scores, std::span<const int> labels);

/// `base` with its bias moved by the F1-maximizing shift on `train`.
LinearModel baseline_unc_f1(const Dataset& train, const LinearModel& base);

/// Logistic model with per-group thresholds randomized so that each group's
/// positive prediction rate equals the overall positive proportion of
/// `train`. The result mixes at most G + 1 deterministic models.
StochasticModel baseline_post_shift(const Dataset& train, const FitOptions& options = {});
/// Same, given the score model.
StochasticModel post_shift_thresholds(const Dataset& train, const LinearModel& scorer, double target);

}  // namespace rategame
