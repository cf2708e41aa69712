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

#include <optional>

#include "rategame/data.hpp"
#include "rategame/metrics.hpp"
#include "rategame/problem.hpp"

namespace rategame {

/// Objective: sum over groups of KLD(p, (ppr_G, 1 - ppr_G)), with p the
/// positive proportion of `train`. With `error_bound`, adds the linear
/// constraint error <= error_bound.
ProblemSpec make_kld_parity_problem(const Dataset& train, std::optional<double> error_bound,
                                    const MetricParams& params = {});

/// Error rate as a linear function of the accuracy rate at `accuracy_index`.
LinearRateFunction error_rate_function(Eigen::Index num_rates, int accuracy_index,
                                       double offset = 0.0, std::string name = "error");

/// Objective: 1 - F-measure on all of `train`. Constraint:
/// F(group_a) - F(group_b) <= delta.
ProblemSpec make_fmeasure_parity_problem(const Dataset& train, int group_a, int group_b,
                                         double delta);

/// Rate indices of the overall (TPR, FPR, FNR) used by the F-measure objective.
struct FMeasureIndices {
  int tpr = 0;
  int fpr = 1;
  int fnr = 2;
};
FMeasureIndices fmeasure_indices(const ProblemSpec& p);

/// F-measure of a rate vector's overall slice, with positive proportion p.
double fmeasure_from_rates(const Eigen::VectorXd& rates, const FMeasureIndices& idx, double p);

}  // namespace rategame
