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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rategame/metrics.hpp"
#include "rategame/rates.hpp"
#include "rategame/sum_of_ratios.hpp"

namespace rategame {

/// coeffs . R + constant.
struct LinearRateFunction {
  Eigen::VectorXd coeffs;
  double constant = 0.0;
  std::string name;

  double value(const Eigen::VectorXd& rates) const { return coeffs.dot(rates) + constant; }
};

/// metric(R[rate_indices]) - bound; the bound is ignored for objective terms.
struct MetricTerm {
  MetricSpec metric;
  std::vector<int> rate_indices;
  double bound = 0.0;
  std::string name;
};

enum class ProblemMode { kP1, kP2, kP3 };

/// Objective: sum of metric terms + linear function (+ ratio objective).
/// Constraints, each read as "<= 0": convex metric terms, linear functions,
/// sum-of-ratios specs (violation = value - threshold).
struct ProblemSpec {
  std::vector<RateDefinition> rates;
  std::vector<MetricTerm> objective_terms;
  LinearRateFunction linear_objective;
  std::optional<SumOfRatiosSpec> ratio_objective;
  std::vector<MetricTerm> convex_constraints;
  std::vector<LinearRateFunction> linear_constraints;
  std::vector<SumOfRatiosSpec> ratio_constraints;

  /// P3 if any ratio spec is present, else P2 if any constraint, else P1.
  ProblemMode mode() const;
  Eigen::Index num_rates() const { return static_cast<Eigen::Index>(rates.size()); }
  std::size_t num_constraints() const;
  std::vector<std::string> constraint_names() const;
  std::vector<std::string> rate_names() const;
  /// Largest domain floor among the metric terms (1e-3 when there are none).
  double domain_floor() const;

  /// Throws ConfigError on inconsistent shapes, senses or an empty problem.
  void validate() const;
  /// Additionally requires every metric to be convex and no ratio specs.
  void validate_convex(std::string_view algorithm) const;

  /// Rate indices carrying a slack variable, in first-use order.
  std::vector<int> slack_rates() const;
  /// Sense of every slack rate.
  std::vector<Sense> slack_senses() const;

  struct Evaluation {
    double objective = 0.0;
    std::vector<double> violations;
    double max_violation() const;
  };
  /// Metric terms are evaluated with rates clamped into their domain box.
  Evaluation evaluate(const Eigen::VectorXd& rates) const;

  /// Adds `extra` to the rate list (reusing identical definitions) and
  /// returns the index of each.
  std::vector<int> add_rates(const std::vector<RateDefinition>& extra);
};

/// Linear function over `num_rates` coordinates with a single coefficient.
LinearRateFunction unit_rate_function(Eigen::Index num_rates, int index, double coeff,
                                      double constant, std::string name = {});

}  // namespace rategame
