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

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rategame/linear_fit.hpp"
#include "rategame/rates.hpp"

namespace rategame {

/// Cost-sensitive oracle: returns a model approximately minimizing
/// sum_k coeffs_k R_k(theta) on the training sample of its evaluator.
class CsoOracle {
 public:
  virtual ~CsoOracle() = default;
  virtual LinearModel solve(const Eigen::VectorXd& rate_coeffs) const = 0;
  /// Certified additive suboptimality, if known.
  virtual std::optional<double> rho() const = 0;
};

/// Exact minimizer over a fixed candidate list. Ties go to the lowest index.
class EnumerationOracle : public CsoOracle {
 public:
  EnumerationOracle(std::vector<LinearModel> candidates, const RateEvaluator& ev);

  LinearModel solve(const Eigen::VectorXd& rate_coeffs) const override;
  std::optional<double> rho() const override { return 0.0; }

  std::size_t solve_index(const Eigen::VectorXd& rate_coeffs) const;
  /// sum_k coeffs_k R_k for every candidate.
  Eigen::VectorXd objective_values(const Eigen::VectorXd& rate_coeffs) const;
  /// Row t holds the rates of candidate t.
  const Eigen::MatrixXd& candidate_rates() const { return rates_; }
  const std::vector<LinearModel>& candidates() const { return candidates_; }

 private:
  std::vector<LinearModel> candidates_;
  Eigen::MatrixXd rates_;
};

/// Plug-in oracle over a logistic class-probability model eta(x). For each
/// group the expected cost difference between predicting +1 and -1 is linear
/// in eta, so the Bayes rule is a per-group threshold on eta, returned as a
/// linear model with per-group score adjustments.
class PluginOracle : public CsoOracle {
 public:
  PluginOracle(const RateEvaluator& ev, const FitOptions& fit = {2500, 0.1, UpdateRule::kGradientDescent});
  /// Uses the given eta model (score = logit eta) instead of fitting one.
  PluginOracle(const RateEvaluator& ev, LinearModel eta_model);

  LinearModel solve(const Eigen::VectorXd& rate_coeffs) const override;
  std::optional<double> rho() const override { return std::nullopt; }

  const LinearModel& eta_model() const { return eta_; }

  /// Cost difference cost(+1) - cost(-1) = eta * slope_at_one + (1 - eta) * slope_at_zero.
  struct GroupCosts {
    double positive_label = 0.0;
    double negative_label = 0.0;
  };
  std::vector<GroupCosts> group_costs(const Eigen::VectorXd& rate_coeffs) const;

 private:
  void check_rates() const;

  const RateEvaluator* ev_;
  LinearModel eta_;
  int num_groups_ = 0;
};

}  // namespace rategame
