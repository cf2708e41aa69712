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
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "rategame/cso_oracle.hpp"
#include "rategame/data.hpp"
#include "rategame/linear_fit.hpp"
#include "rategame/metrics.hpp"
#include "rategame/problem.hpp"
#include "rategame/trace.hpp"

namespace rategame {

enum class Algorithm { kOracle, kSurrogate, kSpadePlus, kSlackRatios, kBiconvex };

/// Accepts "alg1", "alg2", "spade+", "alg3", "alg4".
Algorithm parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm a);

struct OgdConfig {
  int iterations = 1000;
  /// Unset step sizes and radius are filled in by suggest_step_sizes.
  std::optional<double> eta_theta;
  std::optional<double> eta_lambda;
  std::optional<double> eta_aux;
  std::optional<double> kappa;
  /// Lower bound on the multipliers that divide or weight a convex term.
  double lambda_floor = 1e-3;
  /// 0 means full batch.
  std::size_t batch_size = 0;
  int snapshot_every = 10;
  std::uint64_t seed = 0;
  /// Radius of the l2 ball on (w, b).
  double norm_bound = 10.0;
  double gradient_clip = 1e6;
  /// Exponent in the default radius T^omega for constrained problems.
  double omega = 0.25;
  std::optional<Eigen::VectorXd> theta_init;
  /// Update rule of the model and auxiliary players. Multipliers always use
  /// projected gradient ascent.
  UpdateRule rule = UpdateRule::kGradientDescent;
  BestResponseOptions best_response;

  /// Throws ConfigError on non-positive counts or step sizes.
  void validate() const;
};

struct StepSizes {
  double eta_theta = 0.0;
  double eta_lambda = 0.0;
  double eta_aux = 0.0;
  double kappa = 0.0;
};

/// Radius: the summed Lipschitz constants for an unconstrained metric
/// objective, T^omega otherwise. Step sizes: kappa / (B_lambda sqrt(2T)) and
/// B_theta / (B_grad sqrt(T)), with gradient bounds estimated from 50 random
/// multiplier draws at the initial model. Explicit config values win.
StepSizes suggest_step_sizes(const ProblemSpec& p, Algorithm algorithm, const OgdConfig& cfg,
                             const Dataset& train);

/// Oracle-based optimizer over a convex metric problem.
Trace run_oracle_game(const ProblemSpec& p, const CsoOracle& oracle, const OgdConfig& cfg,
                      const Dataset& train);

/// Surrogate-based optimizer: hinge surrogates for the model player, true
/// rates for the multiplier player.
Trace run_surrogate_game(const ProblemSpec& p, const OgdConfig& cfg, const Dataset& train);

struct SpadeResult {
  /// Average of the model iterates.
  LinearModel average;
  Trace trace;
};

/// Like run_surrogate_game but the multiplier gradient uses surrogate rates.
SpadeResult run_spade_plus(const ProblemSpec& p, const OgdConfig& cfg, const Dataset& train);

/// Slack-ratios optimizer for sum-of-ratios problems.
Trace run_slack_ratios(const ProblemSpec& p, const OgdConfig& cfg, const Dataset& train);

/// Biconvex optimizer for sum-of-ratios problems.
Trace run_biconvex(const ProblemSpec& p, const OgdConfig& cfg, const Dataset& train);

/// Dispatches to the gradient-based optimizers (not the oracle game).
Trace run_algorithm(Algorithm algorithm, const ProblemSpec& p, const OgdConfig& cfg,
                    const Dataset& train);

}  // namespace rategame
