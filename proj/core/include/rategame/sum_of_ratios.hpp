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
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rategame/data.hpp"
#include "rategame/rates.hpp"

namespace rategame {

/// sign * (numerator . R) / (denominator . R).
struct RatioTerm {
  Eigen::VectorXd numerator;
  Eigen::VectorXd denominator;
  int sign = 1;

  double value(const Eigen::VectorXd& rates) const;
};

/// sum_m s_m alpha_m.R / beta_m.R <= threshold, with every numerator and
/// denominator expected in [lower_bound, upper_bound].
struct SumOfRatiosSpec {
  std::vector<RatioTerm> terms;
  double threshold = 0.0;
  double lower_bound = 1e-3;
  double upper_bound = 1.0;

  Eigen::Index num_rates() const;
  void validate() const;
  /// Exact left-hand side; a ratio with a zero denominator counts as 0.
  double value(const Eigen::VectorXd& rates) const;
  double violation(const Eigen::VectorXd& rates) const { return value(rates) - threshold; }
  /// Left-hand side with numerators and denominators clipped into the bounds.
  double value_clipped(const Eigen::VectorXd& rates) const;
  /// Re-indexes rate coordinates: coordinate k moves to position rate_map[k] of a
  /// vector with `total` rates.
  SumOfRatiosSpec embed(std::span<const int> rate_map, Eigen::Index total) const;
};

enum class ParityKind { kFMeasureParity, kPredictiveParity, kChurnDifference };

ParityKind parse_parity_kind(std::string_view name);

struct CompiledConstraint {
  SumOfRatiosSpec spec;
  std::vector<RateDefinition> rates;
  /// Human-readable notes on rewrites applied during compilation.
  std::vector<std::string> transforms;
};

/// Encodes ratio_A - ratio_B <= delta as a sum of signed ratio terms over
/// per-group rates. Priors (group positive proportions, or reference-model
/// error fractions for churn) come from `ds`. When the B ratio has a
/// complement with non-negative coefficients it is rewritten as
/// (1 - ratio_B) - 1, so both terms carry sign +1 and the threshold becomes
/// 1 + delta.
///
/// fmeasure-parity rates: TPR_A, FPR_A, FNR_A, TPR_B, FPR_B, FNR_B.
/// predictive-parity (precision) rates: TPR_A, FPR_A, TPR_B, FPR_B.
/// churn-difference rates: wins_A, losses_A, wins_B, losses_B.
CompiledConstraint compile_parity_constraint(ParityKind kind, int group_a, int group_b,
                                             double delta, const Dataset& ds);

/// F-measure 2TP / (2TP + FP + FN) of a slice with positive proportion p, in
/// terms of the slice's TPR, FPR and FNR coordinates. With `complement`,
/// returns 1 - F = (FP + FN) / (2TP + FP + FN) instead.
RatioTerm fmeasure_ratio(double p, int tpr, int fpr, int fnr, Eigen::Index num_rates,
                         bool complement);

/// Rate definitions (TPR, FPR, FNR) for a slice; group unset means overall.
std::vector<RateDefinition> fmeasure_rates(std::optional<int> group);

}  // namespace rategame
