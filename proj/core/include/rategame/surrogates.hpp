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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rategame/data.hpp"
#include "rategame/rates.hpp"

namespace rategame {

/// Upper: max(0, 1 + m) >= 1{m >= 0}. Lower: min(1, m) <= 1{m >= 0}.
enum class BoundSide { kUpper, kLower };

inline BoundSide default_side(Sense s) {
  return s == Sense::kIncreasing ? BoundSide::kUpper : BoundSide::kLower;
}

/// Side that keeps c * surrogate an upper bound on c * rate.
inline BoundSide side_for_coefficient(double c) {
  return c >= 0.0 ? BoundSide::kUpper : BoundSide::kLower;
}

struct SurrogateRate {
  RateDefinition base;
  BoundSide side = BoundSide::kUpper;

  static SurrogateRate from(RateDefinition rate) {
    const auto side = default_side(rate.sense);
    return SurrogateRate{std::move(rate), side};
  }
};

/// Hinge value at signed margin m.
double hinge_value(double margin, BoundSide side);
/// Derivative in m; 0 at the max(0, .) kink and 1 at the min(1, .) kink.
double hinge_slope(double margin, BoundSide side);

/// Mean hinge over the selected examples of `batch` (all examples when empty).
double surrogate_value(const LinearModel& model, const SurrogateRate& rate, const Dataset& ds,
                       std::span<const std::size_t> batch = {});

/// Subgradient with respect to (w, b).
Eigen::VectorXd surrogate_subgrad(const LinearModel& model, const SurrogateRate& rate,
                                  const Dataset& ds, std::span<const std::size_t> batch = {});

struct SurrogateEvaluation {
  /// sum_k coeffs_k * surrogate_k over present rates.
  double value = 0.0;
  /// Gradient of `value` with respect to (w, b).
  Eigen::VectorXd gradient;
  /// Surrogate value of every rate on the sample, using sides[k].
  Eigen::VectorXd surrogates;
  /// Exact rates on the sample.
  RateEstimate rates;
};

/// Surrogates of all rates in `ev` for the plain linear model `params` = (w, b)
/// on `batch` (the whole dataset when empty). Rates missing from the sample
/// contribute nothing.
SurrogateEvaluation weighted_surrogate(const RateEvaluator& ev, const Eigen::VectorXd& params,
                                       const Eigen::VectorXd& coeffs,
                                       std::span<const BoundSide> sides,
                                       std::span<const std::size_t> batch = {});

std::vector<BoundSide> sides_for_coefficients(const Eigen::VectorXd& coeffs);

}  // namespace rategame
