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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rategame/data.hpp"

namespace rategame {

/// What a prediction must equal for an example to count toward a rate.
enum class Target {
  kAgreeWithLabel,
  kDisagreeWithLabel,
  kPredictPositive,
  kPredictNegative,
};

/// Monotonicity of the enclosing metric in a rate.
enum class Sense { kIncreasing, kDecreasing };

/// +1 for increasing, -1 for decreasing.
inline double sense_sign(Sense s) { return s == Sense::kIncreasing ? 1.0 : -1.0; }

/// Subpopulation filter. Unset fields match everything.
struct Selector {
  std::optional<int> group;
  std::optional<int> label;
  /// Filters on whether the dataset's reference model was correct.
  std::optional<bool> reference_correct;

  bool matches(const Dataset& ds, std::size_t i) const;
  std::string describe() const;
};

struct RateDefinition {
  Selector selector;
  Target target = Target::kAgreeWithLabel;
  Sense sense = Sense::kIncreasing;
  std::string name;

  /// Overall accuracy.
  static RateDefinition accuracy(Sense sense = Sense::kDecreasing);
  /// P(y_hat = +1 | group), or overall when group is unset.
  static RateDefinition positive_prediction(std::optional<int> group, Sense sense);
  /// P(y_hat = -1 | group).
  static RateDefinition negative_prediction(std::optional<int> group, Sense sense);
  static RateDefinition tpr(std::optional<int> group, Sense sense);
  static RateDefinition tnr(std::optional<int> group, Sense sense);
  static RateDefinition fpr(std::optional<int> group, Sense sense);
  static RateDefinition fnr(std::optional<int> group, Sense sense);
};

/// Affine correction applied to the raw linear score of one group.
struct GroupAdjustment {
  double scale = 1.0;
  double offset = 0.0;
};

/// f(x) = scale_g * (w.x + b) + offset_g. The group adjustments are identity
/// for models produced by gradient training.
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(Eigen::VectorXd weights, double bias, double norm_bound,
              std::vector<GroupAdjustment> adjustments = {});

  /// params = (w, b), of length d + 1.
  static LinearModel from_params(const Eigen::VectorXd& params, double norm_bound);
  Eigen::VectorXd params() const;

  const Eigen::VectorXd& weights() const { return weights_; }
  double bias() const { return bias_; }
  double norm_bound() const { return norm_bound_; }
  int dim() const { return static_cast<int>(weights_.size()); }
  const std::vector<GroupAdjustment>& adjustments() const { return adjustments_; }
  GroupAdjustment adjustment(int group) const;

  double score(const Eigen::VectorXd& x, int group) const;
  Eigen::VectorXd scores(const Dataset& ds) const;

 private:
  Eigen::VectorXd weights_;
  double bias_ = 0.0;
  double norm_bound_ = 1.0;
  std::vector<GroupAdjustment> adjustments_;
};

/// sign(0) is +1.
inline int predict_sign(double score) { return score >= 0.0 ? 1 : -1; }

struct WeightedModel {
  LinearModel model;
  double weight = 1.0;
};

/// Finite mixture of linear models.
struct StochasticModel {
  std::vector<WeightedModel> atoms;

  /// Throws ConfigError unless weights are non-negative and sum to 1 within 1e-9.
  void validate() const;
  static StochasticModel point_mass(LinearModel model);
};

double evaluate_rate(const LinearModel& model, const RateDefinition& rate, const Dataset& ds);
Eigen::VectorXd evaluate_rate_vector(const LinearModel& model,
                                     std::span<const RateDefinition> rates, const Dataset& ds);
Eigen::VectorXd stochastic_rates(const StochasticModel& sm, std::span<const RateDefinition> rates,
                                 const Dataset& ds);

/// Rates on a sample; present[k] is false when the sample misses the selector of rate k.
struct RateEstimate {
  Eigen::VectorXd values;
  std::vector<bool> present;
};

RateEstimate minibatch_rate_estimate(const LinearModel& model,
                                     std::span<const RateDefinition> rates, const Dataset& ds,
                                     std::span<const std::size_t> batch);

/// Precomputed membership lists for repeated rate evaluation on one dataset.
/// Keeps a reference to the dataset, which must outlive the evaluator.
class RateEvaluator {
 public:
  RateEvaluator(const Dataset& ds, std::vector<RateDefinition> rates);

  std::size_t num_rates() const { return rates_.size(); }
  const std::vector<RateDefinition>& rates() const { return rates_; }
  const Dataset& dataset() const { return *ds_; }
  /// Example indices selected by rate k.
  const std::vector<std::size_t>& members(std::size_t k) const { return members_[k]; }
  /// Required prediction sign for member j of rate k.
  const std::vector<signed char>& targets(std::size_t k) const { return targets_[k]; }
  /// For example i, the (rate, member position) pairs it belongs to.
  const std::vector<std::pair<std::size_t, std::size_t>>& memberships(std::size_t i) const {
    return memberships_[i];
  }

  Eigen::VectorXd rates_from_scores(const Eigen::VectorXd& scores) const;
  /// scores(r) is the score of example batch[r]; repeated indices count repeatedly.
  RateEstimate rates_from_scores(const Eigen::VectorXd& scores,
                                 std::span<const std::size_t> batch) const;
  Eigen::VectorXd evaluate(const LinearModel& model) const;
  Eigen::VectorXd evaluate(const StochasticModel& model) const;

 private:
  const Dataset* ds_;
  std::vector<RateDefinition> rates_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<std::vector<signed char>> targets_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> memberships_;
};

/// Sign the prediction must take for example i to count toward `rate`.
int target_sign(const RateDefinition& rate, int label);

}  // namespace rategame
