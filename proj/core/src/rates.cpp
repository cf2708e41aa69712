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

#include "rategame/rates.hpp"

#include <cmath>
#include <utility>

#include "rategame/errors.hpp"

namespace rategame {

bool Selector::matches(const Dataset& ds, std::size_t i) const {
  if (group && ds.groups()[i] != *group) return false;
  if (label && ds.labels()[i] != *label) return false;
  if (reference_correct) {
    if (ds.reference().empty()) {
      throw EvaluationError("selector " + describe() + " needs reference predictions");
    }
    const bool correct = ds.reference()[i] == ds.labels()[i];
    if (correct != *reference_correct) return false;
  }
  return true;
}

std::string Selector::describe() const {
  std::string s = "{group=";
  s += group ? std::to_string(*group) : "any";
  s += ", label=";
  s += label ? (*label > 0 ? "+1" : "-1") : "any";
  if (reference_correct) s += *reference_correct ? ", reference=correct" : ", reference=wrong";
  s += "}";
  return s;
}

namespace {

std::string group_suffix(std::optional<int> group) {
  return group ? "[g=" + std::to_string(*group) + "]" : "";
}

}  // namespace

RateDefinition RateDefinition::accuracy(Sense sense) {
  return RateDefinition{{}, Target::kAgreeWithLabel, sense, "accuracy"};
}

RateDefinition RateDefinition::positive_prediction(std::optional<int> group, Sense sense) {
  return RateDefinition{{group, std::nullopt, std::nullopt}, Target::kPredictPositive, sense,
                        "ppr" + group_suffix(group)};
}

RateDefinition RateDefinition::negative_prediction(std::optional<int> group, Sense sense) {
  return RateDefinition{{group, std::nullopt, std::nullopt}, Target::kPredictNegative, sense,
                        "npr" + group_suffix(group)};
}

RateDefinition RateDefinition::tpr(std::optional<int> group, Sense sense) {
  return RateDefinition{{group, 1, std::nullopt}, Target::kPredictPositive, sense,
                        "tpr" + group_suffix(group)};
}

RateDefinition RateDefinition::tnr(std::optional<int> group, Sense sense) {
  return RateDefinition{{group, -1, std::nullopt}, Target::kPredictNegative, sense,
                        "tnr" + group_suffix(group)};
}

RateDefinition RateDefinition::fpr(std::optional<int> group, Sense sense) {
  return RateDefinition{{group, -1, std::nullopt}, Target::kPredictPositive, sense,
                        "fpr" + group_suffix(group)};
}

RateDefinition RateDefinition::fnr(std::optional<int> group, Sense sense) {
  return RateDefinition{{group, 1, std::nullopt}, Target::kPredictNegative, sense,
                        "fnr" + group_suffix(group)};
}

LinearModel::LinearModel(Eigen::VectorXd weights, double bias, double norm_bound,
                         std::vector<GroupAdjustment> adjustments)
    : weights_(std::move(weights)),
      bias_(bias),
      norm_bound_(norm_bound),
      adjustments_(std::move(adjustments)) {
  if (!(norm_bound_ > 0.0)) throw ConfigError("norm bound must be positive");
}

LinearModel LinearModel::from_params(const Eigen::VectorXd& params, double norm_bound) {
  if (params.size() < 1) throw ConfigError("parameter vector must include a bias");
  const auto d = params.size() - 1;
  return LinearModel(params.head(d), params(d), norm_bound);
}

Eigen::VectorXd LinearModel::params() const {
  Eigen::VectorXd p(weights_.size() + 1);
  p.head(weights_.size()) = weights_;
  p(weights_.size()) = bias_;
  return p;
}

GroupAdjustment LinearModel::adjustment(int group) const {
  if (group >= 0 && static_cast<std::size_t>(group) < adjustments_.size()) {
    return adjustments_[static_cast<std::size_t>(group)];
  }
  return {};
}

double LinearModel::score(const Eigen::VectorXd& x, int group) const {
  const auto adj = adjustment(group);
  return adj.scale * (weights_.dot(x) + bias_) + adj.offset;
}

Eigen::VectorXd LinearModel::scores(const Dataset& ds) const {
  if (ds.dim() != weights_.size()) {
    throw ConfigError("model dimension " + std::to_string(weights_.size()) +
                      " does not match dataset dimension " + std::to_string(ds.dim()));
  }
  Eigen::VectorXd s = ds.features() * weights_;
  s.array() += bias_;
  if (!adjustments_.empty()) {
    const auto groups = ds.groups();
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const auto adj = adjustment(groups[static_cast<std::size_t>(i)]);
      s(i) = adj.scale * s(i) + adj.offset;
    }
  }
  return s;
}

void StochasticModel::validate() const {
  if (atoms.empty()) throw ConfigError("stochastic model has no atoms");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (!(a.weight >= 0.0)) throw ConfigError("stochastic model weight must be non-negative");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("stochastic model weights sum to " + std::to_string(total) + ", not 1");
  }
}

StochasticModel StochasticModel::point_mass(LinearModel model) {
  return StochasticModel{{WeightedModel{std::move(model), 1.0}}};
}

int target_sign(const RateDefinition& rate, int label) {
  switch (rate.target) {
    case Target::kAgreeWithLabel:
      return label;
    case Target::kDisagreeWithLabel:
      return -label;
    case Target::kPredictPositive:
      return 1;
    case Target::kPredictNegative:
      return -1;
  }
  return 1;
}

RateEvaluator::RateEvaluator(const Dataset& ds, std::vector<RateDefinition> rates)
    : ds_(&ds), rates_(std::move(rates)) {
  members_.resize(rates_.size());
  targets_.resize(rates_.size());
  memberships_.resize(ds.size());
  const auto labels = ds.labels();
  for (std::size_t k = 0; k < rates_.size(); ++k) {
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (!rates_[k].selector.matches(ds, i)) continue;
      memberships_[i].emplace_back(k, members_[k].size());
      members_[k].push_back(i);
      targets_[k].push_back(static_cast<signed char>(target_sign(rates_[k], labels[i])));
    }
    if (members_[k].empty()) {
      throw EvaluationError("rate '" + rates_[k].name + "' selector " +
                            rates_[k].selector.describe() + " matches no example in '" +
                            ds.name() + "'");
    }
  }
}

Eigen::VectorXd RateEvaluator::rates_from_scores(const Eigen::VectorXd& scores) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rates_.size()));
  for (std::size_t k = 0; k < rates_.size(); ++k) {
    const auto& m = members_[k];
    const auto& t = targets_[k];
    std::size_t hits = 0;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (predict_sign(scores(static_cast<Eigen::Index>(m[j]))) == t[j]) ++hits;
    }
    out(static_cast<Eigen::Index>(k)) = static_cast<double>(hits) / static_cast<double>(m.size());
  }
  return out;
}

RateEstimate RateEvaluator::rates_from_scores(const Eigen::VectorXd& scores,
                                              std::span<const std::size_t> batch) const {
  const auto K = rates_.size();
  std::vector<std::size_t> count(K, 0);
  std::vector<std::size_t> hits(K, 0);
  for (std::size_t r = 0; r < batch.size(); ++r) {
    const auto i = batch[r];
    const int pred = predict_sign(scores(static_cast<Eigen::Index>(r)));
    for (const auto& [k, pos] : memberships_[i]) {
      ++count[k];
      if (pred == targets_[k][pos]) ++hits[k];
    }
  }
  RateEstimate est{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K)), std::vector<bool>(K)};
  for (std::size_t k = 0; k < K; ++k) {
    est.present[k] = count[k] > 0;
    if (count[k] > 0) {
      est.values(static_cast<Eigen::Index>(k)) =
          static_cast<double>(hits[k]) / static_cast<double>(count[k]);
    }
  }
  return est;
}

Eigen::VectorXd RateEvaluator::evaluate(const LinearModel& model) const {
  return rates_from_scores(model.scores(*ds_));
}

Eigen::VectorXd RateEvaluator::evaluate(const StochasticModel& model) const {
  model.validate();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rates_.size()));
  for (const auto& atom : model.atoms) {
    if (atom.weight == 0.0) continue;
    out += atom.weight * evaluate(atom.model);
  }
  return out;
}

double evaluate_rate(const LinearModel& model, const RateDefinition& rate, const Dataset& ds) {
  return RateEvaluator(ds, {rate}).evaluate(model)(0);
}

Eigen::VectorXd evaluate_rate_vector(const LinearModel& model,
                                     std::span<const RateDefinition> rates, const Dataset& ds) {
  return RateEvaluator(ds, {rates.begin(), rates.end()}).evaluate(model);
}

Eigen::VectorXd stochastic_rates(const StochasticModel& sm, std::span<const RateDefinition> rates,
                                 const Dataset& ds) {
  return RateEvaluator(ds, {rates.begin(), rates.end()}).evaluate(sm);
}

RateEstimate minibatch_rate_estimate(const LinearModel& model,
                                     std::span<const RateDefinition> rates, const Dataset& ds,
                                     std::span<const std::size_t> batch) {
  Eigen::VectorXd scores(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t r = 0; r < batch.size(); ++r) {
    scores(static_cast<Eigen::Index>(r)) =
        model.score(ds.features().row(static_cast<Eigen::Index>(batch[r])).transpose(),
                    ds.groups()[batch[r]]);
  }
  const RateEvaluator ev(ds, {rates.begin(), rates.end()});
  return ev.rates_from_scores(scores, batch);
}

}  // namespace rategame
