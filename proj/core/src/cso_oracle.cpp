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

#include "rategame/cso_oracle.hpp"

#include <cmath>
#include <utility>

#include "rategame/errors.hpp"

namespace rategame {

EnumerationOracle::EnumerationOracle(std::vector<LinearModel> candidates, const RateEvaluator& ev)
    : candidates_(std::move(candidates)) {
  if (candidates_.empty()) throw ConfigError("enumeration oracle needs at least one candidate");
  rates_.resize(static_cast<Eigen::Index>(candidates_.size()),
                static_cast<Eigen::Index>(ev.num_rates()));
  for (std::size_t t = 0; t < candidates_.size(); ++t) {
    rates_.row(static_cast<Eigen::Index>(t)) = ev.evaluate(candidates_[t]).transpose();
  }
}

Eigen::VectorXd EnumerationOracle::objective_values(const Eigen::VectorXd& rate_coeffs) const {
  if (rate_coeffs.size() != rates_.cols()) throw ConfigError("coefficient count mismatch");
  return rates_ * rate_coeffs;
}

std::size_t EnumerationOracle::solve_index(const Eigen::VectorXd& rate_coeffs) const {
  const Eigen::VectorXd values = objective_values(rate_coeffs);
  Eigen::Index best = 0;
  for (Eigen::Index t = 1; t < values.size(); ++t) {
    if (values(t) < values(best)) best = t;
  }
  return static_cast<std::size_t>(best);
}

LinearModel EnumerationOracle::solve(const Eigen::VectorXd& rate_coeffs) const {
  return candidates_[solve_index(rate_coeffs)];
}

PluginOracle::PluginOracle(const RateEvaluator& ev, const FitOptions& fit)
    : ev_(&ev), num_groups_(ev.dataset().num_groups()) {
  check_rates();
  const auto params = fit_logistic(ev.dataset(), fit);
  eta_ = LinearModel::from_params(params, std::max(1.0, params.norm()));
}

PluginOracle::PluginOracle(const RateEvaluator& ev, LinearModel eta_model)
    : ev_(&ev), eta_(std::move(eta_model)), num_groups_(ev.dataset().num_groups()) {
  check_rates();
  require_both_classes(ev.dataset());
}

void PluginOracle::check_rates() const {
  for (const auto& r : ev_->rates()) {
    if (r.selector.reference_correct) {
      throw ConfigError("plug-in oracle cannot handle reference-model selectors (rate '" +
                        r.name + "')");
    }
  }
}

std::vector<PluginOracle::GroupCosts> PluginOracle::group_costs(
    const Eigen::VectorXd& rate_coeffs) const {
  const auto& rates = ev_->rates();
  if (rate_coeffs.size() != static_cast<Eigen::Index>(rates.size())) {
    throw ConfigError("coefficient count mismatch");
  }
  std::vector<GroupCosts> costs(static_cast<std::size_t>(num_groups_));
  for (std::size_t k = 0; k < rates.size(); ++k) {
    const double c = rate_coeffs(static_cast<Eigen::Index>(k));
    if (c == 0.0) continue;
    const double w = c / static_cast<double>(ev_->members(k).size());
    const auto& sel = rates[k].selector;
    for (int g = 0; g < num_groups_; ++g) {
      if (sel.group && *sel.group != g) continue;
      for (int y : {1, -1}) {
        if (sel.label && *sel.label != y) continue;
        // cost(+1) - cost(-1) for an example of label y in group g.
        const double diff = target_sign(rates[k], y) == 1 ? w : -w;
        auto& gc = costs[static_cast<std::size_t>(g)];
        (y == 1 ? gc.positive_label : gc.negative_label) += diff;
      }
    }
  }
  return costs;
}

LinearModel PluginOracle::solve(const Eigen::VectorXd& rate_coeffs) const {
  const auto costs = group_costs(rate_coeffs);
  std::vector<GroupAdjustment> adj(costs.size());
  for (std::size_t g = 0; g < costs.size(); ++g) {
    // Predict +1 iff delta(eta) = B + eta (A - B) <= 0.
    const double a = costs[g].positive_label;
    const double b = costs[g].negative_label;
    const double slope = a - b;
    if (slope == 0.0) {
      adj[g] = {0.0, b <= 0.0 ? 1.0 : -1.0};
      continue;
    }
    const double tau = -b / slope;
    if (slope < 0.0) {
      if (tau <= 0.0) {
        adj[g] = {0.0, 1.0};
      } else if (tau >= 1.0) {
        adj[g] = {0.0, -1.0};
      } else {
        adj[g] = {1.0, -std::log(tau / (1.0 - tau))};
      }
    } else {
      if (tau >= 1.0) {
        adj[g] = {0.0, 1.0};
      } else if (tau <= 0.0) {
        adj[g] = {0.0, -1.0};
      } else {
        adj[g] = {-1.0, std::log(tau / (1.0 - tau))};
      }
    }
  }
  return LinearModel(eta_.weights(), eta_.bias(), eta_.norm_bound(), std::move(adj));
}

}  // namespace rategame
