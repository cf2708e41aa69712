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


#include "rategame/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "rategame/errors.hpp"

namespace rategame {

namespace {

LinearModel model_from(const Eigen::VectorXd& params) {
  return LinearModel::from_params(params, std::max(1.0, params.norm()));
}

const std::vector<RateDefinition>& f1_rates() {
  static const std::vector<RateDefinition> rates = {
      RateDefinition::tpr(std::nullopt, Sense::kDecreasing),
      RateDefinition::fpr(std::nullopt, Sense::kIncreasing),
      RateDefinition::fnr(std::nullopt, Sense::kIncreasing)};
  return rates;
}

double f1_from_rates(const Eigen::VectorXd& r, double p) {
  const double tp = p * r(0);
  const double den = 2.0 * tp + (1.0 - p) * r(1) + p * r(2);
  return den > 0.0 ? 2.0 * tp / den : 0.0;
}

/// Offset that makes score + offset >= 0 exactly for the top m of `sorted_desc`.
double cut_offset(const std::vector<double>& sorted_desc, std::size_t m) {
  const auto n = sorted_desc.size();
  if (m == 0) return -(sorted_desc.front() + 1.0);
  if (m >= n) return -sorted_desc.back() + 1.0;
  return -0.5 * (sorted_desc[m - 1] + sorted_desc[m]);
}

}  // namespace

double error_rate(const LinearModel& model, const Dataset& ds) {
  return 1.0 - evaluate_rate(model, RateDefinition::accuracy(), ds);
}

double error_rate(const StochasticModel& model, const Dataset& ds) {
  const std::vector<RateDefinition> acc = {RateDefinition::accuracy()};
  return 1.0 - stochastic_rates(model, acc, ds)(0);
}

double f1_score(const LinearModel& model, const Dataset& ds) {
  return f1_from_rates(evaluate_rate_vector(model, f1_rates(), ds), ds.positive_proportion());
}

double f1_score(const StochasticModel& model, const Dataset& ds) {
  return f1_from_rates(stochastic_rates(model, f1_rates(), ds), ds.positive_proportion());
}

double f1_from_scores(const Eigen::VectorXd& scores, std::span<const int> labels) {
  double tp = 0.0, fp = 0.0, fn = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pos = predict_sign(scores(static_cast<Eigen::Index>(i))) == 1;
    if (pos && labels[i] == 1) tp += 1.0;
    if (pos && labels[i] != 1) fp += 1.0;
    if (!pos && labels[i] == 1) fn += 1.0;
  }
  const double den = 2.0 * tp + fp + fn;
  return den > 0.0 ? 2.0 * tp / den : 0.0;
}

LinearModel baseline_unc_error(const Dataset& train, const FitOptions& options) {
  return model_from(fit_hinge(train, options));
}

UncErrorSelection select_unc_error(const Dataset& train, const Dataset& validation,
                                   std::span<const double> grid, const FitOptions& options) {
  if (grid.empty()) throw ConfigError("step-size grid is empty");
  std::optional<UncErrorSelection> best;
  for (double step : grid) {
    FitOptions o = options;
    o.step_size = step;
    auto model = baseline_unc_error(train, o);
    const double err = error_rate(model, validation);
    if (!best || err < best->validation_error) best = UncErrorSelection{std::move(model), step, err};
  }
  return *best;
}

ThresholdShift best_f1_shift(const Eigen::VectorXd& scores, std::span<const int> labels) {
  const auto n = labels.size();
  if (n == 0 || static_cast<std::size_t>(scores.size()) != n) {
    throw ConfigError("threshold sweep needs one score per label");
  }
  ThresholdShift best{0.0, f1_from_scores(scores, labels)};
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
    return scores(static_cast<Eigen::Index>(a)) > scores(static_cast<Eigen::Index>(b));
  });
  std::vector<double> sorted(n);
  double positives = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sorted[i] = scores(static_cast<Eigen::Index>(order[i]));
    positives += labels[i] == 1 ? 1.0 : 0.0;
  }
  double tp = 0.0, fp = 0.0;
  for (std::size_t m = 0; m <= n; ++m) {
    if (m > 0) {
      (labels[order[m - 1]] == 1 ? tp : fp) += 1.0;
    }
    // A cut inside a run of tied scores is not realizable by a threshold.
    if (m > 0 && m < n && sorted[m - 1] == sorted[m]) continue;
    const double fn = positives - tp;
    const double den = 2.0 * tp + fp + fn;
    const double f1 = den > 0.0 ? 2.0 * tp / den : 0.0;
    if (f1 > best.f1) best = ThresholdShift{cut_offset(sorted, m), f1};
  }
  return best;
}

LinearModel baseline_unc_f1(const Dataset& train, const LinearModel& base) {
  require_both_classes(train);
  const auto shift = best_f1_shift(base.scores(train), train.labels());
  Eigen::VectorXd params = base.params();
  params(params.size() - 1) += shift.shift;
  return LinearModel(base.weights(), base.bias() + shift.shift,
                     std::max(base.norm_bound(), params.norm()), base.adjustments());
}

StochasticModel post_shift_thresholds(const Dataset& train, const LinearModel& scorer, double target) {
  const int G = train.num_groups();
  if (G < 2) throw ConfigError("post-shift needs at least two groups");
  const Eigen::VectorXd scores = scorer.scores(train);
  std::vector<std::vector<double>> by_group(static_cast<std::size_t>(G));
  for (std::size_t i = 0; i < train.size(); ++i) {
    by_group[static_cast<std::size_t>(train.groups()[i])].push_back(scores(static_cast<Eigen::Index>(i)));
  }
  std::vector<std::size_t> base(static_cast<std::size_t>(G));
  std::vector<double> frac(static_cast<std::size_t>(G));
  for (int g = 0; g < G; ++g) {
    auto& s = by_group[static_cast<std::size_t>(g)];
    if (s.empty()) throw ConfigError("group " + std::to_string(g) + " is absent from the training set");
    std::sort(s.begin(), s.end(), std::greater<>());
    const double want = target * static_cast<double>(s.size());
    const auto k = static_cast<std::size_t>(std::floor(want));
    base[static_cast<std::size_t>(g)] = std::min(k, s.size());
    frac[static_cast<std::size_t>(g)] = k >= s.size() ? 0.0 : want - static_cast<double>(k);
  }
  // With u uniform on [0, 1), group g admits one extra example iff u < frac_g.
  std::vector<double> cuts = {0.0, 1.0};
  for (double f : frac) {
    if (f > 0.0 && f < 1.0) cuts.push_back(f);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  StochasticModel sm;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const double lo = cuts[j];
    const double w = cuts[j + 1] - lo;
    if (w <= 0.0) continue;
    std::vector<GroupAdjustment> adj(static_cast<std::size_t>(G));
    for (int g = 0; g < G; ++g) {
      const auto gi = static_cast<std::size_t>(g);
      const std::size_t m = base[gi] + (lo < frac[gi] ? 1 : 0);
      adj[gi] = {1.0, cut_offset(by_group[gi], m)};
    }
    sm.atoms.push_back({LinearModel(scorer.weights(), scorer.bias(), scorer.norm_bound(), std::move(adj)), w});
  }
  return sm;
}

StochasticModel baseline_post_shift(const Dataset& train, const FitOptions& options) {
  if (train.num_groups() < 2) throw ConfigError("post-shift needs at least two groups");
  const auto scorer = model_from(fit_logistic(train, options));
  return post_shift_thresholds(train, scorer, train.positive_proportion());
}

}  // namespace rategame
