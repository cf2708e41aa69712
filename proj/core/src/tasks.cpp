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


#include "rategame/tasks.hpp"

#include <string>

#include "rategame/errors.hpp"
#include "rategame/sum_of_ratios.hpp"

namespace rategame {

LinearRateFunction error_rate_function(Eigen::Index num_rates, int accuracy_index, double offset,
                                       std::string name) {
  return unit_rate_function(num_rates, accuracy_index, -1.0, 1.0 + offset, std::move(name));
}

ProblemSpec make_kld_parity_problem(const Dataset& train, std::optional<double> error_bound,
                                    const MetricParams& params) {
  if (train.num_groups() < 1) throw ConfigError("kld-parity needs at least one group");
  MetricParams mp = params;
  mp.p = train.positive_proportion();
  const MetricSpec kld = build_metric(MetricKind::kKld, mp);
  ProblemSpec p;
  for (int g = 0; g < train.num_groups(); ++g) {
    const auto idx = p.add_rates({RateDefinition::positive_prediction(g, Sense::kDecreasing),
                                  RateDefinition::negative_prediction(g, Sense::kDecreasing)});
    p.objective_terms.push_back(MetricTerm{kld, idx, 0.0, "kld[g=" + std::to_string(g) + "]"});
  }
  if (error_bound) {
    const int acc = p.add_rates({RateDefinition::accuracy(Sense::kDecreasing)}).front();
    p.linear_constraints.push_back(error_rate_function(p.num_rates(), acc, -*error_bound, "error"));
  }
  p.validate();
  return p;
}

ProblemSpec make_fmeasure_parity_problem(const Dataset& train, int group_a, int group_b,
                                         double delta) {
  const auto compiled =
      compile_parity_constraint(ParityKind::kFMeasureParity, group_a, group_b, delta, train);
  ProblemSpec p;
  const auto overall = p.add_rates(fmeasure_rates(std::nullopt));
  const auto map = p.add_rates(compiled.rates);
  const auto K = p.num_rates();
  p.ratio_objective.emplace();
  p.ratio_objective->terms.push_back(
      fmeasure_ratio(train.positive_proportion(), overall[0], overall[1], overall[2], K, true));
  p.ratio_objective->upper_bound = compiled.spec.upper_bound;
  p.ratio_objective->lower_bound = compiled.spec.lower_bound;
  p.ratio_constraints.push_back(compiled.spec.embed(map, K));
  p.validate();
  return p;
}

FMeasureIndices fmeasure_indices(const ProblemSpec& p) {
  FMeasureIndices idx{-1, -1, -1};
  for (std::size_t k = 0; k < p.rates.size(); ++k) {
    const auto& r = p.rates[k];
    if (r.selector.group || r.selector.reference_correct || !r.selector.label) continue;
    if (r.target == Target::kPredictPositive && *r.selector.label == 1) idx.tpr = static_cast<int>(k);
    if (r.target == Target::kPredictPositive && *r.selector.label == -1) idx.fpr = static_cast<int>(k);
    if (r.target == Target::kPredictNegative && *r.selector.label == 1) idx.fnr = static_cast<int>(k);
  }
  if (idx.tpr < 0 || idx.fpr < 0 || idx.fnr < 0) {
    throw ConfigError("problem has no overall TPR/FPR/FNR rates");
  }
  return idx;
}

double fmeasure_from_rates(const Eigen::VectorXd& rates, const FMeasureIndices& idx, double p) {
  const double tp = p * rates(idx.tpr);
  const double den = 2.0 * tp + (1.0 - p) * rates(idx.fpr) + p * rates(idx.fnr);
  return den > 0.0 ? 2.0 * tp / den : 0.0;
}

}  // namespace rategame
