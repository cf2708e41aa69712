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

#include "rategame/sum_of_ratios.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rategame/errors.hpp"

namespace rategame {

double RatioTerm::value(const Eigen::VectorXd& rates) const {
  const double den = denominator.dot(rates);
  if (den == 0.0) return 0.0;
  return sign * numerator.dot(rates) / den;
}

Eigen::Index SumOfRatiosSpec::num_rates() const {
  return terms.empty() ? 0 : terms.front().numerator.size();
}

void SumOfRatiosSpec::validate() const {
  if (terms.empty()) throw ConfigError("sum-of-ratios spec has no terms");
  if (!(lower_bound > 0.0) || lower_bound > upper_bound) {
    throw ConfigError("sum-of-ratios bounds must satisfy 0 < lower <= upper");
  }
  const auto K = num_rates();
  for (const auto& t : terms) {
    if (t.numerator.size() != K || t.denominator.size() != K) {
      throw ConfigError("sum-of-ratios terms disagree on the rate count");
    }
    if ((t.numerator.array() < 0.0).any() || (t.denominator.array() < 0.0).any()) {
      throw ConfigError("sum-of-ratios coefficients must be non-negative");
    }
    if (t.sign != 1 && t.sign != -1) throw ConfigError("ratio sign must be +1 or -1");
  }
}

double SumOfRatiosSpec::value(const Eigen::VectorXd& rates) const {
  double v = 0.0;
  for (const auto& t : terms) v += t.value(rates);
  return v;
}

double SumOfRatiosSpec::value_clipped(const Eigen::VectorXd& rates) const {
  double v = 0.0;
  for (const auto& t : terms) {
    const double a = std::clamp(t.numerator.dot(rates), lower_bound, upper_bound);
    const double b = std::clamp(t.denominator.dot(rates), lower_bound, upper_bound);
    v += t.sign * a / b;
  }
  return v;
}

SumOfRatiosSpec SumOfRatiosSpec::embed(std::span<const int> rate_map, Eigen::Index total) const {
  if (static_cast<Eigen::Index>(rate_map.size()) != num_rates()) {
    throw ConfigError("rate map size does not match the sum-of-ratios spec");
  }
  SumOfRatiosSpec out = *this;
  for (auto& t : out.terms) {
    Eigen::VectorXd num = Eigen::VectorXd::Zero(total);
    Eigen::VectorXd den = Eigen::VectorXd::Zero(total);
    for (std::size_t k = 0; k < rate_map.size(); ++k) {
      const int to = rate_map[k];
      if (to < 0 || to >= total) throw ConfigError("rate map index out of range");
      num(to) += t.numerator(static_cast<Eigen::Index>(k));
      den(to) += t.denominator(static_cast<Eigen::Index>(k));
    }
    t.numerator = std::move(num);
    t.denominator = std::move(den);
  }
  return out;
}

ParityKind parse_parity_kind(std::string_view name) {
  if (name == "fmeasure-parity") return ParityKind::kFMeasureParity;
  if (name == "predictive-parity") return ParityKind::kPredictiveParity;
  if (name == "churn-difference") return ParityKind::kChurnDifference;
  throw ConfigError("unknown parity constraint kind '" + std::string(name) + "'");
}

RatioTerm fmeasure_ratio(double p, int tpr, int fpr, int fnr, Eigen::Index num_rates,
                         bool complement) {
  RatioTerm t;
  t.numerator = Eigen::VectorXd::Zero(num_rates);
  t.denominator = Eigen::VectorXd::Zero(num_rates);
  t.denominator(tpr) = 2.0 * p;
  t.denominator(fpr) = 1.0 - p;
  t.denominator(fnr) = p;
  if (complement) {
    t.numerator(fpr) = 1.0 - p;
    t.numerator(fnr) = p;
  } else {
    t.numerator(tpr) = 2.0 * p;
  }
  return t;
}

std::vector<RateDefinition> fmeasure_rates(std::optional<int> group) {
  return {RateDefinition::tpr(group, Sense::kDecreasing),
          RateDefinition::fpr(group, Sense::kIncreasing),
          RateDefinition::fnr(group, Sense::kIncreasing)};
}

namespace {

double upper_bound_of(const std::vector<RatioTerm>& terms) {
  double b = 0.0;
  for (const auto& t : terms) {
    b = std::max(b, t.numerator.cwiseMax(0.0).sum());
    b = std::max(b, t.denominator.cwiseMax(0.0).sum());
  }
  return b;
}

double fraction(const Dataset& ds, int group, bool reference_correct) {
  std::size_t members = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.groups()[i] != group) continue;
    ++members;
    if ((ds.reference()[i] == ds.labels()[i]) == reference_correct) ++hits;
  }
  if (members == 0) {
    throw EvaluationError("group " + std::to_string(group) + " is empty in '" + ds.name() + "'");
  }
  return static_cast<double>(hits) / static_cast<double>(members);
}

}  // namespace

CompiledConstraint compile_parity_constraint(ParityKind kind, int group_a, int group_b,
                                             double delta, const Dataset& ds) {
  if (!(delta >= 0.0)) throw ConfigError("parity slack must be non-negative");
  CompiledConstraint out;
  auto& spec = out.spec;

  switch (kind) {
    case ParityKind::kFMeasureParity: {
      const double pa = ds.group_positive_proportion(group_a);
      const double pb = ds.group_positive_proportion(group_b);
      for (auto& r : fmeasure_rates(group_a)) out.rates.push_back(r);
      for (auto& r : fmeasure_rates(group_b)) out.rates.push_back(r);
      spec.terms.push_back(fmeasure_ratio(pa, 0, 1, 2, 6, false));
      spec.terms.push_back(fmeasure_ratio(pb, 3, 4, 5, 6, true));
      spec.threshold = 1.0 + delta;
      out.transforms.push_back("-F_B rewritten as (1 - F_B) - 1 with 1 - F_B = (FP + FN) / (2TP + FP + FN)");
      break;
    }
    case ParityKind::kPredictiveParity: {
      const double pa = ds.group_positive_proportion(group_a);
      const double pb = ds.group_positive_proportion(group_b);
      out.rates = {RateDefinition::tpr(group_a, Sense::kDecreasing),
                   RateDefinition::fpr(group_a, Sense::kIncreasing),
                   RateDefinition::tpr(group_b, Sense::kIncreasing),
                   RateDefinition::fpr(group_b, Sense::kDecreasing)};
      RatioTerm a;
      a.numerator = Eigen::VectorXd::Zero(4);
      a.denominator = Eigen::VectorXd::Zero(4);
      a.numerator(0) = pa;
      a.denominator(0) = pa;
      a.denominator(1) = 1.0 - pa;
      RatioTerm b;
      b.numerator = Eigen::VectorXd::Zero(4);
      b.denominator = Eigen::VectorXd::Zero(4);
      b.numerator(3) = 1.0 - pb;
      b.denominator(2) = pb;
      b.denominator(3) = 1.0 - pb;
      spec.terms = {a, b};
      spec.threshold = 1.0 + delta;
      out.transforms.push_back("-PP_B rewritten as (1 - PP_B) - 1 with 1 - PP_B = FP / (TP + FP)");
      break;
    }
    case ParityKind::kChurnDifference: {
      if (ds.reference().empty()) {
        throw ConfigError("churn-difference needs reference predictions on the dataset");
      }
      const int groups[2] = {group_a, group_b};
      for (int g : groups) {
        out.rates.push_back(RateDefinition{{g, std::nullopt, false}, Target::kAgreeWithLabel,
                                           Sense::kIncreasing,
                                           "wins[g=" + std::to_string(g) + "]"});
        out.rates.push_back(RateDefinition{{g, std::nullopt, true}, Target::kDisagreeWithLabel,
                                           Sense::kDecreasing,
                                           "losses[g=" + std::to_string(g) + "]"});
      }
      for (int m = 0; m < 2; ++m) {
        RatioTerm t;
        t.numerator = Eigen::VectorXd::Zero(4);
        t.denominator = Eigen::VectorXd::Zero(4);
        t.numerator(2 * m) = fraction(ds, groups[m], false);
        t.denominator(2 * m + 1) = fraction(ds, groups[m], true);
        t.sign = m == 0 ? 1 : -1;
        spec.terms.push_back(t);
      }
      spec.threshold = delta;
      out.rates[2].sense = Sense::kDecreasing;
      out.rates[3].sense = Sense::kIncreasing;
      break;
    }
  }
  spec.upper_bound = std::max(1.0, upper_bound_of(spec.terms));
  spec.validate();
  return out;
}

}  // namespace rategame
