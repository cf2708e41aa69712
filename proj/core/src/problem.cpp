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

#include "rategame/problem.hpp"

#include <algorithm>
#include <limits>

#include "rategame/errors.hpp"

namespace rategame {

namespace {

bool same_rate(const RateDefinition& a, const RateDefinition& b) {
  return a.selector.group == b.selector.group && a.selector.label == b.selector.label &&
         a.selector.reference_correct == b.selector.reference_correct && a.target == b.target &&
         a.sense == b.sense;
}

std::string term_name(const MetricTerm& t, const char* fallback, std::size_t j) {
  return t.name.empty() ? std::string(fallback) + std::to_string(j) + ":" + t.metric.name : t.name;
}

}  // namespace

LinearRateFunction unit_rate_function(Eigen::Index num_rates, int index, double coeff,
                                      double constant, std::string name) {
  LinearRateFunction f{Eigen::VectorXd::Zero(num_rates), constant, std::move(name)};
  f.coeffs(index) = coeff;
  return f;
}

ProblemMode ProblemSpec::mode() const {
  if (ratio_objective || !ratio_constraints.empty()) return ProblemMode::kP3;
  if (!convex_constraints.empty() || !linear_constraints.empty()) return ProblemMode::kP2;
  return ProblemMode::kP1;
}

std::size_t ProblemSpec::num_constraints() const {
  return convex_constraints.size() + linear_constraints.size() + ratio_constraints.size();
}

std::vector<std::string> ProblemSpec::constraint_names() const {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < convex_constraints.size(); ++j) {
    names.push_back(term_name(convex_constraints[j], "convex", j));
  }
  for (std::size_t j = 0; j < linear_constraints.size(); ++j) {
    names.push_back(linear_constraints[j].name.empty() ? "linear" + std::to_string(j)
                                                       : linear_constraints[j].name);
  }
  for (std::size_t j = 0; j < ratio_constraints.size(); ++j) {
    names.push_back("ratio" + std::to_string(j));
  }
  return names;
}

std::vector<std::string> ProblemSpec::rate_names() const {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < rates.size(); ++k) {
    names.push_back(rates[k].name.empty() ? "rate" + std::to_string(k) : rates[k].name);
  }
  return names;
}

double ProblemSpec::domain_floor() const {
  double floor = 0.0;
  for (const auto& t : objective_terms) floor = std::max(floor, t.metric.domain_floor);
  for (const auto& t : convex_constraints) floor = std::max(floor, t.metric.domain_floor);
  return floor > 0.0 ? floor : 1e-3;
}

void ProblemSpec::validate() const {
  const auto K = num_rates();
  if (K == 0) throw ConfigError("problem defines no rates");
  auto check_linear = [K](const LinearRateFunction& f, const char* what) {
    if (f.coeffs.size() != K) {
      throw ConfigError(std::string(what) + " has " + std::to_string(f.coeffs.size()) +
                        " coefficients, expected " + std::to_string(K));
    }
  };
  auto check_term = [this, K](const MetricTerm& t) {
    if (t.rate_indices.size() != t.metric.size()) {
      throw ConfigError("metric '" + t.metric.name + "' expects " +
                        std::to_string(t.metric.size()) + " rates");
    }
    for (std::size_t i = 0; i < t.rate_indices.size(); ++i) {
      const int r = t.rate_indices[i];
      if (r < 0 || r >= K) throw ConfigError("metric term rate index out of range");
      if (rates[static_cast<std::size_t>(r)].sense != t.metric.senses[i]) {
        throw ConfigError("rate '" + rates[static_cast<std::size_t>(r)].name +
                          "' sense disagrees with metric '" + t.metric.name + "'");
      }
    }
  };
  if (linear_objective.coeffs.size() != 0) check_linear(linear_objective, "linear objective");
  for (const auto& f : linear_constraints) check_linear(f, "linear constraint");
  for (const auto& t : objective_terms) check_term(t);
  for (const auto& t : convex_constraints) check_term(t);
  if (ratio_objective) {
    ratio_objective->validate();
    if (ratio_objective->num_rates() != K) throw ConfigError("ratio objective rate count mismatch");
  }
  for (const auto& s : ratio_constraints) {
    s.validate();
    if (s.num_rates() != K) throw ConfigError("ratio constraint rate count mismatch");
  }
  if (objective_terms.empty() && linear_objective.coeffs.size() == 0 && !ratio_objective) {
    throw ConfigError("problem has no objective");
  }
  // A slack rate shared by several terms must keep one sense.
  slack_senses();
}

void ProblemSpec::validate_convex(std::string_view algorithm) const {
  validate();
  if (mode() == ProblemMode::kP3) {
    throw ConfigError(std::string(algorithm) + " does not handle sum-of-ratios terms");
  }
  for (const auto& t : objective_terms) require_convex(t.metric, algorithm);
  for (const auto& t : convex_constraints) require_convex(t.metric, algorithm);
}

std::vector<int> ProblemSpec::slack_rates() const {
  std::vector<int> out;
  auto add = [&out](const MetricTerm& t) {
    for (int r : t.rate_indices) {
      if (std::find(out.begin(), out.end(), r) == out.end()) out.push_back(r);
    }
  };
  for (const auto& t : objective_terms) add(t);
  for (const auto& t : convex_constraints) add(t);
  return out;
}

std::vector<Sense> ProblemSpec::slack_senses() const {
  const auto slack = slack_rates();
  std::vector<std::optional<Sense>> senses(slack.size());
  auto visit = [&](const MetricTerm& t) {
    for (std::size_t i = 0; i < t.rate_indices.size(); ++i) {
      const auto pos = static_cast<std::size_t>(
          std::find(slack.begin(), slack.end(), t.rate_indices[i]) - slack.begin());
      if (senses[pos] && *senses[pos] != t.metric.senses[i]) {
        throw ConfigError("rate index " + std::to_string(t.rate_indices[i]) +
                          " is used with conflicting monotonicity");
      }
      senses[pos] = t.metric.senses[i];
    }
  };
  for (const auto& t : objective_terms) visit(t);
  for (const auto& t : convex_constraints) visit(t);
  std::vector<Sense> out;
  for (const auto& s : senses) out.push_back(*s);
  return out;
}

double ProblemSpec::Evaluation::max_violation() const {
  if (violations.empty()) return -std::numeric_limits<double>::infinity();
  return *std::max_element(violations.begin(), violations.end());
}

ProblemSpec::Evaluation ProblemSpec::evaluate(const Eigen::VectorXd& r) const {
  auto gather = [&r](const MetricTerm& t) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(t.rate_indices.size()));
    for (std::size_t i = 0; i < t.rate_indices.size(); ++i) {
      z(static_cast<Eigen::Index>(i)) = r(t.rate_indices[i]);
    }
    return z;
  };
  Evaluation e;
  if (linear_objective.coeffs.size() != 0) e.objective += linear_objective.value(r);
  for (const auto& t : objective_terms) e.objective += value_clamped(t.metric, gather(t));
  if (ratio_objective) e.objective += ratio_objective->value(r);
  for (const auto& t : convex_constraints) {
    e.violations.push_back(value_clamped(t.metric, gather(t)) - t.bound);
  }
  for (const auto& f : linear_constraints) e.violations.push_back(f.value(r));
  for (const auto& s : ratio_constraints) e.violations.push_back(s.violation(r));
  return e;
}

std::vector<int> ProblemSpec::add_rates(const std::vector<RateDefinition>& extra) {
  std::vector<int> idx;
  for (const auto& r : extra) {
    auto it = std::find_if(rates.begin(), rates.end(),
                           [&r](const RateDefinition& x) { return same_rate(x, r); });
    if (it == rates.end()) {
      rates.push_back(r);
      it = rates.end() - 1;
    }
    idx.push_back(static_cast<int>(it - rates.begin()));
  }
  return idx;
}

}  // namespace rategame
