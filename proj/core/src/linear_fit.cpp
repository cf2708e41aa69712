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

#include "rategame/linear_fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rategame/errors.hpp"

namespace rategame {

UpdateRule parse_update_rule(std::string_view name) {
  if (name == "gd" || name == "ogd") return UpdateRule::kGradientDescent;
  if (name == "adam") return UpdateRule::kAdam;
  throw ConfigError("unknown update rule '" + std::string(name) + "' (expected ogd or adam)");
}

std::string_view update_rule_name(UpdateRule rule) {
  return rule == UpdateRule::kAdam ? "adam" : "ogd";
}

AdamState::AdamState(Eigen::Index n, double beta1, double beta2, double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon) {
  reset(n);
}

void AdamState::reset(Eigen::Index n) {
  m_ = Eigen::VectorXd::Zero(n);
  v_ = Eigen::VectorXd::Zero(n);
  t_ = 0;
}

Eigen::VectorXd AdamState::direction(const Eigen::VectorXd& gradient) {
  if (gradient.size() != m_.size()) reset(gradient.size());
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * gradient;
  v_ = beta2_ * v_ + (1.0 - beta2_) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  return ((m_ / c1).array() / ((v_ / c2).array().sqrt() + epsilon_)).matrix();
}

void require_both_classes(const Dataset& ds) {
  const auto labels = ds.labels();
  const bool pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool neg = std::find(labels.begin(), labels.end(), -1) != labels.end();
  if (!pos || !neg) {
    throw ConfigError("dataset '" + ds.name() + "' contains a single class; both labels are required");
  }
}

namespace {

Eigen::VectorXd label_vector(const Dataset& ds) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) y(static_cast<Eigen::Index>(i)) = ds.labels()[i];
  return y;
}

template <typename Loss>
Eigen::VectorXd fit(const Dataset& ds, const FitOptions& options, Loss loss) {
  require_both_classes(ds);
  if (options.steps < 0 || !(options.step_size > 0.0)) {
    throw ConfigError("fit needs non-negative steps and a positive step size");
  }
  Eigen::VectorXd params = Eigen::VectorXd::Zero(ds.dim() + 1);
  AdamState adam(params.size());
  Eigen::VectorXd grad;
  for (int t = 0; t < options.steps; ++t) {
    loss(ds, params, &grad);
    if (options.rule == UpdateRule::kAdam) {
      params -= options.step_size * adam.direction(grad);
    } else {
      params -= options.step_size * grad;
    }
  }
  return params;
}

}  // namespace

double logistic_loss(const Dataset& ds, const Eigen::VectorXd& params, Eigen::VectorXd* grad) {
  const auto d = ds.dim();
  const Eigen::VectorXd y = label_vector(ds);
  Eigen::VectorXd s = ds.features() * params.head(d);
  s.array() += params(d);
  const double n = static_cast<double>(ds.size());
  double loss = 0.0;
  Eigen::VectorXd coef(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double m = y(i) * s(i);
    loss += m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
    coef(i) = -y(i) * sigmoid(-m) / n;
  }
  if (grad) {
    grad->resize(d + 1);
    grad->head(d) = ds.features().transpose() * coef;
    (*grad)(d) = coef.sum();
  }
  return loss / n;
}

double hinge_loss(const Dataset& ds, const Eigen::VectorXd& params, Eigen::VectorXd* grad) {
  const auto d = ds.dim();
  const Eigen::VectorXd y = label_vector(ds);
  Eigen::VectorXd s = ds.features() * params.head(d);
  s.array() += params(d);
  const double n = static_cast<double>(ds.size());
  double loss = 0.0;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double slack = 1.0 - y(i) * s(i);
    if (slack > 0.0) {
      loss += slack;
      coef(i) = -y(i) / n;
    }
  }
  if (grad) {
    grad->resize(d + 1);
    grad->head(d) = ds.features().transpose() * coef;
    (*grad)(d) = coef.sum();
  }
  return loss / n;
}

Eigen::VectorXd fit_logistic(const Dataset& ds, const FitOptions& options) {
  return fit(ds, options, logistic_loss);
}

Eigen::VectorXd fit_hinge(const Dataset& ds, const FitOptions& options) {
  return fit(ds, options, hinge_loss);
}

}  // namespace rategame
