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

#include <cmath>
#include <string_view>

#include <Eigen/Dense>

#include "rategame/data.hpp"

namespace rategame {

enum class UpdateRule { kGradientDescent, kAdam };

UpdateRule parse_update_rule(std::string_view name);
std::string_view update_rule_name(UpdateRule rule);

/// Per-coordinate Adam moments. `direction` returns the step to subtract
/// (or add, for ascent) before scaling by the learning rate.
class AdamState {
 public:
  explicit AdamState(Eigen::Index n = 0, double beta1 = 0.9, double beta2 = 0.999,
                     double epsilon = 1e-8);
  Eigen::VectorXd direction(const Eigen::VectorXd& gradient);
  void reset(Eigen::Index n);

 private:
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  double beta1_;
  double beta2_;
  double epsilon_;
  long t_ = 0;
};

struct FitOptions {
  int steps = 2500;
  double step_size = 0.1;
  UpdateRule rule = UpdateRule::kAdam;
};

/// Throws ConfigError unless both labels occur in `ds`.
void require_both_classes(const Dataset& ds);

/// Mean logistic loss log(1 + exp(-y f)) and its gradient in (w, b).
double logistic_loss(const Dataset& ds, const Eigen::VectorXd& params, Eigen::VectorXd* grad);
/// Mean hinge loss max(0, 1 - y f) and a subgradient in (w, b).
double hinge_loss(const Dataset& ds, const Eigen::VectorXd& params, Eigen::VectorXd* grad);

/// Full-batch minimization from zero; returns (w, b).
Eigen::VectorXd fit_logistic(const Dataset& ds, const FitOptions& options = {});
Eigen::VectorXd fit_hinge(const Dataset& ds, const FitOptions& options = {});

inline double sigmoid(double s) {
  return s >= 0.0 ? 1.0 / (1.0 + std::exp(-s)) : std::exp(s) / (1.0 + std::exp(s));
}

}  // namespace rategame
