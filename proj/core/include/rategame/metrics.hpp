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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rategame/rates.hpp"

namespace rategame {

enum class MetricKind { kGMean, kHMean, kQMean, kKld, kFMeasure };

MetricKind parse_metric_kind(std::string_view name);
std::string_view metric_kind_name(MetricKind kind);

struct MetricParams {
  /// Target positive proportion; required for kld.
  std::optional<double> p;
  double domain_floor = 1e-3;
  double kld_epsilon = 1e-8;
};

/// A function of K rates, evaluated on the box [domain_floor, 1]^K.
///
/// gmean and hmean take (TPR, TNR); qmean takes (FPR, FNR); kld takes
/// (p_hat, 1 - p_hat); fmeasure takes (TP, FP, FN) and is only pseudo-convex.
struct MetricSpec {
  MetricKind kind = MetricKind::kGMean;
  std::string name;
  std::vector<Sense> senses;
  /// sup of the l1 norm of the gradient over the box.
  double lipschitz = 0.0;
  double domain_floor = 1e-3;
  bool pseudo_convex = false;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  /// argmin over the box of weight * value(xi) + coeffs . xi, when known in closed form.
  std::function<Eigen::VectorXd(double weight, const Eigen::VectorXd& coeffs)>
      analytic_best_response;

  std::size_t size() const { return senses.size(); }
};

MetricSpec build_metric(MetricKind kind, const MetricParams& params = {});
MetricSpec build_metric(std::string_view kind, const MetricParams& params = {});

/// Throws ConfigError if `metric` is not convex; `context` names the algorithm.
void require_convex(const MetricSpec& metric, std::string_view context);

/// Gradient at xi; DomainError unless xi lies in the metric's box.
Eigen::VectorXd psi_grad(const MetricSpec& metric, const Eigen::VectorXd& xi);

/// Value at z after clamping every coordinate into the box.
double value_clamped(const MetricSpec& metric, const Eigen::VectorXd& z);

/// A constraint metric(z) - bound <= 0.
struct ConstraintSpec {
  MetricSpec metric;
  double bound = 0.0;

  double value(const Eigen::VectorXd& z) const { return metric.value(z) - bound; }
};

/// weight * metric(xi[indices]) inside the best-response objective.
struct XiTerm {
  const MetricSpec* metric = nullptr;
  double weight = 1.0;
  std::vector<int> indices;
};

struct BestResponseOptions {
  int max_steps = 500;
  double tolerance = 1e-8;
};

/// Minimizes sum_j weight_j * metric_j(xi[indices_j]) + linear . xi over
/// [floor, 1]^n. Terms with disjoint indices are solved independently; the
/// closed form is used where a term provides one. Throws OptimizationError
/// ("unbounded best response") when every term weight is zero.
Eigen::VectorXd best_response_xi(std::span<const XiTerm> terms, const Eigen::VectorXd& linear,
                                 double floor, const BestResponseOptions& options = {},
                                 const std::optional<Eigen::VectorXd>& start = std::nullopt);

/// Objective value minimized by best_response_xi.
double best_response_objective(std::span<const XiTerm> terms, const Eigen::VectorXd& linear,
                               const Eigen::VectorXd& xi);

/// Unconstrained-metric form: minimizes psi(xi) - sum_k s_k lambda_k xi_k,
/// with s_k the sense sign of coordinate k.
Eigen::VectorXd best_response_xi(const MetricSpec& metric, const Eigen::VectorXd& lambda_rate,
                                 const BestResponseOptions& options = {});

/// Constrained form: minimizes sum_j lambda_j phi_j(xi) - sum_k s_k lambda_k xi_k,
/// all constraints sharing the same K rate coordinates.
Eigen::VectorXd best_response_xi(std::span<const ConstraintSpec> constraints,
                                 const Eigen::VectorXd& constraint_multipliers,
                                 const Eigen::VectorXd& lambda_rate,
                                 const BestResponseOptions& options = {});

}  // namespace rategame
