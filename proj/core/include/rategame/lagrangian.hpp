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

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rategame/metrics.hpp"
#include "rategame/problem.hpp"

namespace rategame {

/// Three-player Lagrangian for convex metric objectives and constraints.
///
/// L(theta, xi; lambda) = sum_obj psi(xi) + g(R) + sum_j lambda_j phi_j(xi)
///   + sum_l lambda_l h_l(R) + sum_k lambda_k s_k (R_k - xi_k)
///
/// with s_k = +1 for increasing and -1 for decreasing slack rates. Multipliers
/// are laid out as [convex constraints | linear constraints | slack rates].
class ConvexGame {
 public:
  explicit ConvexGame(const ProblemSpec& problem);

  const ProblemSpec& problem() const { return *problem_; }
  std::size_t num_multipliers() const { return J_ + L_ + slack_.size(); }
  std::size_t num_convex() const { return J_; }
  std::size_t num_linear() const { return L_; }
  std::size_t num_slack() const { return slack_.size(); }
  const std::vector<int>& slack_rates() const { return slack_; }
  const std::vector<double>& slack_signs() const { return signs_; }
  double domain_floor() const { return floor_; }

  /// Floor vector: `value` on the convex-constraint coordinates, 0 elsewhere.
  Eigen::VectorXd multiplier_floor(double value) const;

  /// Coefficients c over rates with L = c . R + terms independent of theta.
  Eigen::VectorXd theta_coefficients(const Eigen::VectorXd& lambda) const;

  /// Best-responding xi for the current multipliers.
  Eigen::VectorXd best_response(const Eigen::VectorXd& lambda,
                                const BestResponseOptions& options = {},
                                const std::optional<Eigen::VectorXd>& start = std::nullopt) const;

  /// Gradient in lambda at rates R. Coordinates whose rates are absent are 0.
  Eigen::VectorXd lambda_gradient(const Eigen::VectorXd& rates, const std::vector<bool>& present,
                                  const Eigen::VectorXd& xi) const;
  Eigen::VectorXd lambda_gradient(const Eigen::VectorXd& rates, const Eigen::VectorXd& xi) const;

  double lagrangian(const Eigen::VectorXd& rates, const Eigen::VectorXd& xi,
                    const Eigen::VectorXd& lambda) const;

  /// The xi-player's part: sum_obj psi(xi) + sum_j lambda_j phi_j(xi) - sum_k s_k lambda_k xi_k.
  double xi_objective(const Eigen::VectorXd& xi, const Eigen::VectorXd& lambda) const;

 private:
  std::vector<XiTerm> xi_terms(const Eigen::VectorXd& lambda) const;
  Eigen::VectorXd slack_view(const MetricSpec& metric, const std::vector<int>& local,
                             const Eigen::VectorXd& xi) const;

  const ProblemSpec* problem_;
  std::size_t J_ = 0;
  std::size_t L_ = 0;
  std::vector<int> slack_;
  std::vector<double> signs_;
  std::vector<std::vector<int>> obj_local_;
  std::vector<std::vector<int>> con_local_;
  double floor_ = 1e-3;
};

/// One sum-of-ratios block: sum_m s_m alpha_m.R / beta_m.R <= threshold, or
/// <= an epigraph variable when `epigraph` is set (the ratio objective).
struct RatioBlock {
  SumOfRatiosSpec spec;
  bool epigraph = false;
};

/// Lagrangian of the slack-ratios optimizer:
///
/// g(R) + e + sum_c lambda0_c (sum_m s_m a_m / b_m - gamma_c)
///   + sum_m lambda_m s_m (alpha_m.R - a_m) + sum_m lambda_{M+m} s_m (b_m - beta_m.R)
///   + sum_l lambda_l h_l(R)
///
/// Block c contributes multipliers [lambda0, lambda_1..M, lambda_{M+1}..2M];
/// linear constraints follow the blocks. e is present only with a ratio objective.
class SlackRatiosGame {
 public:
  explicit SlackRatiosGame(const ProblemSpec& problem);

  const std::vector<RatioBlock>& blocks() const { return blocks_; }
  std::size_t num_terms() const { return num_terms_; }
  std::size_t num_multipliers() const;
  bool has_epigraph() const { return epigraph_block_.has_value(); }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double epigraph_lower() const { return e_lo_; }
  double epigraph_upper() const { return e_hi_; }
  /// Index of lambda0 for the objective block.
  std::optional<std::size_t> epigraph_multiplier() const;

  Eigen::VectorXd theta_coefficients(const Eigen::VectorXd& lambda) const;
  /// Gradients in (a, b) and the epigraph variable.
  void aux_gradient(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& lambda,
                    Eigen::VectorXd* grad_a, Eigen::VectorXd* grad_b, double* grad_e) const;
  Eigen::VectorXd lambda_gradient(const Eigen::VectorXd& rates, const std::vector<bool>& present,
                                  const Eigen::VectorXd& a, const Eigen::VectorXd& b, double e) const;
  double lagrangian(const Eigen::VectorXd& rates, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                    double e, const Eigen::VectorXd& lambda) const;

  /// Initial (a, b): the clipped numerators and denominators at `rates`.
  void initial_slacks(const Eigen::VectorXd& rates, Eigen::VectorXd* a, Eigen::VectorXd* b) const;

 private:
  const ProblemSpec* problem_;
  std::vector<RatioBlock> blocks_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> term_offsets_;
  std::optional<std::size_t> epigraph_block_;
  std::size_t num_terms_ = 0;
  std::size_t linear_offset_ = 0;
  double lower_ = 1e-3;
  double upper_ = 1.0;
  double e_lo_ = 0.0;
  double e_hi_ = 1.0;
};

/// Lagrangian of the biconvex optimizer. Every ratio a/b is replaced by
/// min_u u^2 b - 2u sqrt(b - a) + 1 with slack xi <= b - a:
///
/// g(R) + e + sum_c lambda0_c (sum_m [u_m^2 beta_m.R - 2 u_m sqrt(xi_m) + 1] - gamma_c)
///   + sum_m lambda_m (xi_m - beta_m.R + alpha_m.R) + sum_l lambda_l h_l(R)
///
/// Terms with sign -1 are first rewritten as (beta - alpha)/beta - 1. Block c
/// contributes multipliers [lambda0, lambda_1..M]; linear constraints follow.
class BiconvexGame {
 public:
  explicit BiconvexGame(const ProblemSpec& problem);

  const std::vector<RatioBlock>& blocks() const { return blocks_; }
  std::size_t num_terms() const { return num_terms_; }
  std::size_t num_multipliers() const;
  bool has_epigraph() const { return epigraph_block_.has_value(); }
  /// Box for u: [0, 1 / (2 sqrt(lower))].
  double u_upper() const { return u_hi_; }
  double xi_upper() const { return upper_; }
  double epigraph_lower() const { return e_lo_; }
  double epigraph_upper() const { return e_hi_; }
  std::optional<std::size_t> epigraph_multiplier() const;

  /// Floor vector: `value` on every lambda_m coordinate, 0 elsewhere.
  Eigen::VectorXd multiplier_floor(double value) const;

  /// xi_m = (u_m lambda0 / lambda_m)^2 clipped into [0, upper].
  Eigen::VectorXd xi_update(const Eigen::VectorXd& u, const Eigen::VectorXd& lambda) const;
  Eigen::VectorXd theta_coefficients(const Eigen::VectorXd& u, const Eigen::VectorXd& lambda) const;
  Eigen::VectorXd u_gradient(const Eigen::VectorXd& rates, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& xi, const Eigen::VectorXd& lambda) const;
  double epigraph_gradient(const Eigen::VectorXd& lambda) const;
  Eigen::VectorXd lambda_gradient(const Eigen::VectorXd& rates, const std::vector<bool>& present,
                                  const Eigen::VectorXd& u, const Eigen::VectorXd& xi,
                                  double e) const;
  double lagrangian(const Eigen::VectorXd& rates, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& xi, double e, const Eigen::VectorXd& lambda) const;

  /// u^2 b - 2 u sqrt(xi) + 1.
  static double phi(double b, double xi, double u);

 private:
  const ProblemSpec* problem_;
  std::vector<RatioBlock> blocks_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> term_offsets_;
  std::optional<std::size_t> epigraph_block_;
  std::size_t num_terms_ = 0;
  std::size_t linear_offset_ = 0;
  double lower_ = 1e-3;
  double upper_ = 1.0;
  double u_hi_ = 1.0;
  double e_lo_ = 0.0;
  double e_hi_ = 1.0;
};

}  // namespace rategame
