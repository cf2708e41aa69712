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

#include "rategame/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rategame/errors.hpp"

namespace rategame {

namespace {

bool rates_present(const Eigen::VectorXd& coeffs, const std::vector<bool>& present) {
  if (present.empty()) return true;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    if (coeffs(k) != 0.0 && !present[static_cast<std::size_t>(k)]) return false;
  }
  return true;
}

double linear_value(const LinearRateFunction& f, const Eigen::VectorXd& rates) {
  return f.coeffs.size() == 0 ? 0.0 : f.value(rates);
}

std::vector<bool> all_present(Eigen::Index n) {
  return std::vector<bool>(static_cast<std::size_t>(n), true);
}

// Ratio blocks in order: constraints, then the objective (if any).
std::vector<RatioBlock> collect_blocks(const ProblemSpec& p, std::optional<std::size_t>* epigraph) {
  std::vector<RatioBlock> blocks;
  for (const auto& s : p.ratio_constraints) blocks.push_back(RatioBlock{s, false});
  if (p.ratio_objective) {
    *epigraph = blocks.size();
    blocks.push_back(RatioBlock{*p.ratio_objective, true});
  }
  if (blocks.empty()) throw ConfigError("sum-of-ratios optimizers need a ratio objective or constraint");
  if (!p.objective_terms.empty() || !p.convex_constraints.empty()) {
    throw ConfigError("sum-of-ratios optimizers do not accept convex metric terms");
  }
  return blocks;
}

void epigraph_range(const SumOfRatiosSpec& s, double* lo, double* hi) {
  const double small = s.lower_bound / s.upper_bound;
  const double big = s.upper_bound / s.lower_bound;
  *lo = 0.0;
  *hi = 0.0;
  for (const auto& t : s.terms) {
    *lo += t.sign > 0 ? small : -big;
    *hi += t.sign > 0 ? big : -small;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ConvexGame

ConvexGame::ConvexGame(const ProblemSpec& problem)
    : problem_(&problem),
      J_(problem.convex_constraints.size()),
      L_(problem.linear_constraints.size()),
      slack_(problem.slack_rates()),
      floor_(problem.domain_floor()) {
  for (auto s : problem.slack_senses()) signs_.push_back(sense_sign(s));
  auto local = [this](const MetricTerm& t) {
    std::vector<int> idx;
    for (int r : t.rate_indices) {
      idx.push_back(static_cast<int>(std::find(slack_.begin(), slack_.end(), r) - slack_.begin()));
    }
    return idx;
  };
  for (const auto& t : problem.objective_terms) obj_local_.push_back(local(t));
  for (const auto& t : problem.convex_constraints) con_local_.push_back(local(t));
}

Eigen::VectorXd ConvexGame::multiplier_floor(double value) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_multipliers()));
  f.head(static_cast<Eigen::Index>(J_)).setConstant(value);
  return f;
}

Eigen::VectorXd ConvexGame::theta_coefficients(const Eigen::VectorXd& lambda) const {
  const auto& p = *problem_;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(p.num_rates());
  if (p.linear_objective.coeffs.size() != 0) c += p.linear_objective.coeffs;
  for (std::size_t l = 0; l < L_; ++l) {
    c += lambda(static_cast<Eigen::Index>(J_ + l)) * p.linear_constraints[l].coeffs;
  }
  for (std::size_t k = 0; k < slack_.size(); ++k) {
    c(slack_[k]) += signs_[k] * lambda(static_cast<Eigen::Index>(J_ + L_ + k));
  }
  return c;
}

std::vector<XiTerm> ConvexGame::xi_terms(const Eigen::VectorXd& lambda) const {
  const auto& p = *problem_;
  std::vector<XiTerm> terms;
  for (std::size_t t = 0; t < p.objective_terms.size(); ++t) {
    terms.push_back(XiTerm{&p.objective_terms[t].metric, 1.0, obj_local_[t]});
  }
  for (std::size_t j = 0; j < J_; ++j) {
    terms.push_back(XiTerm{&p.convex_constraints[j].metric,
                           std::max(0.0, lambda(static_cast<Eigen::Index>(j))), con_local_[j]});
  }
  return terms;
}

Eigen::VectorXd ConvexGame::best_response(const Eigen::VectorXd& lambda,
                                          const BestResponseOptions& options,
                                          const std::optional<Eigen::VectorXd>& start) const {
  if (lambda.size() != static_cast<Eigen::Index>(num_multipliers())) {
    throw ConfigError("multiplier vector has the wrong size");
  }
  const auto S = static_cast<Eigen::Index>(slack_.size());
  if (S == 0) return Eigen::VectorXd(0);
  Eigen::VectorXd linear(S);
  for (Eigen::Index k = 0; k < S; ++k) {
    linear(k) = -signs_[static_cast<std::size_t>(k)] * lambda(static_cast<Eigen::Index>(J_ + L_) + k);
  }
  const auto terms = xi_terms(lambda);
  return best_response_xi(terms, linear, floor_, options, start);
}

Eigen::VectorXd ConvexGame::slack_view(const MetricSpec&, const std::vector<int>& local,
                                       const Eigen::VectorXd& xi) const {
  Eigen::VectorXd z(static_cast<Eigen::Index>(local.size()));
  for (std::size_t i = 0; i < local.size(); ++i) z(static_cast<Eigen::Index>(i)) = xi(local[i]);
  return z;
}

Eigen::VectorXd ConvexGame::lambda_gradient(const Eigen::VectorXd& rates,
                                            const std::vector<bool>& present,
                                            const Eigen::VectorXd& xi) const {
  const auto& p = *problem_;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_multipliers()));
  for (std::size_t j = 0; j < J_; ++j) {
    const auto& t = p.convex_constraints[j];
    g(static_cast<Eigen::Index>(j)) = t.metric.value(slack_view(t.metric, con_local_[j], xi)) - t.bound;
  }
  for (std::size_t l = 0; l < L_; ++l) {
    const auto& f = p.linear_constraints[l];
    if (rates_present(f.coeffs, present)) g(static_cast<Eigen::Index>(J_ + l)) = f.value(rates);
  }
  for (std::size_t k = 0; k < slack_.size(); ++k) {
    const auto r = static_cast<std::size_t>(slack_[k]);
    if (!present.empty() && !present[r]) continue;
    g(static_cast<Eigen::Index>(J_ + L_ + k)) =
        signs_[k] * (rates(slack_[k]) - xi(static_cast<Eigen::Index>(k)));
  }
  return g;
}

Eigen::VectorXd ConvexGame::lambda_gradient(const Eigen::VectorXd& rates,
                                            const Eigen::VectorXd& xi) const {
  return lambda_gradient(rates, all_present(rates.size()), xi);
}

double ConvexGame::xi_objective(const Eigen::VectorXd& xi, const Eigen::VectorXd& lambda) const {
  const auto& p = *problem_;
  double v = 0.0;
  for (std::size_t t = 0; t < p.objective_terms.size(); ++t) {
    const auto& term = p.objective_terms[t];
    v += term.metric.value(slack_view(term.metric, obj_local_[t], xi));
  }
  for (std::size_t j = 0; j < J_; ++j) {
    const auto& t = p.convex_constraints[j];
    v += lambda(static_cast<Eigen::Index>(j)) *
         (t.metric.value(slack_view(t.metric, con_local_[j], xi)) - t.bound);
  }
  for (std::size_t k = 0; k < slack_.size(); ++k) {
    v -= signs_[k] * lambda(static_cast<Eigen::Index>(J_ + L_ + k)) * xi(static_cast<Eigen::Index>(k));
  }
  return v;
}

double ConvexGame::lagrangian(const Eigen::VectorXd& rates, const Eigen::VectorXd& xi,
                              const Eigen::VectorXd& lambda) const {
  return xi_objective(xi, lambda) + theta_coefficients(lambda).dot(rates) +
         problem_->linear_objective.constant +
         [&] {
           double c = 0.0;
           for (std::size_t l = 0; l < L_; ++l) {
             c += lambda(static_cast<Eigen::Index>(J_ + l)) * problem_->linear_constraints[l].constant;
           }
           return c;
         }();
}

// ---------------------------------------------------------------------------
// SlackRatiosGame

SlackRatiosGame::SlackRatiosGame(const ProblemSpec& problem)
    : problem_(&problem) {
  blocks_ = collect_blocks(problem, &epigraph_block_);
  std::size_t off = 0;
  lower_ = blocks_.front().spec.lower_bound;
  upper_ = blocks_.front().spec.upper_bound;
  for (const auto& b : blocks_) {
    offsets_.push_back(off);
    term_offsets_.push_back(num_terms_);
    off += 1 + 2 * b.spec.terms.size();
    num_terms_ += b.spec.terms.size();
    lower_ = std::min(lower_, b.spec.lower_bound);
    upper_ = std::max(upper_, b.spec.upper_bound);
  }
  linear_offset_ = off;
  if (epigraph_block_) epigraph_range(blocks_[*epigraph_block_].spec, &e_lo_, &e_hi_);
}

std::optional<std::size_t> SlackRatiosGame::epigraph_multiplier() const {
  if (!epigraph_block_) return std::nullopt;
  return offsets_[*epigraph_block_];
}

std::size_t SlackRatiosGame::num_multipliers() const {
  return linear_offset_ + problem_->linear_constraints.size();
}

Eigen::VectorXd SlackRatiosGame::theta_coefficients(const Eigen::VectorXd& lambda) const {
  const auto& p = *problem_;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(p.num_rates());
  if (p.linear_objective.coeffs.size() != 0) c += p.linear_objective.coeffs;
  for (std::size_t cb = 0; cb < blocks_.size(); ++cb) {
    const auto& terms = blocks_[cb].spec.terms;
    const auto M = terms.size();
    const auto base = offsets_[cb];
    for (std::size_t m = 0; m < M; ++m) {
      const double s = terms[m].sign;
      const double lm = lambda(static_cast<Eigen::Index>(base + 1 + m));
      const double lMm = lambda(static_cast<Eigen::Index>(base + 1 + M + m));
      c += s * (lm * terms[m].numerator - lMm * terms[m].denominator);
    }
  }
  for (std::size_t l = 0; l < p.linear_constraints.size(); ++l) {
    c += lambda(static_cast<Eigen::Index>(linear_offset_ + l)) * p.linear_constraints[l].coeffs;
  }
  return c;
}

void SlackRatiosGame::aux_gradient(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                   const Eigen::VectorXd& lambda, Eigen::VectorXd* grad_a,
                                   Eigen::VectorXd* grad_b, double* grad_e) const {
  grad_a->resize(static_cast<Eigen::Index>(num_terms_));
  grad_b->resize(static_cast<Eigen::Index>(num_terms_));
  *grad_e = 0.0;
  for (std::size_t cb = 0; cb < blocks_.size(); ++cb) {
    const auto& terms = blocks_[cb].spec.terms;
    const auto M = terms.size();
    const auto base = offsets_[cb];
    const double l0 = lambda(static_cast<Eigen::Index>(base));
    for (std::size_t m = 0; m < M; ++m) {
      const auto i = static_cast<Eigen::Index>(term_offsets_[cb] + m);
      const double s = terms[m].sign;
      const double lm = lambda(static_cast<Eigen::Index>(base + 1 + m));
      const double lMm = lambda(static_cast<Eigen::Index>(base + 1 + M + m));
      (*grad_a)(i) = s * (l0 / b(i) - lm);
      (*grad_b)(i) = s * (-l0 * a(i) / (b(i) * b(i)) + lMm);
    }
    if (blocks_[cb].epigraph) *grad_e = 1.0 - l0;
  }
}

Eigen::VectorXd SlackRatiosGame::lambda_gradient(const Eigen::VectorXd& rates,
                                                 const std::vector<bool>& present,
                                                 const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                                 double e) const {
  const auto& p = *problem_;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_multipliers()));
  for (std::size_t cb = 0; cb < blocks_.size(); ++cb) {
    const auto& blk = blocks_[cb];
    const auto M = blk.spec.terms.size();
    const auto base = offsets_[cb];
    double sum = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      const auto i = static_cast<Eigen::Index>(term_offsets_[cb] + m);
      const auto& t = blk.spec.terms[m];
      const double s = t.sign;
      sum += s * a(i) / b(i);
      if (rates_present(t.numerator, present)) {
        g(static_cast<Eigen::Index>(base + 1 + m)) = s * (t.numerator.dot(rates) - a(i));
      }
      if (rates_present(t.denominator, present)) {
        g(static_cast<Eigen::Index>(base + 1 + M + m)) = s * (b(i) - t.denominator.dot(rates));
      }
    }
    g(static_cast<Eigen::Index>(base)) = sum - (blk.epigraph ? e : blk.spec.threshold);
  }
  for (std::size_t l = 0; l < p.linear_constraints.size(); ++l) {
    const auto& f = p.linear_constraints[l];
    if (rates_present(f.coeffs, present)) g(static_cast<Eigen::Index>(linear_offset_ + l)) = f.value(rates);
  }
  return g;
}

double SlackRatiosGame::lagrangian(const Eigen::VectorXd& rates, const Eigen::VectorXd& a,
                                   const Eigen::VectorXd& b, double e,
                                   const Eigen::VectorXd& lambda) const {
  const auto& p = *problem_;
  double v = linear_value(p.linear_objective, rates) + (has_epigraph() ? e : 0.0);
  const Eigen::VectorXd g = lambda_gradient(rates, {}, a, b, e);
  v += lambda.dot(g);
  return v;
}

void SlackRatiosGame::initial_slacks(const Eigen::VectorXd& rates, Eigen::VectorXd* a,
                                     Eigen::VectorXd* b) const {
  a->resize(static_cast<Eigen::Index>(num_terms_));
  b->resize(static_cast<Eigen::Index>(num_terms_));
  for (std::size_t cb = 0; cb < blocks_.size(); ++cb) {
    const auto& terms = blocks_[cb].spec.terms;
    for (std::size_t m = 0; m < terms.size(); ++m) {
      const auto i = static_cast<Eigen::Index>(term_offsets_[cb] + m);
      (*a)(i) = std::clamp(terms[m].numerator.dot(rates), lower_, upper_);
      (*b)(i) = std::clamp(terms[m].denominator.dot(rates), lower_, upper_);
    }
  }
}

// ---------------------------------------------------------------------------
// BiconvexGame

BiconvexGame::BiconvexGame(const ProblemSpec& problem) : problem_(&problem) {
  blocks_ = collect_blocks(problem, &epigraph_block_);
  lower_ = blocks_.front().spec.lower_bound;
  upper_ = blocks_.front().spec.upper_bound;
  for (auto& blk : blocks_) {
    for (auto& t : blk.spec.terms) {
      if (t.sign > 0) continue;
      t.numerator = t.denominator - t.numerator;
      if ((t.numerator.array() < 0.0).any()) {
        throw ConfigError("biconvex rewrite of a negative ratio needs numerator <= denominator "
                          "coordinate-wise");
      }
      t.sign = 1;
      blk.spec.threshold += 1.0;
    }
  }
  std::size_t off = 0;
  for (const auto& b : blocks_) {
    offsets_.push_back(off);
    term_offsets_.push_back(num_terms_);
    off += 1 + b.spec.terms.size();
    num_terms_ += b.spec.terms.size();
    lower_ = std::min(lower_, b.spec.lower_bound);
    upper_ = std::max(upper_, b.spec.upper_bound);
  }
  linear_offset_ = off;
  u_hi_ = 1.0 / (2.0 * std::sqrt(lower_));
  if (epigraph_block_) {
    // The rewrite shifted the threshold; the epigraph tracks the shifted sum.
    epigraph_range(blocks_[*epigraph_block_].spec, &e_lo_, &e_hi_);
  }
}

std::optional<std::size_t> BiconvexGame::epigraph_multiplier() const {
  if (!epigraph_block_) return std::nullopt;
  return offsets_[*epigraph_block_];
}

std::size_t BiconvexGame::num_multipliers() const {
  return linear_offset_ + problem_->linear_constraints.size();
}

Eigen::VectorXd BiconvexGame::multiplier_floor(double value) const {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_multipliers()));
  for (std::size_t cb = 0; cb < blocks_.size(); ++cb) {
    for (std::size_t m = 0; m < blocks_[cb].spec.terms.size(); ++m) {
      f(static_cast<Eigen::Index>(offsets_[cb] + 1 + m)) = value;
    }
  }
  return f;
}

double BiconvexGame::phi(double b, double xi, double u) {
  return u * u * b - 2.0 * u * std::sqrt(std::max(0.0, xi)) + 1.0;
}

Eigen::VectorXd BiconvexGame::xi_update(const Eigen::VectorXd& u, const Eigen::VectorXd& lambda) const {
  Eigen::VectorXd xi(static_cast<Eigen::Index>(num_terms_));
  for (std::size_t cb = 0; cb < blocks_.size(); ++cb) {
    const double l0 = lambda(static_cast<Eigen::Index>(offsets_[cb]));
    for (std::size_t m = 0; m < blocks_[cb].spec.terms.size(); ++m) {
      const auto i = static_cast<Eigen::Index>(term_offsets_[cb] + m);
      const double lm = lambda(static_cast<Eigen::Index>(offsets_[cb] + 1 + m));
      const double num = u(i) * l0;
      double x;
      if (lm > 0.0) {
        x = (num / lm) * (num / lm);
      } else {
        x = num > 0.0 ? upper_ : 0.0;
      }
      xi(i) = std::clamp(x, 0.0, upper_);
    }
  }
  return xi;
}

Eigen::VectorXd BiconvexGame::theta_coefficients(const Eigen::VectorXd& u,
                                                 const Eigen::VectorXd& lambda) const {
  const auto& p = *problem_;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(p.num_rates());
  if (p.linear_objective.coeffs.size() != 0) c += p.linear_objective.coeffs;
  for (std::size_t cb = 0; cb < blocks_.size(); ++cb) {
    const double l0 = lambda(static_cast<Eigen::Index>(offsets_[cb]));
    const auto& terms = blocks_[cb].spec.terms;
    for (std::size_t m = 0; m < terms.size(); ++m) {
      const auto i = static_cast<Eigen::Index>(term_offsets_[cb] + m);
      const double lm = lambda(static_cast<Eigen::Index>(offsets_[cb] + 1 + m));
      c += (l0 * u(i) * u(i) - lm) * terms[m].denominator + lm * terms[m].numerator;
    }
  }
  for (std::size_t l = 0; l < p.linear_constraints.size(); ++l) {
    c += lambda(static_cast<Eigen::Index>(linear_offset_ + l)) * p.linear_constraints[l].coeffs;
  }
  return c;
}

Eigen::VectorXd BiconvexGame::u_gradient(const Eigen::VectorXd& rates, const Eigen::VectorXd& u,
                                         const Eigen::VectorXd& xi,
                                         const Eigen::VectorXd& lambda) const {
  Eigen::VectorXd g(static_cast<Eigen::Index>(num_terms_));
  for (std::size_t cb = 0; cb < blocks_.size(); ++cb) {
    const double l0 = lambda(static_cast<Eigen::Index>(offsets_[cb]));
    const auto& terms = blocks_[cb].spec.terms;
    for (std::size_t m = 0; m < terms.size(); ++m) {
      const auto i = static_cast<Eigen::Index>(term_offsets_[cb] + m);
      const double b = terms[m].denominator.dot(rates);
      g(i) = l0 * (2.0 * u(i) * b - 2.0 * std::sqrt(std::max(0.0, xi(i))));
    }
  }
  return g;
}

double BiconvexGame::epigraph_gradient(const Eigen::VectorXd& lambda) const {
  if (!epigraph_block_) return 0.0;
  return 1.0 - lambda(static_cast<Eigen::Index>(offsets_[*epigraph_block_]));
}

Eigen::VectorXd BiconvexGame::lambda_gradient(const Eigen::VectorXd& rates,
                                              const std::vector<bool>& present,
                                              const Eigen::VectorXd& u, const Eigen::VectorXd& xi,
                                              double e) const {
  const auto& p = *problem_;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_multipliers()));
  for (std::size_t cb = 0; cb < blocks_.size(); ++cb) {
    const auto& blk = blocks_[cb];
    const auto base = offsets_[cb];
    double sum = 0.0;
    bool complete = true;
    for (std::size_t m = 0; m < blk.spec.terms.size(); ++m) {
      const auto i = static_cast<Eigen::Index>(term_offsets_[cb] + m);
      const auto& t = blk.spec.terms[m];
      const bool ok = rates_present(t.numerator, present) && rates_present(t.denominator, present);
      complete = complete && ok;
      const double b = t.denominator.dot(rates);
      sum += phi(b, xi(i), u(i));
      if (ok) g(static_cast<Eigen::Index>(base + 1 + m)) = xi(i) - b + t.numerator.dot(rates);
    }
    if (complete) g(static_cast<Eigen::Index>(base)) = sum - (blk.epigraph ? e : blk.spec.threshold);
  }
  for (std::size_t l = 0; l < p.linear_constraints.size(); ++l) {
    const auto& f = p.linear_constraints[l];
    if (rates_present(f.coeffs, present)) g(static_cast<Eigen::Index>(linear_offset_ + l)) = f.value(rates);
  }
  return g;
}

double BiconvexGame::lagrangian(const Eigen::VectorXd& rates, const Eigen::VectorXd& u,
                                const Eigen::VectorXd& xi, double e,
                                const Eigen::VectorXd& lambda) const {
  double v = linear_value(problem_->linear_objective, rates) + (has_epigraph() ? e : 0.0);
  v += lambda.dot(lambda_gradient(rates, {}, u, xi, e));
  return v;
}

}  // namespace rategame
