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

#include "rategame/surrogates.hpp"

#include <algorithm>
#include <numeric>

#include "rategame/errors.hpp"

namespace rategame {

double hinge_value(double margin, BoundSide side) {
  return side == BoundSide::kUpper ? std::max(0.0, 1.0 + margin) : std::min(1.0, margin);
}

double hinge_slope(double margin, BoundSide side) {
  if (side == BoundSide::kUpper) return 1.0 + margin > 0.0 ? 1.0 : 0.0;
  return margin <= 1.0 ? 1.0 : 0.0;
}

namespace {

std::vector<std::size_t> full_range(std::size_t n) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return all;
}

}  // namespace

double surrogate_value(const LinearModel& model, const SurrogateRate& rate, const Dataset& ds,
                       std::span<const std::size_t> batch) {
  const auto all = batch.empty() ? full_range(ds.size()) : std::vector<std::size_t>{};
  const auto rows = batch.empty() ? std::span<const std::size_t>(all) : batch;
  double total = 0.0;
  std::size_t count = 0;
  for (auto i : rows) {
    if (!rate.base.selector.matches(ds, i)) continue;
    const double s = model.score(ds.features().row(static_cast<Eigen::Index>(i)).transpose(),
                                 ds.groups()[i]);
    total += hinge_value(target_sign(rate.base, ds.labels()[i]) * s, rate.side);
    ++count;
  }
  if (count == 0) {
    throw EvaluationError("surrogate for '" + rate.base.name + "': selector " +
                          rate.base.selector.describe() + " matches no example");
  }
  return total / static_cast<double>(count);
}

Eigen::VectorXd surrogate_subgrad(const LinearModel& model, const SurrogateRate& rate,
                                  const Dataset& ds, std::span<const std::size_t> batch) {
  const auto all = batch.empty() ? full_range(ds.size()) : std::vector<std::size_t>{};
  const auto rows = batch.empty() ? std::span<const std::size_t>(all) : batch;
  const auto d = ds.dim();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d + 1);
  std::size_t count = 0;
  for (auto i : rows) {
    if (!rate.base.selector.matches(ds, i)) continue;
    const auto x = ds.features().row(static_cast<Eigen::Index>(i)).transpose();
    const int group = ds.groups()[i];
    const double t = target_sign(rate.base, ds.labels()[i]);
    const double m = t * model.score(x, group);
    const double coef = hinge_slope(m, rate.side) * t * model.adjustment(group).scale;
    if (coef != 0.0) {
      g.head(d) += coef * x;
      g(d) += coef;
    }
    ++count;
  }
  if (count == 0) {
    throw EvaluationError("surrogate for '" + rate.base.name + "': selector " +
                          rate.base.selector.describe() + " matches no example");
  }
  return g / static_cast<double>(count);
}

std::vector<BoundSide> sides_for_coefficients(const Eigen::VectorXd& coeffs) {
  std::vector<BoundSide> sides(static_cast<std::size_t>(coeffs.size()));
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    sides[static_cast<std::size_t>(k)] = side_for_coefficient(coeffs(k));
  }
  return sides;
}

SurrogateEvaluation weighted_surrogate(const RateEvaluator& ev, const Eigen::VectorXd& params,
                                       const Eigen::VectorXd& coeffs,
                                       std::span<const BoundSide> sides,
                                       std::span<const std::size_t> batch) {
  const auto& ds = ev.dataset();
  const auto d = ds.dim();
  const auto K = ev.num_rates();
  if (params.size() != d + 1) throw ConfigError("parameter vector has the wrong dimension");
  if (coeffs.size() != static_cast<Eigen::Index>(K) || sides.size() != K) {
    throw ConfigError("one coefficient and one side per rate are required");
  }
  const auto all = batch.empty() ? full_range(ds.size()) : std::vector<std::size_t>{};
  const auto rows = batch.empty() ? std::span<const std::size_t>(all) : batch;
  const auto n = static_cast<Eigen::Index>(rows.size());

  const auto w = params.head(d);
  const double b = params(d);
  Eigen::VectorXd scores(n);
  if (batch.empty()) {
    scores = ds.features() * w;
  } else {
    for (Eigen::Index r = 0; r < n; ++r) {
      scores(r) = ds.features().row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)])).dot(w);
    }
  }
  scores.array() += b;

  std::vector<std::size_t> count(K, 0);
  for (auto i : rows) {
    for (const auto& [k, pos] : ev.memberships(i)) ++count[k];
  }

  SurrogateEvaluation out;
  out.surrogates = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K));
  out.rates = ev.rates_from_scores(scores, rows);
  Eigen::VectorXd example_coef = Eigen::VectorXd::Zero(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto i = rows[static_cast<std::size_t>(r)];
    for (const auto& [k, pos] : ev.memberships(i)) {
      const double t = ev.targets(k)[pos];
      const double m = t * scores(r);
      const double inv = 1.0 / static_cast<double>(count[k]);
      out.surrogates(static_cast<Eigen::Index>(k)) += inv * hinge_value(m, sides[k]);
      const double c = coeffs(static_cast<Eigen::Index>(k));
      if (c != 0.0) example_coef(r) += c * inv * hinge_slope(m, sides[k]) * t;
    }
  }
  out.value = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (count[k] > 0) out.value += coeffs(static_cast<Eigen::Index>(k)) * out.surrogates(static_cast<Eigen::Index>(k));
  }

  out.gradient = Eigen::VectorXd::Zero(d + 1);
  if (batch.empty()) {
    out.gradient.head(d) = ds.features().transpose() * example_coef;
  } else {
    for (Eigen::Index r = 0; r < n; ++r) {
      if (example_coef(r) == 0.0) continue;
      out.gradient.head(d) +=
          example_coef(r) *
          ds.features().row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)])).transpose();
    }
  }
  out.gradient(d) = example_coef.sum();
  return out;
}

}  // namespace rategame
