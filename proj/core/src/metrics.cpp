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

#include "rategame/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rategame/errors.hpp"

namespace rategame {

MetricKind parse_metric_kind(std::string_view name) {
  if (name == "gmean") return MetricKind::kGMean;
  if (name == "hmean") return MetricKind::kHMean;
  if (name == "qmean") return MetricKind::kQMean;
  if (name == "kld") return MetricKind::kKld;
  if (name == "fmeasure") return MetricKind::kFMeasure;
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

std::string_view metric_kind_name(MetricKind kind) {
  switch (kind) {
    case MetricKind::kGMean:
      return "gmean";
    case MetricKind::kHMean:
      return "hmean";
    case MetricKind::kQMean:
      return "qmean";
    case MetricKind::kKld:
      return "kld";
    case MetricKind::kFMeasure:
      return "fmeasure";
  }
  return "unknown";
}

namespace {

double xlogx_ratio(double a, double z) { return a > 0.0 ? a * std::log(a / z) : 0.0; }

MetricSpec gmean(double floor) {
  MetricSpec m;
  m.kind = MetricKind::kGMean;
  m.name = "gmean";
  m.senses = {Sense::kDecreasing, Sense::kDecreasing};
  m.lipschitz = 0.5 * (1.0 / std::sqrt(floor) + std::sqrt(floor));
  m.value = [](const Eigen::VectorXd& z) { return 1.0 - std::sqrt(z(0) * z(1)); };
  m.gradient = [](const Eigen::VectorXd& z) {
    Eigen::VectorXd g(2);
    g << -0.5 * std::sqrt(z(1) / z(0)), -0.5 * std::sqrt(z(0) / z(1));
    return g;
  };
  return m;
}

MetricSpec hmean() {
  MetricSpec m;
  m.kind = MetricKind::kHMean;
  m.name = "hmean";
  m.senses = {Sense::kDecreasing, Sense::kDecreasing};
  m.lipschitz = 2.0;
  m.value = [](const Eigen::VectorXd& z) { return 1.0 - 2.0 * z(0) * z(1) / (z(0) + z(1)); };
  m.gradient = [](const Eigen::VectorXd& z) {
    const double s2 = (z(0) + z(1)) * (z(0) + z(1));
    Eigen::VectorXd g(2);
    g << -2.0 * z(1) * z(1) / s2, -2.0 * z(0) * z(0) / s2;
    return g;
  };
  return m;
}

MetricSpec qmean() {
  MetricSpec m;
  m.kind = MetricKind::kQMean;
  m.name = "qmean";
  m.senses = {Sense::kIncreasing, Sense::kIncreasing};
  m.lipschitz = std::sqrt(2.0);
  m.value = [](const Eigen::VectorXd& z) { return std::hypot(z(0), z(1)); };
  m.gradient = [](const Eigen::VectorXd& z) {
    const double n = std::hypot(z(0), z(1));
    Eigen::VectorXd g(2);
    if (n == 0.0) {
      g.setZero();
    } else {
      g << z(0) / n, z(1) / n;
    }
    return g;
  };
  return m;
}

MetricSpec kld(double p, double floor, double eps) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("kld needs p in [0, 1]");
  MetricSpec m;
  m.kind = MetricKind::kKld;
  m.name = "kld";
  m.senses = {Sense::kDecreasing, Sense::kDecreasing};
  m.lipschitz = 1.0 / floor;
  m.value = [p](const Eigen::VectorXd& z) {
    return xlogx_ratio(p, z(0)) + xlogx_ratio(1.0 - p, z(1));
  };
  m.gradient = [p](const Eigen::VectorXd& z) {
    Eigen::VectorXd g(2);
    g << -p / z(0), -(1.0 - p) / z(1);
    return g;
  };
  m.analytic_best_response = [p, floor, eps](double weight, const Eigen::VectorXd& c) {
    const double mass[2] = {p, 1.0 - p};
    Eigen::VectorXd xi(2);
    for (int k = 0; k < 2; ++k) {
      const double x = c(k) > 0.0 ? weight * mass[k] / (c(k) + eps) : 1.0;
      xi(k) = std::clamp(x, floor, 1.0);
    }
    return xi;
  };
  return m;
}

MetricSpec fmeasure(double floor) {
  MetricSpec m;
  m.kind = MetricKind::kFMeasure;
  m.name = "fmeasure";
  m.senses = {Sense::kDecreasing, Sense::kIncreasing, Sense::kIncreasing};
  m.lipschitz = 1.0 / (2.0 * floor);
  m.pseudo_convex = true;
  m.value = [](const Eigen::VectorXd& z) {
    return 1.0 - 2.0 * z(0) / (2.0 * z(0) + z(1) + z(2));
  };
  m.gradient = [](const Eigen::VectorXd& z) {
    const double d = 2.0 * z(0) + z(1) + z(2);
    const double d2 = d * d;
    Eigen::VectorXd g(3);
    g << -2.0 * (z(1) + z(2)) / d2, 2.0 * z(0) / d2, 2.0 * z(0) / d2;
    return g;
  };
  return m;
}

bool in_box(const Eigen::VectorXd& xi, double floor) {
  constexpr double kSlack = 1e-12;
  return (xi.array() >= floor - kSlack).all() && (xi.array() <= 1.0 + kSlack).all();
}

Eigen::VectorXd clamp_box(const Eigen::VectorXd& v, double floor) {
  return v.cwiseMax(floor).cwiseMin(1.0);
}

Eigen::VectorXd gather(const Eigen::VectorXd& xi, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = xi(idx[i]);
  return out;
}

double objective(std::span<const XiTerm> terms, const Eigen::VectorXd& linear,
                 const Eigen::VectorXd& xi) {
  double f = linear.dot(xi);
  for (const auto& t : terms) {
    if (t.weight != 0.0) f += t.weight * t.metric->value(gather(xi, t.indices));
  }
  return f;
}

Eigen::VectorXd objective_grad(std::span<const XiTerm> terms, const Eigen::VectorXd& linear,
                               const Eigen::VectorXd& xi) {
  Eigen::VectorXd g = linear;
  for (const auto& t : terms) {
    if (t.weight == 0.0) continue;
    const Eigen::VectorXd tg = t.metric->gradient(gather(xi, t.indices));
    for (std::size_t i = 0; i < t.indices.size(); ++i) {
      g(t.indices[i]) += t.weight * tg(static_cast<Eigen::Index>(i));
    }
  }
  return g;
}

// Projected gradient with Armijo backtracking from a unit step.
Eigen::VectorXd projected_gradient(std::span<const XiTerm> terms, const Eigen::VectorXd& linear,
                                   double floor, const BestResponseOptions& options,
                                   Eigen::VectorXd x) {
  constexpr double kArmijo = 1e-4;
  double fx = objective(terms, linear, x);
  for (int step = 0; step < options.max_steps; ++step) {
    const Eigen::VectorXd g = objective_grad(terms, linear, x);
    const Eigen::VectorXd unit = clamp_box(x - g, floor);
    if ((unit - x).lpNorm<Eigen::Infinity>() <= options.tolerance) break;
    double t = 1.0;
    Eigen::VectorXd next = unit;
    double fn = objective(terms, linear, next);
    int halvings = 0;
    while (fn > fx + kArmijo * g.dot(next - x) && halvings < 60) {
      t *= 0.5;
      next = clamp_box(x - t * g, floor);
      fn = objective(terms, linear, next);
      ++halvings;
    }
    if (fn > fx) break;
    const double moved = (next - x).lpNorm<Eigen::Infinity>();
    x = std::move(next);
    fx = fn;
    if (moved <= options.tolerance * 1e-3) break;
  }
  return x;
}

}  // namespace

MetricSpec build_metric(MetricKind kind, const MetricParams& params) {
  if (!(params.domain_floor > 0.0 && params.domain_floor < 1.0)) {
    throw ConfigError("domain floor must lie in (0, 1)");
  }
  MetricSpec m;
  switch (kind) {
    case MetricKind::kGMean:
      m = gmean(params.domain_floor);
      break;
    case MetricKind::kHMean:
      m = hmean();
      break;
    case MetricKind::kQMean:
      m = qmean();
      break;
    case MetricKind::kKld:
      if (!params.p) throw ConfigError("kld metric requires the positive proportion p");
      m = kld(*params.p, params.domain_floor, params.kld_epsilon);
      break;
    case MetricKind::kFMeasure:
      m = fmeasure(params.domain_floor);
      break;
  }
  m.domain_floor = params.domain_floor;
  return m;
}

MetricSpec build_metric(std::string_view kind, const MetricParams& params) {
  return build_metric(parse_metric_kind(kind), params);
}

void require_convex(const MetricSpec& metric, std::string_view context) {
  if (metric.pseudo_convex) {
    throw ConfigError("metric '" + metric.name + "' is not convex and cannot be used with " +
                      std::string(context));
  }
}

Eigen::VectorXd psi_grad(const MetricSpec& metric, const Eigen::VectorXd& xi) {
  if (static_cast<std::size_t>(xi.size()) != metric.size()) {
    throw DomainError(metric.name + ": expected " + std::to_string(metric.size()) +
                      " coordinates");
  }
  if (!in_box(xi, metric.domain_floor)) {
    throw DomainError(metric.name + ": argument outside [" + std::to_string(metric.domain_floor) +
                      ", 1]^K");
  }
  return metric.gradient(xi);
}

double value_clamped(const MetricSpec& metric, const Eigen::VectorXd& z) {
  return metric.value(clamp_box(z, metric.domain_floor));
}

double best_response_objective(std::span<const XiTerm> terms, const Eigen::VectorXd& linear,
                               const Eigen::VectorXd& xi) {
  return objective(terms, linear, xi);
}

Eigen::VectorXd best_response_xi(std::span<const XiTerm> terms, const Eigen::VectorXd& linear,
                                 double floor, const BestResponseOptions& options,
                                 const std::optional<Eigen::VectorXd>& start) {
  const auto n = linear.size();
  if (!terms.empty() &&
      std::all_of(terms.begin(), terms.end(), [](const XiTerm& t) { return t.weight == 0.0; })) {
    throw OptimizationError("unbounded best response: every constraint multiplier is zero");
  }
  for (const auto& t : terms) {
    if (t.weight < 0.0) throw ConfigError("best response term weight must be non-negative");
    for (int i : t.indices) {
      if (i < 0 || i >= n) throw ConfigError("best response term index out of range");
    }
  }

  // Coordinates touched by more than one term force a joint solve.
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  bool disjoint = true;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    if (terms[j].weight == 0.0) continue;
    for (int i : terms[j].indices) {
      if (owner[static_cast<std::size_t>(i)] >= 0) disjoint = false;
      owner[static_cast<std::size_t>(i)] = static_cast<int>(j);
    }
  }

  Eigen::VectorXd x0 = start ? clamp_box(*start, floor)
                             : Eigen::VectorXd::Constant(n, 0.5 * (floor + 1.0));
  if (!disjoint) return projected_gradient(terms, linear, floor, options, x0);

  Eigen::VectorXd xi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (owner[static_cast<std::size_t>(i)] < 0) xi(i) = linear(i) > 0.0 ? floor : 1.0;
  }
  for (const auto& t : terms) {
    if (t.weight == 0.0) continue;
    const Eigen::VectorXd c = gather(linear, t.indices);
    Eigen::VectorXd sub;
    if (t.metric->analytic_best_response) {
      sub = clamp_box(t.metric->analytic_best_response(t.weight, c), floor);
    } else {
      std::vector<int> local(t.indices.size());
      for (std::size_t i = 0; i < local.size(); ++i) local[i] = static_cast<int>(i);
      const XiTerm one{t.metric, t.weight, local};
      sub = projected_gradient(std::span<const XiTerm>(&one, 1), c, floor, options,
                               gather(x0, t.indices));
    }
    for (std::size_t i = 0; i < t.indices.size(); ++i) {
      xi(t.indices[i]) = sub(static_cast<Eigen::Index>(i));
    }
  }
  return xi;
}

Eigen::VectorXd best_response_xi(const MetricSpec& metric, const Eigen::VectorXd& lambda_rate,
                                 const BestResponseOptions& options) {
  const auto K = static_cast<Eigen::Index>(metric.size());
  if (lambda_rate.size() != K) throw ConfigError("lambda size does not match the metric");
  if ((lambda_rate.array() < 0.0).any()) throw ConfigError("lambda must be non-negative");
  Eigen::VectorXd linear(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    linear(k) = -sense_sign(metric.senses[static_cast<std::size_t>(k)]) * lambda_rate(k);
  }
  std::vector<int> idx(static_cast<std::size_t>(K));
  for (Eigen::Index k = 0; k < K; ++k) idx[static_cast<std::size_t>(k)] = static_cast<int>(k);
  const XiTerm term{&metric, 1.0, idx};
  return best_response_xi(std::span<const XiTerm>(&term, 1), linear, metric.domain_floor, options);
}

Eigen::VectorXd best_response_xi(std::span<const ConstraintSpec> constraints,
                                 const Eigen::VectorXd& constraint_multipliers,
                                 const Eigen::VectorXd& lambda_rate,
                                 const BestResponseOptions& options) {
  if (constraints.empty()) throw ConfigError("constrained best response needs a constraint");
  if (constraint_multipliers.size() != static_cast<Eigen::Index>(constraints.size())) {
    throw ConfigError("one multiplier per constraint is required");
  }
  const auto K = static_cast<Eigen::Index>(constraints.front().metric.size());
  if (lambda_rate.size() != K) throw ConfigError("lambda size does not match the constraints");
  std::vector<int> idx(static_cast<std::size_t>(K));
  for (Eigen::Index k = 0; k < K; ++k) idx[static_cast<std::size_t>(k)] = static_cast<int>(k);
  std::vector<XiTerm> terms;
  double floor = 0.0;
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    const auto& m = constraints[j].metric;
    if (static_cast<Eigen::Index>(m.size()) != K) {
      throw ConfigError("constraints must share the same rate coordinates");
    }
    if (constraint_multipliers(static_cast<Eigen::Index>(j)) < 0.0) {
      throw ConfigError("constraint multipliers must be non-negative");
    }
    terms.push_back(XiTerm{&m, constraint_multipliers(static_cast<Eigen::Index>(j)), idx});
    floor = std::max(floor, m.domain_floor);
  }
  const auto& senses = constraints.front().metric.senses;
  Eigen::VectorXd linear(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    linear(k) = -sense_sign(senses[static_cast<std::size_t>(k)]) * lambda_rate(k);
  }
  return best_response_xi(terms, linear, floor, options);
}

}  // namespace rategame
