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


#include "rategame/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "rategame/errors.hpp"
#include "rategame/lagrangian.hpp"
#include "rategame/projections.hpp"
#include "rategame/random.hpp"
#include "rategame/surrogates.hpp"

namespace rategame {

namespace {

constexpr int kWarmupSamples = 50;

Eigen::VectorXd clip_gradient(const Eigen::VectorXd& g, double cap, int* clipped) {
  if (!g.allFinite()) throw OptimizationError("non-finite gradient encountered");
  const double n = g.norm();
  if (n <= cap) return g;
  ++*clipped;
  return g * (cap / n);
}

/// Projected descent on a vector with either plain steps or Adam.
class DescentPlayer {
 public:
  using Projection = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  DescentPlayer(Eigen::VectorXd init, double eta, UpdateRule rule, Projection project)
      : x_(project(init)), eta_(eta), rule_(rule), adam_(init.size()), project_(std::move(project)) {}

  void step(const Eigen::VectorXd& grad) {
    if (eta_ == 0.0) return;
    const Eigen::VectorXd dir = rule_ == UpdateRule::kAdam ? adam_.direction(grad) : grad;
    x_ = project_(x_ - eta_ * dir);
  }
  const Eigen::VectorXd& value() const { return x_; }

 private:
  Eigen::VectorXd x_;
  double eta_;
  UpdateRule rule_;
  AdamState adam_;
  Projection project_;
};

/// Projected ascent on {lambda >= floor, ||lambda||_1 <= kappa}.
class MultiplierPlayer {
 public:
  MultiplierPlayer(Eigen::VectorXd init, Eigen::VectorXd floor, double kappa, double eta)
      : floor_(std::move(floor)), kappa_(kappa), eta_(eta) {
    if (floor_.sum() > kappa_ + 1e-12) {
      throw ConfigError("multiplier floors sum to " + std::to_string(floor_.sum()) +
                        ", above the radius " + std::to_string(kappa_));
    }
    lambda_ = project(init);
  }
  void step(const Eigen::VectorXd& grad) {
    if (eta_ == 0.0) return;
    lambda_ = project(lambda_ + eta_ * grad);
  }
  Eigen::VectorXd project(const Eigen::VectorXd& v) const {
    if (floor_.sum() >= kappa_) return floor_;
    return project_floored_l1_ball(v, floor_, kappa_);
  }
  const Eigen::VectorXd& value() const { return lambda_; }

 private:
  Eigen::VectorXd lambda_;
  Eigen::VectorXd floor_;
  double kappa_;
  double eta_;
};

class Batcher {
 public:
  Batcher(std::size_t n, std::size_t size, std::uint64_t seed)
      : n_(n), size_(size), rng_(seed) {}
  std::vector<std::size_t> next() {
    if (size_ == 0) return {};
    return sample_batch(n_, size_, rng_);
  }

 private:
  std::size_t n_;
  std::size_t size_;
  Rng rng_;
};

Eigen::VectorXd initial_params(const OgdConfig& cfg, const Dataset& train) {
  const auto n = static_cast<Eigen::Index>(train.dim() + 1);
  if (!cfg.theta_init) return Eigen::VectorXd::Zero(n);
  if (cfg.theta_init->size() != n) {
    throw ConfigError("theta_init has " + std::to_string(cfg.theta_init->size()) +
                      " entries, expected " + std::to_string(n));
  }
  return project_l2_ball(*cfg.theta_init, cfg.norm_bound);
}

class Recorder {
 public:
  Recorder(const ProblemSpec& p, const RateEvaluator& ev, const OgdConfig& cfg, Algorithm alg,
           const StepSizes& steps)
      : p_(p), ev_(ev), every_(cfg.snapshot_every), T_(cfg.iterations) {
    trace_.algorithm = std::string(algorithm_name(alg));
    trace_.norm_bound = cfg.norm_bound;
    trace_.rate_names = p.rate_names();
    trace_.constraint_names = p.constraint_names();
    trace_.metadata = {{"iterations", cfg.iterations},
                       {"eta_theta", steps.eta_theta},
                       {"eta_lambda", steps.eta_lambda},
                       {"eta_aux", steps.eta_aux},
                       {"kappa", steps.kappa},
                       {"lambda_floor", cfg.lambda_floor},
                       {"batch_size", cfg.batch_size},
                       {"snapshot_every", cfg.snapshot_every},
                       {"seed", cfg.seed},
                       {"rule", std::string(update_rule_name(cfg.rule))}};
  }

  bool due(int t) const { return (t + 1) % every_ == 0 || t == T_ - 1; }

  void record(int t, const LinearModel& model, const Eigen::VectorXd& lambda,
              std::map<std::string, Eigen::VectorXd> aux) {
    Snapshot s;
    s.iteration = t;
    s.model = model;
    s.lambda = lambda;
    s.aux = std::move(aux);
    s.rates = ev_.evaluate(model);
    const auto e = p_.evaluate(s.rates);
    s.objective = e.objective;
    s.violations = e.violations;
    trace_.snapshots.push_back(std::move(s));
  }

  Trace finish(int clipped) {
    trace_.metadata["clipped_gradients"] = clipped;
    if (clipped > 0) {
      spdlog::warn("{}: gradient clipped at {} iterations", trace_.algorithm, clipped);
    }
    return std::move(trace_);
  }

  nlohmann::json& metadata() { return trace_.metadata; }

 private:
  const ProblemSpec& p_;
  const RateEvaluator& ev_;
  int every_;
  int T_;
  Trace trace_;
};

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

std::vector<BoundSide> default_sides(const ProblemSpec& p) {
  std::vector<BoundSide> sides;
  for (const auto& r : p.rates) sides.push_back(default_side(r.sense));
  return sides;
}

/// kappa * Dirichlet(1) draw.
Eigen::VectorXd random_multipliers(std::size_t n, double kappa, Rng& rng) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double u = uniform_unit(rng);
    while (u <= 0.0) u = uniform_unit(rng);
    v(i) = -std::log(u);
  }
  if (v.size() > 0) v *= kappa / v.sum();
  return v;
}

double default_kappa(const ProblemSpec& p, const OgdConfig& cfg) {
  if (cfg.kappa) return *cfg.kappa;
  if (p.mode() == ProblemMode::kP1) {
    double L = 0.0;
    for (const auto& t : p.objective_terms) L += t.metric.lipschitz;
    return L > 0.0 ? L : 1.0;
  }
  return std::pow(static_cast<double>(cfg.iterations), cfg.omega);
}

/// Per-player gradient norms at one multiplier draw.
struct ProbeNorms {
  double theta = 0.0;
  double lambda = 0.0;
  double aux = 0.0;
};

void check_ratio_algorithm(const ProblemSpec& p, std::string_view name) {
  p.validate();
  if (p.mode() != ProblemMode::kP3) {
    throw ConfigError(std::string(name) + " requires a sum-of-ratios objective or constraint");
  }
}

bool has_signed_terms(const ProblemSpec& p) {
  auto any = [](const SumOfRatiosSpec& s) {
    return std::any_of(s.terms.begin(), s.terms.end(), [](const RatioTerm& t) { return t.sign < 0; });
  };
  if (p.ratio_objective && any(*p.ratio_objective)) return true;
  return std::any_of(p.ratio_constraints.begin(), p.ratio_constraints.end(), any);
}

/// Stores the best known value of every rate for minibatch estimates.
void refresh(Eigen::VectorXd* known, const RateEstimate& est) {
  for (Eigen::Index k = 0; k < known->size(); ++k) {
    if (est.present[static_cast<std::size_t>(k)]) (*known)(k) = est.values(k);
  }
}

}  // namespace

Algorithm parse_algorithm(std::string_view name) {
  if (name == "alg1" || name == "oracle") return Algorithm::kOracle;
  if (name == "alg2" || name == "surrogate") return Algorithm::kSurrogate;
  if (name == "spade+" || name == "spade_plus") return Algorithm::kSpadePlus;
  if (name == "alg3" || name == "slack-ratios") return Algorithm::kSlackRatios;
  if (name == "alg4" || name == "biconvex") return Algorithm::kBiconvex;
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kOracle: return "alg1";
    case Algorithm::kSurrogate: return "alg2";
    case Algorithm::kSpadePlus: return "spade+";
    case Algorithm::kSlackRatios: return "alg3";
    case Algorithm::kBiconvex: return "alg4";
  }
  return "unknown";
}

void OgdConfig::validate() const {
  if (iterations <= 0) throw ConfigError("iterations must be positive");
  if (snapshot_every <= 0) throw ConfigError("snapshot_every must be positive");
  if (snapshot_every > iterations) throw ConfigError("snapshot_every exceeds the iteration count");
  auto nonneg = [](const std::optional<double>& v, const char* name) {
    if (v && !(std::isfinite(*v) && *v >= 0.0)) {
      throw ConfigError(std::string(name) + " must be finite and non-negative");
    }
  };
  nonneg(eta_theta, "eta_theta");
  nonneg(eta_lambda, "eta_lambda");
  nonneg(eta_aux, "eta_aux");
  nonneg(kappa, "kappa");
  if (!(lambda_floor >= 0.0)) throw ConfigError("lambda_floor must be non-negative");
  if (!(norm_bound > 0.0)) throw ConfigError("norm_bound must be positive");
  if (!(gradient_clip > 0.0)) throw ConfigError("gradient_clip must be positive");
  if (!(omega >= 0.0)) throw ConfigError("omega must be non-negative");
}

StepSizes suggest_step_sizes(const ProblemSpec& p, Algorithm algorithm, const OgdConfig& cfg,
                             const Dataset& train) {
  cfg.validate();
  StepSizes out;
  out.kappa = default_kappa(p, cfg);
  const bool need = !cfg.eta_theta || !cfg.eta_lambda || !cfg.eta_aux;
  double B_theta = 0.0;
  double B_lambda = 0.0;
  double B_aux = 0.0;
  double aux_diameter = 1.0;
  if (need) {
    const RateEvaluator ev(train, p.rates);
    const Eigen::VectorXd theta0 = initial_params(cfg, train);
    const Eigen::VectorXd R0 = ev.evaluate(LinearModel::from_params(theta0, cfg.norm_bound));
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::function<ProbeNorms(const Eigen::VectorXd&)> probe;
    std::size_t num_multipliers = 0;
    Eigen::VectorXd floor;

    auto theta_norm = [&](const Eigen::VectorXd& c, std::span<const BoundSide> sides) {
      return weighted_surrogate(ev, theta0, c, sides).gradient.norm();
    };
    std::optional<ConvexGame> convex;
    std::optional<SlackRatiosGame> ratios;
    std::optional<BiconvexGame> biconvex;
    switch (algorithm) {
      case Algorithm::kOracle:
      case Algorithm::kSurrogate:
      case Algorithm::kSpadePlus: {
        convex.emplace(p);
        num_multipliers = convex->num_multipliers();
        floor = convex->multiplier_floor(cfg.lambda_floor);
        const auto dsides = default_sides(p);
        probe = [&, dsides](const Eigen::VectorXd& lambda) {
          ProbeNorms n;
          const Eigen::VectorXd xi = convex->best_response(lambda, cfg.best_response);
          n.lambda = convex->lambda_gradient(R0, xi).norm();
          if (algorithm != Algorithm::kOracle) {
            const Eigen::VectorXd c = convex->theta_coefficients(lambda);
            n.theta = algorithm == Algorithm::kSpadePlus ? theta_norm(c, dsides)
                                                         : theta_norm(c, sides_for_coefficients(c));
          }
          return n;
        };
        break;
      }
      case Algorithm::kSlackRatios: {
        ratios.emplace(p);
        num_multipliers = ratios->num_multipliers();
        floor = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_multipliers));
        aux_diameter = (ratios->upper() - ratios->lower()) *
                       std::sqrt(2.0 * static_cast<double>(ratios->num_terms()));
        probe = [&](const Eigen::VectorXd& lambda) {
          ProbeNorms n;
          Eigen::VectorXd a, b, ga, gb;
          double ge = 0.0;
          ratios->initial_slacks(R0, &a, &b);
          const double e = std::clamp(p.ratio_objective ? p.ratio_objective->value(R0) : 0.0,
                                      ratios->epigraph_lower(), ratios->epigraph_upper());
          n.lambda = ratios->lambda_gradient(R0, {}, a, b, e).norm();
          ratios->aux_gradient(a, b, lambda, &ga, &gb, &ge);
          n.aux = std::sqrt(ga.squaredNorm() + gb.squaredNorm());
          const Eigen::VectorXd c = ratios->theta_coefficients(lambda);
          n.theta = theta_norm(c, sides_for_coefficients(c));
          return n;
        };
        break;
      }
      case Algorithm::kBiconvex: {
        biconvex.emplace(p);
        num_multipliers = biconvex->num_multipliers();
        floor = biconvex->multiplier_floor(cfg.lambda_floor);
        aux_diameter = biconvex->u_upper() * std::sqrt(static_cast<double>(biconvex->num_terms()));
        probe = [&](const Eigen::VectorXd& lambda) {
          ProbeNorms n;
          const Eigen::VectorXd u =
              Eigen::VectorXd::Constant(static_cast<Eigen::Index>(biconvex->num_terms()),
                                        0.5 * biconvex->u_upper());
          const Eigen::VectorXd xi = biconvex->xi_update(u, lambda);
          n.lambda = biconvex->lambda_gradient(R0, {}, u, xi, 0.0).norm();
          n.aux = biconvex->u_gradient(R0, u, xi, lambda).norm();
          const Eigen::VectorXd c = biconvex->theta_coefficients(u, lambda);
          n.theta = theta_norm(c, sides_for_coefficients(c));
          return n;
        };
        break;
      }
    }
    for (int s = 0; s < kWarmupSamples; ++s) {
      Eigen::VectorXd lambda = random_multipliers(num_multipliers, out.kappa, rng);
      if (floor.sum() < out.kappa) {
        lambda = project_floored_l1_ball(lambda, floor, out.kappa);
      } else {
        lambda = floor;
      }
      const auto n = probe(lambda);
      B_theta = std::max(B_theta, n.theta);
      B_lambda = std::max(B_lambda, n.lambda);
      B_aux = std::max(B_aux, n.aux);
    }
  }
  const double T = static_cast<double>(cfg.iterations);
  constexpr double kTiny = 1e-8;
  out.eta_lambda = cfg.eta_lambda ? *cfg.eta_lambda
                                  : out.kappa / (std::max(B_lambda, kTiny) * std::sqrt(2.0 * T));
  out.eta_theta = cfg.eta_theta ? *cfg.eta_theta
                                : cfg.norm_bound / (std::max(B_theta, kTiny) * std::sqrt(T));
  out.eta_aux = cfg.eta_aux ? *cfg.eta_aux
                            : aux_diameter / (std::max(B_aux, kTiny) * std::sqrt(T));
  return out;
}

// ---------------------------------------------------------------------------

Trace run_oracle_game(const ProblemSpec& p, const CsoOracle& oracle, const OgdConfig& cfg,
                      const Dataset& train) {
  p.validate_convex("alg1");
  cfg.validate();
  const ConvexGame game(p);
  if (game.num_convex() > 0 && cfg.lambda_floor <= 0.0) {
    throw ConfigError("alg1 with convex constraints needs a positive lambda_floor");
  }
  const auto steps = suggest_step_sizes(p, Algorithm::kOracle, cfg, train);
  const RateEvaluator ev(train, p.rates);
  const Eigen::VectorXd floor = game.multiplier_floor(cfg.lambda_floor);
  MultiplierPlayer lam(floor, floor, steps.kappa, steps.eta_lambda);
  Recorder rec(p, ev, cfg, Algorithm::kOracle, steps);
  int clipped = 0;
  std::optional<Eigen::VectorXd> xi_prev;
  for (int t = 0; t < cfg.iterations; ++t) {
    const Eigen::VectorXd& lambda = lam.value();
    Eigen::VectorXd xi = game.best_response(lambda, cfg.best_response, xi_prev);
    const LinearModel theta = oracle.solve(game.theta_coefficients(lambda));
    const Eigen::VectorXd R = ev.evaluate(theta);
    const Eigen::VectorXd g = game.lambda_gradient(R, xi);
    if (rec.due(t)) rec.record(t, theta, lambda, {{"xi", xi}});
    lam.step(clip_gradient(g, cfg.gradient_clip, &clipped));
    xi_prev = std::move(xi);
  }
  return rec.finish(clipped);
}

namespace {

/// Shared loop of the surrogate optimizer and SPADE+.
Trace surrogate_loop(const ProblemSpec& p, const OgdConfig& cfg, const Dataset& train,
                     Algorithm alg, Eigen::VectorXd* average) {
  p.validate_convex(algorithm_name(alg));
  cfg.validate();
  const ConvexGame game(p);
  if (game.num_convex() > 0 && cfg.lambda_floor <= 0.0) {
    throw ConfigError(std::string(algorithm_name(alg)) +
                      " with convex constraints needs a positive lambda_floor");
  }
  const auto steps = suggest_step_sizes(p, alg, cfg, train);
  const RateEvaluator ev(train, p.rates);
  const Eigen::VectorXd floor = game.multiplier_floor(cfg.lambda_floor);
  MultiplierPlayer lam(floor, floor, steps.kappa, steps.eta_lambda);
  const double bound = cfg.norm_bound;
  DescentPlayer theta(initial_params(cfg, train), steps.eta_theta, cfg.rule,
                      [bound](const Eigen::VectorXd& v) { return project_l2_ball(v, bound); });
  Batcher batcher(train.size(), cfg.batch_size, cfg.seed);
  Recorder rec(p, ev, cfg, alg, steps);
  const bool spade = alg == Algorithm::kSpadePlus;
  const auto dsides = default_sides(p);
  const double box_lo = game.domain_floor();
  std::vector<bool> in_slack(p.rates.size(), false);
  for (int r : game.slack_rates()) in_slack[static_cast<std::size_t>(r)] = true;
  int clipped = 0;
  int surrogate_clips = 0;
  if (average) *average = Eigen::VectorXd::Zero(theta.value().size());
  std::optional<Eigen::VectorXd> xi_prev;

  for (int t = 0; t < cfg.iterations; ++t) {
    const Eigen::VectorXd lambda = lam.value();
    Eigen::VectorXd xi = game.best_response(lambda, cfg.best_response, xi_prev);
    const Eigen::VectorXd c = game.theta_coefficients(lambda);
    const auto batch = batcher.next();
    const auto sides = spade ? dsides : sides_for_coefficients(c);
    const auto sev = weighted_surrogate(ev, theta.value(), c, sides, batch);
    Eigen::VectorXd g_lambda;
    if (spade) {
      Eigen::VectorXd rs = sev.surrogates;
      for (Eigen::Index k = 0; k < rs.size(); ++k) {
        const double lo = in_slack[static_cast<std::size_t>(k)] ? box_lo : 0.0;
        const double v = std::clamp(rs(k), lo, 1.0);
        if (v != rs(k)) ++surrogate_clips;
        rs(k) = v;
      }
      g_lambda = game.lambda_gradient(rs, sev.rates.present, xi);
    } else {
      g_lambda = game.lambda_gradient(sev.rates.values, sev.rates.present, xi);
    }
    if (rec.due(t)) {
      rec.record(t, LinearModel::from_params(theta.value(), bound), lambda, {{"xi", xi}});
    }
    theta.step(clip_gradient(sev.gradient, cfg.gradient_clip, &clipped));
    lam.step(clip_gradient(g_lambda, cfg.gradient_clip, &clipped));
    if (average) *average += theta.value();
    xi_prev = std::move(xi);
  }
  if (average) *average /= static_cast<double>(cfg.iterations);
  if (spade) {
    rec.metadata()["clipped_surrogate_rates"] = surrogate_clips;
    if (surrogate_clips > 0) {
      spdlog::warn("spade+: surrogate rates clipped into the metric domain {} times", surrogate_clips);
    }
  }
  return rec.finish(clipped);
}

}  // namespace

Trace run_surrogate_game(const ProblemSpec& p, const OgdConfig& cfg, const Dataset& train) {
  return surrogate_loop(p, cfg, train, Algorithm::kSurrogate, nullptr);
}

SpadeResult run_spade_plus(const ProblemSpec& p, const OgdConfig& cfg, const Dataset& train) {
  if (p.mode() == ProblemMode::kP1) throw ConfigError("spade+ expects a constrained problem");
  Eigen::VectorXd avg;
  Trace trace = surrogate_loop(p, cfg, train, Algorithm::kSpadePlus, &avg);
  LinearModel average = LinearModel::from_params(avg, cfg.norm_bound);
  trace.metadata["average_model"] = model_to_json(average);
  return SpadeResult{std::move(average), std::move(trace)};
}

Trace run_slack_ratios(const ProblemSpec& p, const OgdConfig& cfg, const Dataset& train) {
  check_ratio_algorithm(p, "alg3");
  cfg.validate();
  const SlackRatiosGame game(p);
  const auto steps = suggest_step_sizes(p, Algorithm::kSlackRatios, cfg, train);
  const RateEvaluator ev(train, p.rates);
  const Eigen::VectorXd floor = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(game.num_multipliers()));
  Eigen::VectorXd lambda0 = floor;
  if (auto i = game.epigraph_multiplier()) lambda0(static_cast<Eigen::Index>(*i)) = std::min(1.0, 0.5 * steps.kappa);
  MultiplierPlayer lam(lambda0, floor, steps.kappa, steps.eta_lambda);

  const double bound = cfg.norm_bound;
  const Eigen::VectorXd theta0 = initial_params(cfg, train);
  DescentPlayer theta(theta0, steps.eta_theta, cfg.rule,
                      [bound](const Eigen::VectorXd& v) { return project_l2_ball(v, bound); });
  const Eigen::VectorXd R0 = ev.evaluate(LinearModel::from_params(theta.value(), bound));
  Eigen::VectorXd a0, b0;
  game.initial_slacks(R0, &a0, &b0);
  const double lo = game.lower();
  const double hi = game.upper();
  auto box = [lo, hi](const Eigen::VectorXd& v) { return project_box(v, lo, hi); };
  DescentPlayer a(a0, steps.eta_aux, cfg.rule, box);
  DescentPlayer b(b0, steps.eta_aux, cfg.rule, box);
  const double elo = game.epigraph_lower();
  const double ehi = game.epigraph_upper();
  const double e_init = p.ratio_objective ? p.ratio_objective->value(R0) : 0.0;
  DescentPlayer e(scalar(e_init), game.has_epigraph() ? steps.eta_aux : 0.0, cfg.rule,
                  [elo, ehi](const Eigen::VectorXd& v) { return project_box(v, elo, ehi); });

  Batcher batcher(train.size(), cfg.batch_size, cfg.seed);
  Recorder rec(p, ev, cfg, Algorithm::kSlackRatios, steps);
  rec.metadata()["signed_ratio_terms"] = has_signed_terms(p);
  rec.metadata()["ratio_objective_epigraph"] = game.has_epigraph();
  int clipped = 0;
  for (int t = 0; t < cfg.iterations; ++t) {
    const Eigen::VectorXd lambda = lam.value();
    const Eigen::VectorXd c = game.theta_coefficients(lambda);
    const auto batch = batcher.next();
    const auto sev = weighted_surrogate(ev, theta.value(), c, sides_for_coefficients(c), batch);
    const double ev_e = e.value()(0);
    const Eigen::VectorXd g_lambda =
        game.lambda_gradient(sev.rates.values, sev.rates.present, a.value(), b.value(), ev_e);
    Eigen::VectorXd ga, gb;
    double ge = 0.0;
    game.aux_gradient(a.value(), b.value(), lambda, &ga, &gb, &ge);
    if (!ga.allFinite() || !gb.allFinite() || !g_lambda.allFinite()) {
      throw OptimizationError("alg3: non-finite ratio state at iteration " + std::to_string(t) +
                              " (min b = " + std::to_string(b.value().minCoeff()) +
                              ", |lambda|_1 = " + std::to_string(lambda.sum()) + ")");
    }
    if (rec.due(t)) {
      std::map<std::string, Eigen::VectorXd> aux{{"a", a.value()}, {"b", b.value()}};
      if (game.has_epigraph()) aux["e"] = e.value();
      rec.record(t, LinearModel::from_params(theta.value(), bound), lambda, std::move(aux));
    }
    theta.step(clip_gradient(sev.gradient, cfg.gradient_clip, &clipped));
    a.step(clip_gradient(ga, cfg.gradient_clip, &clipped));
    b.step(clip_gradient(gb, cfg.gradient_clip, &clipped));
    e.step(scalar(ge));
    lam.step(clip_gradient(g_lambda, cfg.gradient_clip, &clipped));
  }
  return rec.finish(clipped);
}

Trace run_biconvex(const ProblemSpec& p, const OgdConfig& cfg, const Dataset& train) {
  check_ratio_algorithm(p, "alg4");
  cfg.validate();
  if (cfg.lambda_floor <= 0.0) throw ConfigError("alg4 needs a positive lambda_floor");
  const BiconvexGame game(p);
  const auto steps = suggest_step_sizes(p, Algorithm::kBiconvex, cfg, train);
  const RateEvaluator ev(train, p.rates);
  const Eigen::VectorXd floor = game.multiplier_floor(cfg.lambda_floor);
  Eigen::VectorXd lambda0 = floor;
  if (auto i = game.epigraph_multiplier()) lambda0(static_cast<Eigen::Index>(*i)) = std::min(1.0, 0.5 * steps.kappa);
  MultiplierPlayer lam(lambda0, floor, steps.kappa, steps.eta_lambda);

  const double bound = cfg.norm_bound;
  DescentPlayer theta(initial_params(cfg, train), steps.eta_theta, cfg.rule,
                      [bound](const Eigen::VectorXd& v) { return project_l2_ball(v, bound); });
  Eigen::VectorXd known = ev.evaluate(LinearModel::from_params(theta.value(), bound));

  // u starts at the minimizer of the ratio identity for the initial rates.
  const auto M = static_cast<Eigen::Index>(game.num_terms());
  Eigen::VectorXd u0(M);
  {
    Eigen::Index i = 0;
    for (const auto& blk : game.blocks()) {
      for (const auto& term : blk.spec.terms) {
        const double bb = std::max(term.denominator.dot(known), blk.spec.lower_bound);
        const double aa = term.numerator.dot(known);
        u0(i++) = std::sqrt(std::max(0.0, bb - aa)) / bb;
      }
    }
  }
  const double uhi = game.u_upper();
  DescentPlayer u(u0, steps.eta_aux, cfg.rule,
                  [uhi](const Eigen::VectorXd& v) { return project_box(v, 0.0, uhi); });
  const double elo = game.epigraph_lower();
  const double ehi = game.epigraph_upper();
  double e_init = 0.0;
  if (p.ratio_objective) {
    for (const auto& blk : game.blocks()) {
      if (!blk.epigraph) continue;
      for (const auto& term : blk.spec.terms) e_init += term.sign * term.value(known);
    }
  }
  DescentPlayer e(scalar(e_init), game.has_epigraph() ? steps.eta_aux : 0.0, cfg.rule,
                  [elo, ehi](const Eigen::VectorXd& v) { return project_box(v, elo, ehi); });

  Batcher batcher(train.size(), cfg.batch_size, cfg.seed);
  Recorder rec(p, ev, cfg, Algorithm::kBiconvex, steps);
  rec.metadata()["ratio_objective_epigraph"] = game.has_epigraph();
  int clipped = 0;
  int floor_hits = 0;
  for (int t = 0; t < cfg.iterations; ++t) {
    Eigen::VectorXd lambda = lam.value();
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      if (floor(i) > 0.0 && lambda(i) <= 0.0) {
        lambda(i) = floor(i);
        ++floor_hits;
      }
    }
    const Eigen::VectorXd xi = game.xi_update(u.value(), lambda);
    const Eigen::VectorXd c = game.theta_coefficients(u.value(), lambda);
    const auto batch = batcher.next();
    const auto sev = weighted_surrogate(ev, theta.value(), c, sides_for_coefficients(c), batch);
    refresh(&known, sev.rates);
    const Eigen::VectorXd gu = game.u_gradient(known, u.value(), xi, lambda);
    const double ge = game.epigraph_gradient(lambda);
    const Eigen::VectorXd g_lambda =
        game.lambda_gradient(sev.rates.values, sev.rates.present, u.value(), xi, e.value()(0));
    if (rec.due(t)) {
      std::map<std::string, Eigen::VectorXd> aux{{"u", u.value()}, {"xi", xi}};
      if (game.has_epigraph()) aux["e"] = e.value();
      rec.record(t, LinearModel::from_params(theta.value(), bound), lambda, std::move(aux));
    }
    theta.step(clip_gradient(sev.gradient, cfg.gradient_clip, &clipped));
    u.step(clip_gradient(gu, cfg.gradient_clip, &clipped));
    e.step(scalar(ge));
    lam.step(clip_gradient(g_lambda, cfg.gradient_clip, &clipped));
  }
  if (floor_hits > 0) spdlog::warn("alg4: multiplier clamped to its floor {} times", floor_hits);
  rec.metadata()["floor_clamps"] = floor_hits;
  return rec.finish(clipped);
}

Trace run_algorithm(Algorithm algorithm, const ProblemSpec& p, const OgdConfig& cfg,
                    const Dataset& train) {
  switch (algorithm) {
    case Algorithm::kSurrogate: return run_surrogate_game(p, cfg, train);
    case Algorithm::kSpadePlus: return run_spade_plus(p, cfg, train).trace;
    case Algorithm::kSlackRatios: return run_slack_ratios(p, cfg, train);
    case Algorithm::kBiconvex: return run_biconvex(p, cfg, train);
    case Algorithm::kOracle: break;
  }
  throw ConfigError("alg1 needs an oracle; use run_oracle_game");
}

}  // namespace rategame
