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


// Acceptance checks. Prints one PASS/FAIL line per criterion; exits 0 only
// when all pass. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "rategame/baselines.hpp"
#include "rategame/config.hpp"
#include "rategame/cso_oracle.hpp"
#include "rategame/errors.hpp"
#include "rategame/experiment.hpp"
#include "rategame/lp_simplex.hpp"
#include "rategame/metrics.hpp"
#include "rategame/optimizers.hpp"
#include "rategame/shrinking.hpp"
#include "rategame/synthetic.hpp"
#include "rategame/tasks.hpp"

namespace fs = std::filesystem;
using namespace rategame;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path data_dir() {
  if (const char* env = std::getenv("RATEGAME_DATA_DIR"); env && *env) return env;
  return RATEGAME_SOURCE_DATA_DIR;
}

fs::path config_path(const std::string& name) { return fs::path(RATEGAME_SOURCE_CONFIG_DIR) / name; }

fs::path scratch_dir() { return fs::temp_directory_path() / "rategame-acceptance"; }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Eigen::VectorXd mean_rates(const Trace& t) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(t.snapshots.front().rates.size());
  for (const auto& s : t.snapshots) r += s.rates;
  return r / static_cast<double>(t.snapshots.size());
}

/// Rates of every mixture of three rate vectors on a `step` grid of the simplex.
template <typename F>
void for_each_grid_mixture(const Eigen::MatrixXd& R, int steps, F&& visit) {
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; i + j <= steps; ++j) {
      const double a = static_cast<double>(i) / steps;
      const double b = static_cast<double>(j) / steps;
      visit(Eigen::VectorXd(a * R.row(0).transpose() + b * R.row(1).transpose() +
                            (1.0 - a - b) * R.row(2).transpose()));
    }
  }
}

Dataset brute_force_dataset() {
  GaussianOptions o;
  o.n = 2000;
  o.group_shift = 2.0;
  return make_gaussian_dataset(o, 7);
}

/// The labelling hyperplane, the same shifted, and a second direction.
std::vector<LinearModel> brute_force_candidates() {
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(2, 1.0 / std::sqrt(2.0));
  return {LinearModel(w, 0.0, 10.0), LinearModel(w, -1.0, 10.0), LinearModel(Eigen::Vector2d(0.0, 1.0), 0.0, 10.0)};
}

Outcome gmean_brute_force() {
  const Dataset ds = brute_force_dataset();
  ProblemSpec p;
  const auto idx = p.add_rates({RateDefinition::tpr(std::nullopt, Sense::kDecreasing),
                                RateDefinition::tnr(std::nullopt, Sense::kDecreasing)});
  p.objective_terms.push_back(MetricTerm{build_metric(MetricKind::kGMean), idx, 0.0, "gmean"});
  p.validate();
  const RateEvaluator ev(ds, p.rates);
  const EnumerationOracle oracle(brute_force_candidates(), ev);
  OgdConfig cfg;
  cfg.iterations = 2000;
  cfg.snapshot_every = 1;
  const Trace trace = run_oracle_game(p, oracle, cfg, ds);
  const double got = p.evaluate(mean_rates(trace)).objective;
  double best = std::numeric_limits<double>::infinity();
  for_each_grid_mixture(oracle.candidate_rates(), 100,
                        [&](const Eigen::VectorXd& r) { best = std::min(best, p.evaluate(r).objective); });
  return {got <= best + 0.02, fmt::format("objective {:.4f}, grid optimum {:.4f}", got, best)};
}

Outcome kld_brute_force() {
  const Dataset ds = brute_force_dataset();
  ProblemSpec p;
  MetricParams mp;
  mp.p = ds.positive_proportion();
  const auto kld_idx = p.add_rates({RateDefinition::positive_prediction(1, Sense::kDecreasing),
                                    RateDefinition::negative_prediction(1, Sense::kDecreasing)});
  const int acc = p.add_rates({RateDefinition::accuracy(Sense::kDecreasing)}).front();
  p.linear_objective = error_rate_function(p.num_rates(), acc, 0.0, "error");
  p.convex_constraints.push_back(MetricTerm{build_metric(MetricKind::kKld, mp), kld_idx, 0.1, "kld[g=1]"});
  p.validate();
  const RateEvaluator ev(ds, p.rates);
  const EnumerationOracle oracle(brute_force_candidates(), ev);
  const MetricTerm& term = p.convex_constraints.front();
  double best = std::numeric_limits<double>::infinity();
  double margin = 0.0;
  double lipschitz = 0.0;
  for_each_grid_mixture(oracle.candidate_rates(), 100, [&](const Eigen::VectorXd& r) {
    const auto g = p.evaluate(r);
    margin = std::max(margin, -g.max_violation());
    if (g.max_violation() <= 0.0) best = std::min(best, g.objective);
    const Eigen::Vector2d z(r(term.rate_indices[0]), r(term.rate_indices[1]));
    lipschitz = std::max(lipschitz, psi_grad(term.metric, z).lpNorm<1>());
  });
  // Radius 2 (L + 1) B_g / gamma: B_g = 1 bounds the error rate, gamma is the
  // largest margin on the grid and L the largest gradient norm over the
  // mixtures of the candidates, where the optimal slacks live.
  OgdConfig cfg;
  cfg.iterations = 2000;
  cfg.snapshot_every = 1;
  cfg.kappa = 2.0 * (lipschitz + 1.0) / margin;
  const Trace trace = run_oracle_game(p, oracle, cfg, ds);
  const auto e = p.evaluate(mean_rates(trace));
  const double violation = e.max_violation();
  return {std::abs(e.objective - best) <= 0.03 && violation <= 0.02,
          fmt::format("error {:.4f}, grid optimum {:.4f}, violation {:.4f}, radius {:.1f}", e.objective, best,
                      violation, *cfg.kappa)};
}

/// {x : metric(x, 1 - x) <= level} as an interval, by bisection on each side
/// of the minimizer p.
std::pair<double, double> sublevel_interval(const MetricSpec& metric, double p, double level) {
  auto f = [&](double x) { return value_clamped(metric, Eigen::Vector2d(x, 1.0 - x)); };
  if (f(p) > level) return {1.0, 0.0};
  auto edge = [&](double inside, double outside) {
    if (f(outside) <= level) return outside;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (inside + outside);
      (f(mid) <= level ? inside : outside) = mid;
    }
    return inside;
  };
  return {edge(p, 0.0), edge(p, 1.0)};
}

/// Optimum over mixtures of a fine model grid for the two suite tasks. Every
/// KLD term acts on (PP_g, NP_g), so a bound on it is an interval on PP_g and
/// the problem becomes a small LP over mixture weights.
class MixtureReference {
 public:
  explicit MixtureReference(const SyntheticTask& task) : p_(task.problem), prior_(task.train.positive_proportion()) {
    std::vector<double> biases;
    for (int i = -20; i <= 20; ++i) biases.push_back(0.1 * i);
    const RateEvaluator ev(task.train, p_.rates);
    const auto models = direction_grid(120, biases, 10.0);
    rates_.resize(p_.num_rates(), static_cast<Eigen::Index>(models.size()));
    for (std::size_t i = 0; i < models.size(); ++i) rates_.col(static_cast<Eigen::Index>(i)) = ev.evaluate(models[i]);
  }

  double optimum() const {
    if (p_.objective_terms.empty()) {
      std::vector<double> bounds;
      for (const auto& t : p_.convex_constraints) bounds.push_back(t.bound);
      const Eigen::VectorXd c = rates_.transpose() * p_.linear_objective.coeffs;
      const auto r = solve(c, p_.convex_constraints, bounds);
      return r.status == LpStatus::kOptimal ? r.objective + p_.linear_objective.constant : kNaN;
    }
    // Sum of two KLD objectives under linear constraints: bisect on the
    // objective level and scan how it splits between the two terms.
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(rates_.cols());
    auto feasible = [&](double level) {
      for (int k = 0; k <= 40; ++k) {
        const double a = level * k / 40.0;
        if (solve(zero, p_.objective_terms, {a, level - a}).status == LpStatus::kOptimal) return true;
      }
      return false;
    };
    double lo = 0.0, hi = 1.0;
    if (!feasible(hi)) return kNaN;
    for (int i = 0; i < 30; ++i) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
  }

 private:
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  ShrinkResult solve(const Eigen::VectorXd& c, const std::vector<MetricTerm>& terms,
                     const std::vector<double>& levels) const {
    const Eigen::Index n = rates_.cols();
    Eigen::MatrixXd A(static_cast<Eigen::Index>(2 * terms.size() + p_.linear_constraints.size()), n);
    Eigen::Index row = 0;
    for (std::size_t j = 0; j < terms.size(); ++j) {
      const auto [lo, hi] = sublevel_interval(terms[j].metric, prior_, levels[j]);
      const Eigen::VectorXd x = rates_.row(terms[j].rate_indices[0]).transpose();
      A.row(row++) = (x.array() - hi).matrix().transpose();
      A.row(row++) = (lo - x.array()).matrix().transpose();
    }
    for (const auto& f : p_.linear_constraints) {
      A.row(row++) = ((rates_.transpose() * f.coeffs).array() + f.constant).matrix().transpose();
    }
    return solve_lp_simplex(c, A);
  }

  const ProblemSpec& p_;
  double prior_;
  Eigen::MatrixXd rates_;
};

Outcome convergence_trend() {
  std::vector<double> gap_short, gap_long, viol_short, viol_long;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    for (const auto& task : synthetic_suite(seed)) {
      const double ref = MixtureReference(task).optimum();
      if (!std::isfinite(ref)) return {false, "no feasible mixture for " + task.name};
      for (int T : {500, 5000}) {
        OgdConfig cfg;
        cfg.iterations = T;
        cfg.snapshot_every = 1;
        cfg.seed = seed;
        const Trace trace = run_surrogate_game(task.problem, cfg, task.train);
        const auto e = task.problem.evaluate(mean_rates(trace));
        (T == 500 ? gap_short : gap_long).push_back(std::abs(e.objective - ref));
        (T == 500 ? viol_short : viol_long).push_back(std::max(0.0, e.max_violation()));
      }
    }
  }
  const double gs = median(gap_short), gl = median(gap_long);
  const double vs = median(viol_short), vl = median(viol_long);
  const double worst = *std::max_element(viol_long.begin(), viol_long.end());
  return {gl <= gs && vl <= vs && vl <= 0.05,
          fmt::format("median gap {:.4f} -> {:.4f}, median violation {:.4f} -> {:.4f}, worst at 5000 {:.4f}",
                      gs, gl, vs, vl, worst)};
}

ExperimentConfig experiment_config(const std::string& file, const std::vector<std::string>& overrides) {
  std::vector<std::string> all = overrides;
  all.push_back("output_dir=\"" + (scratch_dir() / fs::path(file).stem()).string() + "\"");
  return load_config(config_path(file), all);
}

const ReportRow& stochastic_row(const ExperimentResult& res) {
  for (const auto& row : res.report.rows) {
    if (row.method.ends_with("-stochastic")) return row;
  }
  throw Error("report has no stochastic row");
}

Outcome kld_table(const std::string& file, double kld_bound) {
  const auto res = run_experiment(experiment_config(file, {}), data_dir(), true);
  const auto& row = stochastic_row(res);
  return {row.metric <= kld_bound && row.constraint <= 1.15,
          fmt::format("test KLD {:.4f}, error ratio {:.3f}{}", row.metric, row.constraint,
                      res.report.lp_fallback ? ", least-violation fallback" : "")};
}

Outcome fmeasure_table() {
  struct Run {
    ReportRow row;
    double seconds;
  };
  auto run = [](const char* alg) {
    const auto start = std::chrono::steady_clock::now();
    const auto res = run_experiment(
        experiment_config("compas-fmeasure.json", {std::string("algorithm=\"") + alg + "\""}), data_dir(), true);
    return Run{stochastic_row(res),
               std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()};
  };
  const Run a = run("alg3");
  const Run b = run("alg4");
  return {a.row.metric >= 0.55 && a.row.constraint <= 0.10 && b.row.constraint <= 0.10 && a.seconds < 600.0 &&
              b.seconds < 600.0,
          fmt::format("alg3 F1 {:.3f} violation {:.3f} in {:.0f}s; alg4 F1 {:.3f} violation {:.3f} in {:.0f}s",
                      a.row.metric, a.row.constraint, a.seconds, b.row.metric, b.row.constraint, b.seconds)};
}

Outcome invariant_suites() {
  static const char* const suites[] = {"core_data",  "metrics",           "surrogates",  "projections",
                                       "cso_oracle", "game_optimizers",   "ensemble_shrinking",
                                       "harness_cli"};
  std::vector<std::string> failed;
  for (const char* name : suites) {
    const fs::path exe = fs::path(RATEGAME_TEST_BIN_DIR) / (std::string("test_") + name);
    const std::string cmd = "\"" + exe.string() + "\" --minimal > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) failed.push_back(name);
  }
  std::string detail = failed.empty() ? "all suites passed" : "failed:";
  for (const auto& f : failed) detail += " " + f;
  return {failed.empty(), detail};
}

Outcome baseline_sanity() {
  bool ok = true;
  std::string detail;
  for (const char* file : {"compas-kld.json", "adult-kld.json"}) {
    const auto cfg = experiment_config(file, {});
    const auto splits = prepare_splits(load_experiment_dataset(cfg.dataset, data_dir()), cfg.seed);
    const auto& train = splits.train;
    const auto unc = select_unc_error(train, splits.validation, cfg.baselines.step_grid, cfg.baselines.fit);
    const double f1_err = f1_score(unc.model, train);
    const double f1_f1 = f1_score(baseline_unc_f1(train, unc.model), train);
    FitOptions fit = cfg.baselines.fit;
    fit.step_size = unc.step_size;
    const StochasticModel ps = baseline_post_shift(train, fit);
    const double p = train.positive_proportion();
    double worst = 0.0;
    bool within = true;
    for (int g = 0; g < train.num_groups(); ++g) {
      const std::vector<RateDefinition> r{RateDefinition::positive_prediction(g, Sense::kIncreasing)};
      const double gap = std::abs(stochastic_rates(ps, r, train)(0) - p);
      worst = std::max(worst, gap * static_cast<double>(train.group_size(g)));
      within = within && gap <= 1.0 / static_cast<double>(train.group_size(g));
    }
    ok = ok && f1_f1 >= f1_err && within;
    detail += fmt::format("{}{}: F1 {:.3f} >= {:.3f}, group rate gap {:.3f}/n_G", detail.empty() ? "" : "; ",
                          cfg.dataset.name, f1_f1, f1_err, worst);
  }
  return {ok, detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  if (!std::getenv("RATEGAME_DATA_DIR")) setenv("RATEGAME_DATA_DIR", RATEGAME_SOURCE_DATA_DIR, 1);
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  const std::vector<Criterion> criteria{
      {1, "G-mean equilibrium vs brute force", 10.0, gmean_brute_force},
      {2, "constrained equilibrium vs brute force", 30.0, kld_brute_force},
      {3, "convergence trend on the synthetic suite", 0.0, convergence_trend},
      {4, "COMPAS kld-parity", 300.0, [] { return kld_table("compas-kld.json", 0.02); }},
      {5, "Adult kld-parity", 1200.0, [] { return kld_table("adult-kld.json", 0.05); }},
      {6, "COMPAS fmeasure-parity", 1200.0, fmeasure_table},
      {7, "invariant suites", 0.0, invariant_suites},
      {8, "baseline sanity", 0.0, baseline_sanity},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt::format("{:.1f}s", secs);
    if (c.budget_seconds > 0.0) {
      timing += fmt::format(" of {:.0f}s", c.budget_seconds);
      if (secs > c.budget_seconds) {
        out.pass = false;
        timing += ", over budget";
      }
    }
    fmt::print("criterion {}: {} {} ({}) [{}]\n", c.id, out.pass ? "PASS" : "FAIL", c.name, out.detail, timing);
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
