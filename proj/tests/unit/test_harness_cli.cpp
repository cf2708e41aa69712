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


#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rategame/baselines.hpp"
#include "rategame/config.hpp"
#include "rategame/errors.hpp"
#include "rategame/experiment.hpp"
#include "rategame/projections.hpp"
#include "rategame/report.hpp"
#include "rategame/surrogates.hpp"
#include "rategame/synthetic.hpp"
#include "rategame/tasks.hpp"
#include "rategame/trace.hpp"
#include "test_util.hpp"

using namespace rategame;
using nlohmann::json;
using rategame::testing::random_dataset;
using rategame::testing::random_vector;
using rategame::testing::tiny_dataset;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rategame-harness-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json synthetic_config(const fs::path& out) {
  return json{{"task", "kld-parity"},
              {"algorithm", "alg2"},
              {"dataset", {{"name", "gauss"}, {"path", "synthetic:3"}, {"synthetic_size", 900}}},
              {"optimizer", {{"iterations", 200}, {"snapshot_every", 10}, {"norm_bound", 5.0}, {"kappa", 5.0}}},
              {"sweep", {{"eta_theta", {0.01, 0.1}}, {"eta_lambda", {0.1, 1.0}}, {"jobs", 1}}},
              {"baselines", {{"steps", 300}, {"step_grid", {0.01, 0.1}}}},
              {"seed", 4},
              {"output_dir", out.string()}};
}

int count_lines(const fs::path& p) {
  std::ifstream in(p);
  int n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

Dataset separable_dataset() {
  GaussianOptions o;
  o.n = 400;
  o.separable = true;
  o.margin = 0.5;
  return make_gaussian_dataset(o, 5);
}

}  // namespace

TEST_CASE("config overrides") {
  json j = synthetic_config("runs");
  apply_override(j, "--optimizer.iterations=50");
  apply_override(j, "sweep.eta_lambda=[0.5]");
  apply_override(j, "dataset.name=other");
  apply_override(j, "optimizer.rule=\"adam\"");
  CHECK(j["optimizer"]["iterations"] == 50);
  CHECK(j["sweep"]["eta_lambda"] == json::array({0.5}));
  CHECK(j["dataset"]["name"] == "other");
  const auto cfg = config_from_json(j);
  CHECK(cfg.optimizer.iterations == 50);
  CHECK(cfg.optimizer.rule == UpdateRule::kAdam);
  CHECK(cfg.sweep.eta_lambda == std::vector<double>{0.5});
  CHECK_THROWS_AS(apply_override(j, "optimizer.iterations"), ConfigError);
  CHECK_THROWS_AS(apply_override(j, "=3"), ConfigError);

  json unknown = synthetic_config("runs");
  apply_override(unknown, "optimizer.iteratons=5");
  CHECK_THROWS_AS(config_from_json(unknown), ConfigError);
  json top = synthetic_config("runs");
  top["colour"] = "red";
  CHECK_THROWS_AS(config_from_json(top), ConfigError);
}

TEST_CASE("config validation and round trip") {
  const auto cfg = config_from_json(synthetic_config("runs"));
  const json again = config_to_json(config_from_json(config_to_json(cfg)));
  CHECK(again == config_to_json(cfg));

  auto rejects = [](const std::string& assignment) {
    json j = synthetic_config("runs");
    apply_override(j, assignment);
    CHECK_THROWS_AS(config_from_json(j), ConfigError);
  };
  rejects("algorithm=\"alg3\"");
  rejects("task=\"fmeasure-parity\"");
  rejects("task=\"table-9\"");
  rejects("algorithm=\"alg7\"");
  rejects("optimizer.iterations=0");
  rejects("sweep.eta_theta=[]");
  rejects("sweep.eta_lambda=[-1]");
  rejects("shrink_on=\"test\"");
  rejects("dataset.path=\"\"");
  json ok = synthetic_config("runs");
  apply_override(ok, "task=\"fmeasure-parity\"");
  apply_override(ok, "algorithm=\"alg4\"");
  CHECK_NOTHROW(config_from_json(ok));

  const fs::path dir = scratch("config");
  std::ofstream(dir / "c.json") << synthetic_config("runs").dump();
  CHECK(load_config(dir / "c.json", {"--seed=9"}).seed == 9);
  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
}

TEST_CASE("default data directory follows the environment") {
  const char* old = std::getenv("RATEGAME_DATA_DIR");
  const std::string saved = old ? old : "";
  setenv("RATEGAME_DATA_DIR", "/tmp/somewhere", 1);
  CHECK(default_data_dir() == fs::path("/tmp/somewhere"));
  unsetenv("RATEGAME_DATA_DIR");
  CHECK(default_data_dir() == fs::path("data"));
  if (old) setenv("RATEGAME_DATA_DIR", saved.c_str(), 1);
}

TEST_CASE("report CSV round trip") {
  Report empty;
  const fs::path dir = scratch("report");
  const auto files = emit_report(empty, dir / "empty");
  REQUIRE(files.size() == 2);
  CHECK(count_lines(files[0]) == 1);
  CHECK(read_report_csv(files[0]).empty());
  CHECK(parse_report_csv(report_to_csv(empty)).empty());

  Report r;
  r.rows.push_back({"alg2-stochastic", "kld", 0.0123, "error_ratio", 1.04,
                    "eta_theta=0.1;eta_lambda=1;kappa=20;T=2000", 12.5, "runs/t, \"quoted\".jsonl",
                    "mixture:3=0.25;7=0.75"});
  r.rows.push_back({"UncError", "kld", 0.2, "error_ratio", 1.0, "step=0.1;steps=2500", 0.5, "runs/u.jsonl",
                    "iterate:0"});
  const auto written = emit_report(r, dir / "two");
  CHECK(count_lines(written[0]) == 3);
  CHECK(read_report_csv(written[0]) == r.rows);
  CHECK(parse_report_csv(report_to_csv(r)) == r.rows);
  CHECK(report_columns().front() == "method");
  const std::string text = report_to_text(r);
  CHECK(text.find("alg2-stochastic") != std::string::npos);
  CHECK(text.find("0.012 (1.040)") != std::string::npos);
}

TEST_CASE("trace round trip") {
  const auto ds = random_dataset(200, 2, 31);
  const auto p = make_kld_parity_problem(ds, 0.3);
  OgdConfig cfg;
  cfg.iterations = 60;
  cfg.norm_bound = 5.0;
  const Trace t = run_surrogate_game(p, cfg, ds);
  const fs::path dir = scratch("trace");
  write_trace(t, dir / "t.jsonl");
  const Trace back = read_trace(dir / "t.jsonl");
  CHECK(back.algorithm == t.algorithm);
  CHECK(back.norm_bound == t.norm_bound);
  CHECK(back.rate_names == t.rate_names);
  CHECK(back.constraint_names == t.constraint_names);
  CHECK(back.metadata == t.metadata);
  REQUIRE(back.snapshots.size() == t.snapshots.size());
  for (std::size_t i = 0; i < t.snapshots.size(); ++i) {
    const auto& a = t.snapshots[i];
    const auto& b = back.snapshots[i];
    CHECK(a.iteration == b.iteration);
    CHECK((a.model.params().array() == b.model.params().array()).all());
    CHECK((a.lambda.array() == b.lambda.array()).all());
    CHECK((a.rates.array() == b.rates.array()).all());
    CHECK((a.aux.at("xi").array() == b.aux.at("xi").array()).all());
    CHECK(a.objective == b.objective);
    CHECK(a.violations == b.violations);
  }
  std::ofstream(dir / "broken.jsonl") << "{\"schema\": 99}\n";
  CHECK_THROWS_AS(read_trace(dir / "broken.jsonl"), LoadError);
  CHECK_THROWS_AS(read_trace(dir / "absent.jsonl"), LoadError);
}

TEST_CASE("UncError baseline") {
  const auto ds = separable_dataset();
  FitOptions fo;
  fo.steps = 2500;
  const LinearModel m = baseline_unc_error(ds, fo);
  CHECK(error_rate(m, ds) == 0.0);
  const LinearModel again = baseline_unc_error(ds, fo);
  CHECK((m.params().array() == again.params().array()).all());
  const auto one = tiny_dataset({{1.0}, {2.0}}, {-1, -1}, {0, 1});
  CHECK_THROWS_AS(baseline_unc_error(one, fo), ConfigError);

  const auto noisy = random_dataset(600, 2, 32);
  const auto splits = prepare_splits(noisy, 1);
  const std::vector<double> grid{0.001, 0.01, 0.1, 1.0};
  const auto sel = select_unc_error(splits.train, splits.validation, grid, fo);
  for (double s : grid) {
    FitOptions f = fo;
    f.step_size = s;
    CHECK(sel.validation_error <= error_rate(baseline_unc_error(splits.train, f), splits.validation));
  }
}

TEST_CASE("F1 threshold sweep") {
  // Scores 0.9, 0.5, 0.1 with labels +, -, +: the four cuts give F1 0, 2/3, 1/2, 4/5.
  const Eigen::Vector3d scores(0.9, 0.5, 0.1);
  const std::vector<int> labels{1, -1, 1};
  const auto best = best_f1_shift(scores, labels);
  CHECK(best.f1 == doctest::Approx(0.8));
  CHECK(f1_from_scores((scores.array() + best.shift).matrix(), labels) == doctest::Approx(0.8));
  for (double cut : {0.95, 0.7, 0.3, 0.0}) {
    CHECK(f1_from_scores((scores.array() - cut).matrix(), labels) <= best.f1 + 1e-15);
  }
  // Already optimal at zero shift: stays put.
  const auto stay = best_f1_shift(Eigen::Vector3d(0.9, -0.5, 0.1), labels);
  CHECK(stay.shift == 0.0);
  CHECK(stay.f1 == doctest::Approx(1.0));

  const auto ds = random_dataset(500, 2, 33);
  FitOptions fo;
  fo.steps = 500;
  const LinearModel base = baseline_unc_error(ds, fo);
  const LinearModel f1 = baseline_unc_f1(ds, base);
  CHECK(f1_score(f1, ds) >= f1_score(base, ds));
}

TEST_CASE("PostShift baseline") {
  const auto ds = random_dataset(700, 2, 34);
  FitOptions fo;
  fo.steps = 500;
  const StochasticModel sm = baseline_post_shift(ds, fo);
  CHECK(sm.atoms.size() <= 3);
  const double p = ds.positive_proportion();
  for (int g = 0; g < 2; ++g) {
    const double n = static_cast<double>(ds.group_size(g));
    const std::vector<RateDefinition> r{RateDefinition::positive_prediction(g, Sense::kIncreasing)};
    CHECK(std::abs(stochastic_rates(sm, r, ds)(0) - p) <= 1.0 / n);
    for (const auto& a : sm.atoms) CHECK(std::abs(evaluate_rate(a.model, r[0], ds) - p) <= 1.0 / n);
  }

  // A second group holding exact copies of the first gets the same thresholds.
  Eigen::MatrixXd X(400, 2);
  std::vector<int> y(400), g(400);
  Rng rng(35);
  for (int i = 0; i < 200; ++i) {
    X.row(i) = random_vector(2, rng).transpose();
    X.row(i + 200) = X.row(i);
    y[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i) + 200] = X(i, 0) > 0.2 ? 1 : -1;
    g[static_cast<std::size_t>(i)] = 0;
    g[static_cast<std::size_t>(i) + 200] = 1;
  }
  const Dataset twin("twin", X, y, g);
  const StochasticModel st = baseline_post_shift(twin, fo);
  for (const auto& a : st.atoms) {
    CHECK(a.model.adjustment(0).offset == a.model.adjustment(1).offset);
  }
  const auto single = tiny_dataset({{1.0}, {-1.0}, {2.0}}, {1, -1, 1}, {0, 0, 0});
  CHECK_THROWS_AS(baseline_post_shift(single, fo), ConfigError);
}

TEST_CASE("custom task without constraints is plain surrogate descent") {
  const auto ds = random_dataset(300, 2, 36);
  CustomTaskConfig custom;
  custom.objective = "error";
  const ProblemSpec p = make_custom_problem(custom, ds);
  CHECK(p.mode() == ProblemMode::kP1);
  OgdConfig cfg;
  cfg.iterations = 50;
  cfg.snapshot_every = 1;
  cfg.eta_theta = 0.2;
  cfg.norm_bound = 3.0;
  const Trace trace = run_surrogate_game(p, cfg, ds);
  CHECK(trace.snapshots.front().lambda.size() == 0);
  const RateEvaluator ev(ds, p.rates);
  const Eigen::VectorXd c = p.linear_objective.coeffs;
  const auto sides = sides_for_coefficients(c);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(3);
  for (const auto& s : trace.snapshots) {
    CHECK((s.model.params() - theta).cwiseAbs().maxCoeff() <= 1e-12);
    theta = project_l2_ball(theta - 0.2 * weighted_surrogate(ev, theta, c, sides).gradient, 3.0);
  }
  CHECK(trace.snapshots.back().objective < trace.snapshots.front().objective);

  custom.objective = "gmean";
  custom.constraints.push_back({"error", 0.3});
  const ProblemSpec q = make_custom_problem(custom, ds);
  CHECK(q.mode() == ProblemMode::kP2);
  CHECK(q.linear_constraints.size() == 1);
  custom.objective = "median";
  CHECK_THROWS_AS(make_custom_problem(custom, ds), ConfigError);
}

TEST_CASE("KLD objective is lower without the error constraint") {
  std::vector<double> free_kld, tied_kld;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GaussianOptions o;
    o.n = 600;
    o.group_shift = 1.5;
    const Dataset ds = make_gaussian_dataset(o, 100 + seed);
    OgdConfig cfg;
    cfg.iterations = 500;
    cfg.norm_bound = 5.0;
    cfg.kappa = 5.0;
    auto final_kld = [&](const ProblemSpec& p) {
      const Trace t = run_surrogate_game(p, cfg, ds);
      Eigen::VectorXd R = Eigen::VectorXd::Zero(p.num_rates());
      for (const auto& s : t.snapshots) R += s.rates / static_cast<double>(t.snapshots.size());
      return make_kld_parity_problem(ds, std::nullopt).evaluate(R.head(4)).objective;
    };
    free_kld.push_back(final_kld(make_kld_parity_problem(ds, std::nullopt)));
    tied_kld.push_back(final_kld(make_kld_parity_problem(ds, 0.12)));
  }
  std::sort(free_kld.begin(), free_kld.end());
  std::sort(tied_kld.begin(), tied_kld.end());
  CHECK(free_kld[2] <= tied_kld[2]);
}

TEST_CASE("sweeps are reproducible and reports recompute from traces") {
  const fs::path a = scratch("sweep-a");
  const fs::path b = scratch("sweep-b");
  const auto cfg_a = config_from_json(synthetic_config(a));
  const auto cfg_b = config_from_json(synthetic_config(b));
  const auto ra = run_experiment(cfg_a, "data", true);
  const auto rb = run_experiment(cfg_b, "data", true);
  CHECK(ra.points.size() == 4);
  CHECK(ra.selected_stochastic == rb.selected_stochastic);
  CHECK(ra.selected_deterministic == rb.selected_deterministic);
  REQUIRE(ra.report.rows.size() == rb.report.rows.size());
  for (std::size_t i = 0; i < ra.report.rows.size(); ++i) {
    CHECK(ra.report.rows[i].metric == rb.report.rows[i].metric);
    CHECK(ra.report.rows[i].hyperparameters == rb.report.rows[i].hyperparameters);
    CHECK(ra.report.rows[i].selection == rb.report.rows[i].selection);
  }
  CHECK(fs::exists(a / "kld-parity-gauss-alg2-sweep.json"));

  const Dataset full = load_experiment_dataset(cfg_a.dataset, "data");
  const auto splits = prepare_splits(full, cfg_a.seed);
  const TaskSetup task = build_task(cfg_a, splits);
  for (const auto& row : ra.report.rows) {
    const Trace t = read_trace(row.trace);
    const StochasticModel sm = model_from_selection(t, row.selection);
    CHECK(std::abs(task.metric(sm, splits.test) - row.metric) <= 1e-9);
    CHECK(std::abs(task.constraint(sm, splits.test) - row.constraint) <= 1e-9);
  }

  // One run with the optimizer's own step sizes.
  const auto single = run_experiment(cfg_a, "data", false);
  CHECK(single.points.size() == 1);

  const Report base = run_baselines(cfg_a, "data");
  REQUIRE(base.rows.size() == 2);
  CHECK(base.rows[0].method == "UncError");
  CHECK(base.rows[1].method == "PostShift");
  CHECK(base.rows[0].constraint == doctest::Approx(1.0));
  for (const auto& row : base.rows) {
    const StochasticModel sm = model_from_selection(read_trace(row.trace), row.selection);
    CHECK(std::abs(task.metric(sm, splits.test) - row.metric) <= 1e-9);
  }
}

TEST_CASE("experiments with the oracle and the ratio optimizers") {
  const fs::path dir = scratch("algs");
  json j = synthetic_config(dir);
  apply_override(j, "algorithm=\"alg1\"");
  apply_override(j, "sweep.eta_lambda=[0.1]");
  const auto r1 = run_experiment(config_from_json(j), "data", true);
  CHECK(r1.points.size() == 1);
  CHECK(r1.report.rows[0].hyperparameters.find("eta_theta") == std::string::npos);

  apply_override(j, "algorithm=\"spade+\"");
  const auto rs = run_experiment(config_from_json(j), "data", true);
  CHECK(rs.report.rows.size() == 3);
  CHECK(rs.report.rows[2].selection == "average");

  apply_override(j, "task=\"fmeasure-parity\"");
  apply_override(j, "delta=0.05");
  for (const char* alg : {"\"alg3\"", "\"alg4\""}) {
    apply_override(j, std::string("algorithm=") + alg);
    const auto r = run_experiment(config_from_json(j), "data", true);
    REQUIRE(r.report.rows.size() == 2);
    CHECK(r.report.rows[0].metric_name == "f1");
    CHECK(r.report.rows[0].metric > 0.0);
  }
  CHECK_THROWS_AS(model_from_selection(Trace{}, "iterate:0"), LoadError);
  CHECK_THROWS_AS(model_from_selection(Trace{}, "bogus"), LoadError);
}
