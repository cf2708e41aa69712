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


#include "rategame/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "rategame/baselines.hpp"
#include "rategame/cso_oracle.hpp"
#include "rategame/errors.hpp"
#include "rategame/metrics.hpp"
#include "rategame/optimizers.hpp"
#include "rategame/synthetic.hpp"
#include "rategame/tasks.hpp"

namespace rategame {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double kl_term(double p, double q) {
  if (p <= 0.0) return 0.0;
  return p * std::log(p / std::max(q, 1e-12));
}

/// F-measure of the slice given by `group` (all examples when unset).
double slice_f1(const StochasticModel& model, const Dataset& ds, std::optional<int> group) {
  const std::vector<RateDefinition> rates = {RateDefinition::tpr(group, Sense::kDecreasing),
                                             RateDefinition::fpr(group, Sense::kIncreasing),
                                             RateDefinition::fnr(group, Sense::kIncreasing)};
  const Eigen::VectorXd r = stochastic_rates(model, rates, ds);
  const double p = group ? ds.group_positive_proportion(*group) : ds.positive_proportion();
  const double tp = p * r(0);
  const double den = 2.0 * tp + (1.0 - p) * r(1) + p * r(2);
  return den > 0.0 ? 2.0 * tp / den : 0.0;
}

std::string trace_stem(const ExperimentConfig& cfg) {
  const std::string ds = cfg.dataset.name.empty() ? "data" : cfg.dataset.name;
  return std::string(task_kind_name(cfg.task)) + "-" + ds;
}

std::filesystem::path traces_dir(const ExperimentConfig& cfg) {
  return std::filesystem::path(cfg.output_dir) / "traces";
}

std::string mixture_selection(const std::vector<std::size_t>& snapshots, const StochasticModel& sm) {
  std::string s = "mixture:";
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    s += fmt::format("{}{}={:.17g}", i ? ";" : "", snapshots[i], sm.atoms[i].weight);
  }
  return s;
}

std::string step_label(double v) { return fmt::format("{:g}", v); }

std::string hyperparameters(const Trace& t) {
  const auto& m = t.metadata;
  auto num = [&m](const char* k) { return m.contains(k) ? m.at(k).get<double>() : 0.0; };
  std::string s = fmt::format("eta_lambda={};kappa={};T={}", step_label(num("eta_lambda")),
                              step_label(num("kappa")), m.value("iterations", 0));
  if (t.algorithm != "alg1") s = fmt::format("eta_theta={};", step_label(num("eta_theta"))) + s;
  if (t.algorithm == "alg3" || t.algorithm == "alg4") s += fmt::format(";eta_aux={}", step_label(num("eta_aux")));
  return s;
}

Trace model_trace(const std::string& name, const std::vector<LinearModel>& models, const ProblemSpec& p,
                  const Dataset& train) {
  Trace t;
  t.algorithm = name;
  t.rate_names = p.rate_names();
  t.constraint_names = p.constraint_names();
  const RateEvaluator ev(train, p.rates);
  for (std::size_t i = 0; i < models.size(); ++i) {
    Snapshot s;
    s.iteration = static_cast<int>(i);
    s.model = models[i];
    s.rates = ev.evaluate(models[i]);
    const auto e = p.evaluate(s.rates);
    s.objective = e.objective;
    s.violations = e.violations;
    t.norm_bound = std::max(t.norm_bound, models[i].norm_bound());
    t.snapshots.push_back(std::move(s));
  }
  return t;
}

Eigen::VectorXd mixture_rates(const StochasticModel& sm, const ProblemSpec& p, const Dataset& ds) {
  return stochastic_rates(sm, p.rates, ds);
}

struct PointJob {
  double eta_theta;
  double eta_lambda;
};

}  // namespace

Dataset load_experiment_dataset(const DatasetConfig& cfg, const std::filesystem::path& data_dir) {
  const std::string prefix = "synthetic:";
  if (cfg.path.rfind(prefix, 0) == 0) {
    GaussianOptions o;
    o.n = cfg.synthetic_size;
    const auto seed = std::stoull(cfg.path.substr(prefix.size()));
    return make_gaussian_dataset(o, seed);
  }
  std::filesystem::path path(cfg.path);
  if (path.is_relative()) path = data_dir / path;
  return load_tabular_dataset(path, cfg.schema);
}

ProblemSpec make_custom_problem(const CustomTaskConfig& cfg, const Dataset& train) {
  MetricParams mp;
  mp.p = train.positive_proportion();
  struct Pending {
    std::string metric;
    double bound;
    bool objective;
  };
  std::vector<Pending> items = {{cfg.objective, 0.0, true}};
  for (const auto& c : cfg.constraints) items.push_back({c.metric, c.bound, false});
  ProblemSpec p;
  std::vector<std::vector<int>> idx(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& m = items[i].metric;
    if (m == "error") {
      idx[i] = p.add_rates({RateDefinition::accuracy(Sense::kDecreasing)});
    } else if (m == "gmean" || m == "hmean") {
      idx[i] = p.add_rates({RateDefinition::tpr(std::nullopt, Sense::kDecreasing),
                            RateDefinition::tnr(std::nullopt, Sense::kDecreasing)});
    } else if (m == "qmean") {
      idx[i] = p.add_rates({RateDefinition::fpr(std::nullopt, Sense::kIncreasing),
                            RateDefinition::fnr(std::nullopt, Sense::kIncreasing)});
    } else if (m == "kld") {
      idx[i] = p.add_rates({RateDefinition::positive_prediction(std::nullopt, Sense::kDecreasing),
                            RateDefinition::negative_prediction(std::nullopt, Sense::kDecreasing)});
    } else {
      throw ConfigError("custom task metric '" + m + "' is not one of error, gmean, hmean, qmean, kld");
    }
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    if (it.metric == "error") {
      auto f = error_rate_function(p.num_rates(), idx[i].front(), it.objective ? 0.0 : -it.bound);
      if (it.objective) {
        p.linear_objective = std::move(f);
      } else {
        p.linear_constraints.push_back(std::move(f));
      }
      continue;
    }
    MetricTerm term{build_metric(it.metric, mp), idx[i], it.bound, it.metric};
    if (it.objective) {
      p.objective_terms.push_back(std::move(term));
    } else {
      p.convex_constraints.push_back(std::move(term));
    }
  }
  p.validate();
  return p;
}

double TaskSetup::metric(const StochasticModel& model, const Dataset& ds) const {
  switch (kind) {
    case TaskKind::kKldParity: {
      double total = 0.0;
      for (int g = 0; g < ds.num_groups(); ++g) {
        if (ds.group_size(g) == 0) continue;
        const std::vector<RateDefinition> r = {RateDefinition::positive_prediction(g, Sense::kDecreasing)};
        const double q = stochastic_rates(model, r, ds)(0);
        total += kl_term(prior, q) + kl_term(1.0 - prior, 1.0 - q);
      }
      return total;
    }
    case TaskKind::kFMeasureParity:
      return slice_f1(model, ds, std::nullopt);
    case TaskKind::kCustom:
      return problem.evaluate(mixture_rates(model, problem, ds)).objective;
  }
  return 0.0;
}

double TaskSetup::constraint(const StochasticModel& model, const Dataset& ds) const {
  switch (kind) {
    case TaskKind::kKldParity: {
      const double base = error_rate(unc_error, ds);
      const double err = error_rate(model, ds);
      return base > 0.0 ? err / base : std::numeric_limits<double>::infinity();
    }
    case TaskKind::kFMeasureParity:
      return slice_f1(model, ds, other_group) - slice_f1(model, ds, protected_group) - delta;
    case TaskKind::kCustom: {
      const auto e = problem.evaluate(mixture_rates(model, problem, ds));
      return e.violations.empty() ? 0.0 : e.max_violation();
    }
  }
  return 0.0;
}

TaskSetup build_task(const ExperimentConfig& cfg, const DatasetSplits& splits) {
  TaskSetup t;
  t.kind = cfg.task;
  t.prior = splits.train.positive_proportion();
  t.delta = cfg.delta;
  const auto unc = select_unc_error(splits.train, splits.validation, cfg.baselines.step_grid,
                                    cfg.baselines.fit);
  t.unc_error = unc.model;
  t.unc_step = unc.step_size;
  switch (cfg.task) {
    case TaskKind::kKldParity: {
      const double bound = cfg.error_slack * error_rate(t.unc_error, splits.train);
      t.problem = make_kld_parity_problem(splits.train, bound);
      t.metric_name = "kld";
      t.constraint_name = "error_ratio";
      break;
    }
    case TaskKind::kFMeasureParity: {
      const int G = splits.train.num_groups();
      if (G < 2) throw ConfigError("fmeasure-parity needs at least two groups");
      const auto um = StochasticModel::point_mass(t.unc_error);
      int lo = 0, hi = 0;
      double flo = 2.0, fhi = -1.0;
      for (int g = 0; g < G; ++g) {
        if (splits.train.group_size(g) == 0) continue;
        const double f = slice_f1(um, splits.train, g);
        if (f < flo) { flo = f; lo = g; }
        if (f > fhi) { fhi = f; hi = g; }
      }
      if (lo == hi) hi = lo == 0 ? 1 : 0;
      t.protected_group = lo;
      t.other_group = hi;
      t.problem = make_fmeasure_parity_problem(splits.train, hi, lo, cfg.delta);
      t.metric_name = "f1";
      t.constraint_name = fmt::format("f1_gap[g={}]-[g={}]-delta", hi, lo);
      break;
    }
    case TaskKind::kCustom:
      t.problem = make_custom_problem(cfg.custom, splits.train);
      t.metric_name = "objective";
      t.constraint_name = "max_violation";
      break;
  }
  return t;
}

StochasticModel model_from_selection(const Trace& trace, const std::string& selection) {
  if (selection == "average") {
    if (!trace.metadata.contains("average_model")) throw LoadError("trace has no average model");
    return StochasticModel::point_mass(model_from_json(trace.metadata.at("average_model")));
  }
  const auto colon = selection.find(':');
  if (colon == std::string::npos) throw LoadError("bad selection '" + selection + "'");
  const std::string kind = selection.substr(0, colon);
  const std::string body = selection.substr(colon + 1);
  auto snapshot = [&trace](std::size_t i) -> const Snapshot& {
    if (i >= trace.snapshots.size()) throw LoadError("selection refers to a missing snapshot");
    return trace.snapshots[i];
  };
  if (kind == "iterate") return StochasticModel::point_mass(snapshot(std::stoul(body)).model);
  if (kind != "mixture") throw LoadError("bad selection '" + selection + "'");
  StochasticModel sm;
  std::size_t start = 0;
  while (start < body.size()) {
    auto end = body.find(';', start);
    if (end == std::string::npos) end = body.size();
    const std::string item = body.substr(start, end - start);
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw LoadError("bad mixture item '" + item + "'");
    sm.atoms.push_back({snapshot(std::stoul(item.substr(0, eq))).model, std::stod(item.substr(eq + 1))});
    start = end + 1;
  }
  sm.validate();
  return sm;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& data_dir,
                                bool sweep) {
  cfg.validate();
  const auto t0 = Clock::now();
  const Dataset full = load_experiment_dataset(cfg.dataset, data_dir);
  const DatasetSplits splits = prepare_splits(full, cfg.seed);
  const TaskSetup task = build_task(cfg, splits);
  const Dataset& shrink_ds = cfg.shrink_on == "validation" ? splits.validation : splits.train;
  spdlog::info("{} on {}: {} train / {} validation / {} test examples, setup {:.1f}s",
               task_kind_name(cfg.task), cfg.dataset.name, splits.train.size(),
               splits.validation.size(), splits.test.size(), seconds_since(t0));

  std::vector<PointJob> jobs;
  if (sweep) {
    const std::vector<double> thetas =
        cfg.algorithm == Algorithm::kOracle ? std::vector<double>{0.0} : cfg.sweep.eta_theta;
    for (double et : thetas) {
      for (double el : cfg.sweep.eta_lambda) jobs.push_back({et, el});
    }
  } else {
    jobs.push_back({-1.0, -1.0});
  }

  std::optional<PluginOracle> oracle;
  std::optional<RateEvaluator> oracle_ev;
  if (cfg.algorithm == Algorithm::kOracle) {
    oracle_ev.emplace(splits.train, task.problem.rates);
    oracle.emplace(*oracle_ev, FitOptions{cfg.baselines.fit.steps, 0.1, UpdateRule::kGradientDescent});
  }

  std::vector<SweepPoint> points(jobs.size());
  const auto dir = traces_dir(cfg);
  std::filesystem::create_directories(dir);
  const std::string stem = trace_stem(cfg) + "-" + std::string(algorithm_name(cfg.algorithm));

  auto run_point = [&](std::size_t i) {
    const auto start = Clock::now();
    OgdConfig oc = cfg.optimizer;
    if (jobs[i].eta_theta >= 0.0) oc.eta_theta = jobs[i].eta_theta;
    if (jobs[i].eta_lambda >= 0.0) oc.eta_lambda = jobs[i].eta_lambda;
    SweepPoint pt;
    Trace trace;
    if (cfg.algorithm == Algorithm::kOracle) {
      trace = run_oracle_game(task.problem, *oracle, oc, splits.train);
    } else if (cfg.algorithm == Algorithm::kSpadePlus) {
      auto res = run_spade_plus(task.problem, oc, splits.train);
      pt.average = res.average;
      trace = std::move(res.trace);
    } else {
      trace = run_algorithm(cfg.algorithm, task.problem, oc, splits.train);
    }
    pt.runtime_seconds = seconds_since(start);
    pt.eta_theta = trace.metadata.value("eta_theta", 0.0);
    pt.eta_lambda = trace.metadata.value("eta_lambda", 0.0);
    trace.metadata["task"] = std::string(task_kind_name(cfg.task));
    trace.metadata["dataset"] = cfg.dataset.name;
    trace.metadata["split_seed"] = cfg.seed;
    pt.trace_path = (dir / fmt::format("{}-{}.jsonl", stem, i)).string();
    write_trace(trace, pt.trace_path);

    pt.stochastic = shrink(trace, task.problem, shrink_ds);
    const auto se = task.problem.evaluate(mixture_rates(pt.stochastic.model, task.problem, splits.validation));
    pt.stochastic_objective = se.objective;
    pt.stochastic_violation = se.max_violation();
    pt.deterministic = best_iterate(trace, task.problem, splits.validation, cfg.selection_tolerance);
    const auto de = task.problem.evaluate(
        mixture_rates(StochasticModel::point_mass(pt.deterministic.model), task.problem, splits.validation));
    pt.deterministic_objective = de.objective;
    pt.deterministic_violation = de.max_violation();
    spdlog::info("{} point {}/{}: eta_theta={:g} eta_lambda={:g} val objective {:.4f} violation {:.4f} ({:.1f}s)",
                 algorithm_name(cfg.algorithm), i + 1, jobs.size(), pt.eta_theta, pt.eta_lambda,
                 pt.stochastic_objective, pt.stochastic_violation, pt.runtime_seconds);
    points[i] = std::move(pt);
  };

  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int nthreads = std::min<int>(cfg.sweep.jobs > 0 ? cfg.sweep.jobs : hw, static_cast<int>(jobs.size()));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs.size());
    std::vector<std::thread> pool;
    for (int w = 0; w < nthreads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
          try {
            run_point(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<double> so, sv, dob, dv;
  for (const auto& pt : points) {
    so.push_back(pt.stochastic_objective);
    sv.push_back(pt.stochastic_violation);
    dob.push_back(pt.deterministic_objective);
    dv.push_back(pt.deterministic_violation);
  }
  ExperimentResult res;
  res.selected_stochastic = select_index(so, sv, cfg.selection_tolerance);
  res.selected_deterministic = select_index(dob, dv, cfg.selection_tolerance);
  res.report.task = std::string(task_kind_name(cfg.task));
  res.report.dataset = cfg.dataset.name;

  const std::string alg(algorithm_name(cfg.algorithm));
  auto add_row = [&](const std::string& method, const SweepPoint& pt, const StochasticModel& model,
                     const std::string& selection) {
    const Trace header = read_trace(pt.trace_path);
    res.report.rows.push_back(ReportRow{method, task.metric_name, task.metric(model, splits.test),
                                        task.constraint_name, task.constraint(model, splits.test),
                                        hyperparameters(header), pt.runtime_seconds, pt.trace_path,
                                        selection});
  };
  {
    const auto& pt = points[res.selected_stochastic];
    add_row(alg + "-stochastic", pt, pt.stochastic.model,
            mixture_selection(pt.stochastic.snapshots, pt.stochastic.model));
    res.report.lp_fallback = pt.stochastic.fallback;
  }
  {
    const auto& pt = points[res.selected_deterministic];
    add_row(alg + "-deterministic", pt, StochasticModel::point_mass(pt.deterministic.model),
            fmt::format("iterate:{}", pt.deterministic.snapshot));
  }
  if (cfg.algorithm == Algorithm::kSpadePlus) {
    std::vector<double> ao, av;
    for (const auto& pt : points) {
      const auto e = task.problem.evaluate(
          mixture_rates(StochasticModel::point_mass(*pt.average), task.problem, splits.validation));
      ao.push_back(e.objective);
      av.push_back(e.max_violation());
    }
    const auto& pt = points[select_index(ao, av, cfg.selection_tolerance)];
    add_row(alg + "-average", pt, StochasticModel::point_mass(*pt.average), "average");
  }
  res.points = std::move(points);

  nlohmann::json summary = {{"config", config_to_json(cfg)},
                            {"selected_stochastic", res.selected_stochastic},
                            {"selected_deterministic", res.selected_deterministic},
                            {"unc_error_step", task.unc_step},
                            {"points", nlohmann::json::array()}};
  for (const auto& pt : res.points) {
    summary["points"].push_back({{"eta_theta", pt.eta_theta},
                                 {"eta_lambda", pt.eta_lambda},
                                 {"trace", pt.trace_path},
                                 {"runtime_seconds", pt.runtime_seconds},
                                 {"validation_objective", pt.stochastic_objective},
                                 {"validation_violation", pt.stochastic_violation},
                                 {"lp_fallback", pt.stochastic.fallback}});
  }
  std::ofstream(std::filesystem::path(cfg.output_dir) / (stem + "-sweep.json")) << summary.dump(2) << '\n';
  return res;
}

Report run_baselines(const ExperimentConfig& cfg, const std::filesystem::path& data_dir) {
  const Dataset full = load_experiment_dataset(cfg.dataset, data_dir);
  const DatasetSplits splits = prepare_splits(full, cfg.seed);
  auto start = Clock::now();
  const TaskSetup task = build_task(cfg, splits);
  const double unc_time = seconds_since(start);
  const auto dir = traces_dir(cfg);
  std::filesystem::create_directories(dir);
  const std::string stem = trace_stem(cfg);

  Report report;
  report.task = std::string(task_kind_name(cfg.task));
  report.dataset = cfg.dataset.name;
  auto add = [&](const std::string& method, const std::vector<LinearModel>& models,
                 const StochasticModel& sm, const std::string& selection, const std::string& hyper,
                 double runtime) {
    const auto path = (dir / fmt::format("{}-{}.jsonl", stem, method)).string();
    write_trace(model_trace(method, models, task.problem, splits.train), path);
    report.rows.push_back(ReportRow{method, task.metric_name, task.metric(sm, splits.test),
                                    task.constraint_name, task.constraint(sm, splits.test), hyper,
                                    runtime, path, selection});
  };
  add("UncError", {task.unc_error}, StochasticModel::point_mass(task.unc_error), "iterate:0",
      fmt::format("step={:g};steps={}", task.unc_step, cfg.baselines.fit.steps), unc_time);

  if (cfg.task == TaskKind::kFMeasureParity || cfg.task == TaskKind::kCustom) {
    start = Clock::now();
    const auto f1 = baseline_unc_f1(splits.train, task.unc_error);
    add("UncF1", {f1}, StochasticModel::point_mass(f1), "iterate:0",
        fmt::format("shift={:.6g}", f1.bias() - task.unc_error.bias()), seconds_since(start));
  }
  if (cfg.task == TaskKind::kKldParity || cfg.task == TaskKind::kCustom) {
    start = Clock::now();
    FitOptions fo = cfg.baselines.fit;
    const auto sm = baseline_post_shift(splits.train, fo);
    std::vector<LinearModel> models;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < sm.atoms.size(); ++i) {
      models.push_back(sm.atoms[i].model);
      idx.push_back(i);
    }
    add("PostShift", models, sm, mixture_selection(idx, sm),
        fmt::format("target={:.6g};atoms={}", splits.train.positive_proportion(), sm.atoms.size()),
        seconds_since(start));
  }
  return report;
}

}  // namespace rategame
