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


#include "rategame/config.hpp"

#include <cstdlib>
#include <fstream>

#include "rategame/errors.hpp"

namespace rategame {

namespace {

using nlohmann::json;

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void read_opt(const json& j, const char* key, std::optional<double>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<double>();
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

}  // namespace

TaskKind parse_task_kind(std::string_view name) {
  if (name == "kld-parity") return TaskKind::kKldParity;
  if (name == "fmeasure-parity") return TaskKind::kFMeasureParity;
  if (name == "custom") return TaskKind::kCustom;
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

std::string_view task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kKldParity: return "kld-parity";
    case TaskKind::kFMeasureParity: return "fmeasure-parity";
    case TaskKind::kCustom: return "custom";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  optimizer.validate();
  const bool ratio_alg = algorithm == Algorithm::kSlackRatios || algorithm == Algorithm::kBiconvex;
  if (task == TaskKind::kFMeasureParity && !ratio_alg) {
    throw ConfigError("fmeasure-parity requires alg3 or alg4");
  }
  if (task != TaskKind::kFMeasureParity && ratio_alg) {
    throw ConfigError(std::string(task_kind_name(task)) + " cannot be run with " +
                      std::string(algorithm_name(algorithm)));
  }
  if (sweep.eta_lambda.empty()) throw ConfigError("sweep.eta_lambda is empty");
  if (sweep.eta_theta.empty() && algorithm != Algorithm::kOracle) {
    throw ConfigError("sweep.eta_theta is empty");
  }
  for (double v : sweep.eta_theta) {
    if (!(v >= 0.0)) throw ConfigError("sweep step sizes must be non-negative");
  }
  for (double v : sweep.eta_lambda) {
    if (!(v >= 0.0)) throw ConfigError("sweep step sizes must be non-negative");
  }
  if (shrink_on != "train" && shrink_on != "validation") {
    throw ConfigError("shrink_on must be 'train' or 'validation'");
  }
  if (dataset.path.empty()) throw ConfigError("dataset.path is required");
  if (!(error_slack > 0.0)) throw ConfigError("error_slack must be positive");
}

void apply_override(json& config, std::string_view assignment) {
  std::string s(assignment);
  if (s.rfind("--", 0) == 0) s = s.substr(2);
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + s + "' is not of the form section.key=value");
  }
  const std::string key = s.substr(0, eq);
  const std::string raw = s.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  std::string pointer;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    pointer += "/" + key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  config[json::json_pointer(pointer)] = value;
}

ExperimentConfig config_from_json(const json& j) {
  try {
    check_keys(j, {"task", "dataset", "algorithm", "optimizer", "sweep", "baselines", "custom",
                   "error_slack", "delta", "selection_tolerance", "shrink_on", "seed", "output_dir"},
               "config");
    ExperimentConfig c;
    if (j.contains("task")) c.task = parse_task_kind(j.at("task").get<std::string>());
    if (j.contains("algorithm")) c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      check_keys(d, {"name", "path", "label_column", "positive_labels", "protected_column",
                     "group_values", "numeric_columns", "categorical_columns", "delimiter",
                     "synthetic_size"},
                 "dataset");
      read(d, "name", c.dataset.name);
      read(d, "path", c.dataset.path);
      read(d, "label_column", c.dataset.schema.label_column);
      read(d, "positive_labels", c.dataset.schema.positive_labels);
      read(d, "protected_column", c.dataset.schema.protected_column);
      read(d, "group_values", c.dataset.schema.group_values);
      read(d, "numeric_columns", c.dataset.schema.numeric_columns);
      read(d, "categorical_columns", c.dataset.schema.categorical_columns);
      read(d, "synthetic_size", c.dataset.synthetic_size);
      if (d.contains("delimiter")) {
        const auto delim = d.at("delimiter").get<std::string>();
        if (delim.size() != 1) throw ConfigError("dataset.delimiter must be one character");
        c.dataset.schema.delimiter = delim[0];
      }
    }
    if (j.contains("optimizer")) {
      const auto& o = j.at("optimizer");
      check_keys(o, {"iterations", "eta_theta", "eta_lambda", "eta_aux", "kappa", "lambda_floor",
                     "batch_size", "snapshot_every", "seed", "norm_bound", "gradient_clip", "omega",
                     "rule", "best_response_steps", "best_response_tolerance"},
                 "optimizer");
      auto& g = c.optimizer;
      read(o, "iterations", g.iterations);
      read_opt(o, "eta_theta", g.eta_theta);
      read_opt(o, "eta_lambda", g.eta_lambda);
      read_opt(o, "eta_aux", g.eta_aux);
      read_opt(o, "kappa", g.kappa);
      read(o, "lambda_floor", g.lambda_floor);
      read(o, "batch_size", g.batch_size);
      read(o, "snapshot_every", g.snapshot_every);
      read(o, "seed", g.seed);
      read(o, "norm_bound", g.norm_bound);
      read(o, "gradient_clip", g.gradient_clip);
      read(o, "omega", g.omega);
      if (o.contains("rule")) g.rule = parse_update_rule(o.at("rule").get<std::string>());
      read(o, "best_response_steps", g.best_response.max_steps);
      read(o, "best_response_tolerance", g.best_response.tolerance);
    }
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      check_keys(s, {"eta_theta", "eta_lambda", "jobs"}, "sweep");
      read(s, "eta_theta", c.sweep.eta_theta);
      read(s, "eta_lambda", c.sweep.eta_lambda);
      read(s, "jobs", c.sweep.jobs);
    }
    if (j.contains("baselines")) {
      const auto& b = j.at("baselines");
      check_keys(b, {"steps", "step_grid", "rule"}, "baselines");
      read(b, "steps", c.baselines.fit.steps);
      read(b, "step_grid", c.baselines.step_grid);
      if (b.contains("rule")) c.baselines.fit.rule = parse_update_rule(b.at("rule").get<std::string>());
    }
    if (j.contains("custom")) {
      const auto& u = j.at("custom");
      check_keys(u, {"objective", "constraints"}, "custom");
      read(u, "objective", c.custom.objective);
      if (u.contains("constraints")) {
        for (const auto& k : u.at("constraints")) {
          c.custom.constraints.push_back({k.at("metric").get<std::string>(), k.at("bound").get<double>()});
        }
      }
    }
    read(j, "error_slack", c.error_slack);
    read(j, "delta", c.delta);
    read(j, "selection_tolerance", c.selection_tolerance);
    read(j, "shrink_on", c.shrink_on);
    read(j, "seed", c.seed);
    read(j, "output_dir", c.output_dir);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
}

json config_to_json(const ExperimentConfig& c) {
  const auto& g = c.optimizer;
  json custom_constraints = json::array();
  for (const auto& k : c.custom.constraints) custom_constraints.push_back({{"metric", k.metric}, {"bound", k.bound}});
  return {
      {"task", std::string(task_kind_name(c.task))},
      {"algorithm", std::string(algorithm_name(c.algorithm))},
      {"dataset",
       {{"name", c.dataset.name},
        {"path", c.dataset.path},
        {"label_column", c.dataset.schema.label_column},
        {"positive_labels", c.dataset.schema.positive_labels},
        {"protected_column", c.dataset.schema.protected_column},
        {"group_values", c.dataset.schema.group_values},
        {"numeric_columns", c.dataset.schema.numeric_columns},
        {"categorical_columns", c.dataset.schema.categorical_columns},
        {"delimiter", std::string(1, c.dataset.schema.delimiter)},
        {"synthetic_size", c.dataset.synthetic_size}}},
      {"optimizer",
       {{"iterations", g.iterations},
        {"eta_theta", opt_json(g.eta_theta)},
        {"eta_lambda", opt_json(g.eta_lambda)},
        {"eta_aux", opt_json(g.eta_aux)},
        {"kappa", opt_json(g.kappa)},
        {"lambda_floor", g.lambda_floor},
        {"batch_size", g.batch_size},
        {"snapshot_every", g.snapshot_every},
        {"seed", g.seed},
        {"norm_bound", g.norm_bound},
        {"gradient_clip", g.gradient_clip},
        {"omega", g.omega},
        {"rule", std::string(update_rule_name(g.rule))},
        {"best_response_steps", g.best_response.max_steps},
        {"best_response_tolerance", g.best_response.tolerance}}},
      {"sweep", {{"eta_theta", c.sweep.eta_theta}, {"eta_lambda", c.sweep.eta_lambda}, {"jobs", c.sweep.jobs}}},
      {"baselines",
       {{"steps", c.baselines.fit.steps},
        {"step_grid", c.baselines.step_grid},
        {"rule", std::string(update_rule_name(c.baselines.fit.rule))}}},
      {"custom", {{"objective", c.custom.objective}, {"constraints", custom_constraints}}},
      {"error_slack", c.error_slack},
      {"delta", c.delta},
      {"selection_tolerance", c.selection_tolerance},
      {"shrink_on", c.shrink_on},
      {"seed", c.seed},
      {"output_dir", c.output_dir}};
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file " + path.string() + " is not valid JSON");
  for (const auto& o : overrides) apply_override(j, o);
  return config_from_json(j);
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("RATEGAME_DATA_DIR"); env && *env) return env;
  return "data";
}

}  // namespace rategame
