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


#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "rategame/config.hpp"
#include "rategame/errors.hpp"
#include "rategame/experiment.hpp"
#include "rategame/report.hpp"

namespace {

namespace fs = std::filesystem;
using namespace rategame;

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kLpFallback = 2;

struct CommonArgs {
  std::string config;
  std::string data_dir;
  std::string output_dir;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--data-dir", args.data_dir, "Directory for relative dataset paths (default: $RATEGAME_DATA_DIR or ./data)");
  cmd->add_option("-o,--output", args.output_dir, "Output directory (overrides output_dir)");
  cmd->allow_extras();
}

ExperimentConfig load(const CommonArgs& args, const CLI::App* cmd) {
  std::vector<std::string> overrides;
  for (const auto& extra : cmd->remaining()) {
    if (extra.rfind("--", 0) != 0 || extra.find('=') == std::string::npos) {
      throw ConfigError("unexpected argument '" + extra + "'; overrides look like --section.key=value");
    }
    overrides.push_back(extra);
  }
  if (!args.output_dir.empty()) overrides.push_back("output_dir=\"" + args.output_dir + "\"");
  return load_config(args.config, overrides);
}

fs::path data_dir(const CommonArgs& args) {
  return args.data_dir.empty() ? default_data_dir() : fs::path(args.data_dir);
}

int finish(const Report& report, const fs::path& stem) {
  const auto files = emit_report(report, stem);
  std::cout << report_to_text(report);
  std::cout << "wrote " << files[0].string() << " and " << files[1].string() << '\n';
  if (report.lp_fallback) {
    spdlog::warn("shrinking LP was infeasible for the selected run; reported the least-violation mixture");
    return kLpFallback;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Train classifiers under rate-metric objectives and constraints."};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  CommonArgs train_args, sweep_args, base_args;
  auto* train = app.add_subcommand("train", "Run one optimizer with the configured step sizes");
  add_common(train, train_args);
  auto* sweep = app.add_subcommand("sweep", "Sweep step sizes, select on validation, report on test");
  add_common(sweep, sweep_args);
  auto* baselines = app.add_subcommand("baselines", "Train the reference baselines for a task");
  add_common(baselines, base_args);
  std::string report_input;
  auto* report = app.add_subcommand("report", "Print a stored report as an aligned table");
  report->add_option("input", report_input, "Report CSV")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kError;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*train || *sweep) {
      const bool is_sweep = static_cast<bool>(*sweep);
      const auto& args = is_sweep ? sweep_args : train_args;
      const auto cfg = load(args, is_sweep ? sweep : train);
      const auto res = run_experiment(cfg, data_dir(args), is_sweep);
      const std::string name = std::string(task_kind_name(cfg.task)) + "-" + cfg.dataset.name + "-" +
                               std::string(algorithm_name(cfg.algorithm)) + (is_sweep ? "-sweep" : "-train");
      return finish(res.report, fs::path(cfg.output_dir) / name);
    }
    if (*baselines) {
      const auto cfg = load(base_args, baselines);
      const auto rep = run_baselines(cfg, data_dir(base_args));
      const std::string name = std::string(task_kind_name(cfg.task)) + "-" + cfg.dataset.name + "-baselines";
      return finish(rep, fs::path(cfg.output_dir) / name);
    }
    if (*report) {
      Report rep;
      rep.rows = read_report_csv(report_input);
      std::cout << report_to_text(rep);
      return kOk;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kError;
  }
  return kError;
}
