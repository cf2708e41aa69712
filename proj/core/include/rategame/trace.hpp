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

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "rategame/rates.hpp"

namespace rategame {

inline constexpr int kTraceSchemaVersion = 1;

/// State of one recorded iteration. `rates`, `objective` and `violations`
/// are exact values on the full training set for the played model.
struct Snapshot {
  int iteration = 0;
  LinearModel model;
  Eigen::VectorXd lambda;
  /// Auxiliary player state by name ("xi", "a", "b", "u", "e").
  std::map<std::string, Eigen::VectorXd> aux;
  Eigen::VectorXd rates;
  double objective = 0.0;
  std::vector<double> violations;

  double max_violation() const;
};

struct Trace {
  std::string algorithm;
  double norm_bound = 1.0;
  std::vector<std::string> rate_names;
  std::vector<std::string> constraint_names;
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<Snapshot> snapshots;

  bool empty() const { return snapshots.empty(); }
  std::vector<LinearModel> models() const;
};

/// One header line followed by one line per snapshot.
void write_trace(const Trace& trace, const std::filesystem::path& path);
Trace read_trace(const std::filesystem::path& path);

nlohmann::json snapshot_to_json(const Snapshot& s);
Snapshot snapshot_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const LinearModel& m);
LinearModel model_from_json(const nlohmann::json& j);

}  // namespace rategame
