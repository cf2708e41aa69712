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


#include "rategame/trace.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "rategame/errors.hpp"

namespace rategame {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vec_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

double Snapshot::max_violation() const {
  if (violations.empty()) return -std::numeric_limits<double>::infinity();
  return *std::max_element(violations.begin(), violations.end());
}

std::vector<LinearModel> Trace::models() const {
  std::vector<LinearModel> out;
  out.reserve(snapshots.size());
  for (const auto& s : snapshots) out.push_back(s.model);
  return out;
}

json model_to_json(const LinearModel& m) {
  json adj = json::array();
  for (const auto& a : m.adjustments()) adj.push_back({a.scale, a.offset});
  return {{"weights", vec_to_json(m.weights())},
          {"bias", m.bias()},
          {"norm_bound", m.norm_bound()},
          {"adjustments", adj}};
}

LinearModel model_from_json(const json& j) {
  std::vector<GroupAdjustment> adj;
  for (const auto& a : j.at("adjustments")) adj.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
  return LinearModel(vec_from_json(j.at("weights")), j.at("bias").get<double>(),
                     j.at("norm_bound").get<double>(), std::move(adj));
}

json snapshot_to_json(const Snapshot& s) {
  json aux = json::object();
  for (const auto& [k, v] : s.aux) aux[k] = vec_to_json(v);
  return {{"iteration", s.iteration},
          {"model", model_to_json(s.model)},
          {"lambda", vec_to_json(s.lambda)},
          {"aux", aux},
          {"rates", vec_to_json(s.rates)},
          {"objective", s.objective},
          {"violations", s.violations}};
}

Snapshot snapshot_from_json(const json& j) {
  Snapshot s;
  s.iteration = j.at("iteration").get<int>();
  s.model = model_from_json(j.at("model"));
  s.lambda = vec_from_json(j.at("lambda"));
  for (const auto& [k, v] : j.at("aux").items()) s.aux[k] = vec_from_json(v);
  s.rates = vec_from_json(j.at("rates"));
  s.objective = j.at("objective").get<double>();
  s.violations = j.at("violations").get<std::vector<double>>();
  return s;
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write trace file " + path.string());
  const json header = {{"schema", "rategame-trace"},
                       {"version", kTraceSchemaVersion},
                       {"algorithm", trace.algorithm},
                       {"norm_bound", trace.norm_bound},
                       {"rate_names", trace.rate_names},
                       {"constraint_names", trace.constraint_names},
                       {"metadata", trace.metadata},
                       {"num_snapshots", trace.snapshots.size()}};
  out << header.dump() << '\n';
  for (const auto& s : trace.snapshots) out << snapshot_to_json(s).dump() << '\n';
  if (!out) throw Error("failed writing trace file " + path.string());
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open trace file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw LoadError("empty trace file " + path.string());
  Trace t;
  try {
    const auto header = json::parse(line);
    if (header.at("schema") != "rategame-trace") throw LoadError("not a trace file: " + path.string());
    const int version = header.at("version").get<int>();
    if (version != kTraceSchemaVersion) {
      throw LoadError("unsupported trace schema version " + std::to_string(version));
    }
    t.algorithm = header.at("algorithm").get<std::string>();
    t.norm_bound = header.at("norm_bound").get<double>();
    t.rate_names = header.at("rate_names").get<std::vector<std::string>>();
    t.constraint_names = header.at("constraint_names").get<std::vector<std::string>>();
    t.metadata = header.at("metadata");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      t.snapshots.push_back(snapshot_from_json(json::parse(line)));
    }
  } catch (const json::exception& e) {
    throw LoadError("malformed trace file " + path.string() + ": " + e.what());
  }
  return t;
}

}  // namespace rategame
