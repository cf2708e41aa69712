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
#include <string>
#include <vector>

namespace rategame {

/// One method's test results.
struct ReportRow {
  std::string method;
  std::string metric_name;
  double metric = 0.0;
  std::string constraint_name;
  double constraint = 0.0;
  /// "key=value" pairs joined by ';'.
  std::string hyperparameters;
  double runtime_seconds = 0.0;
  /// Trace file holding the models behind this row.
  std::string trace;
  /// "iterate:<i>" or "mixture:<i>=<w>;<j>=<w>..." over the trace's snapshots.
  std::string selection;

  bool operator==(const ReportRow&) const = default;
};

struct Report {
  std::string task;
  std::string dataset;
  std::vector<ReportRow> rows;
  /// Set when any shrinking LP fell back to the least-violation mixture.
  bool lp_fallback = false;
};

/// Column order of the CSV.
const std::vector<std::string>& report_columns();

/// Writes <stem>.csv and <stem>.txt; returns the two paths.
std::vector<std::filesystem::path> emit_report(const Report& report, const std::filesystem::path& stem);

std::string report_to_csv(const Report& report);
/// Aligned table with "metric (constraint)" per method.
std::string report_to_text(const Report& report);

/// Parses a CSV written by emit_report.
std::vector<ReportRow> read_report_csv(const std::filesystem::path& path);
std::vector<ReportRow> parse_report_csv(const std::string& text);

}  // namespace rategame
