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


#include "rategame/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "rategame/errors.hpp"

namespace rategame {

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw LoadError("bad number '" + s + "' in report");
  }
  return v;
}

}  // namespace

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {"method",          "metric_name",     "metric",
                                                "constraint_name", "constraint",      "hyperparameters",
                                                "runtime_seconds", "trace",           "selection"};
  return cols;
}

std::string report_to_csv(const Report& report) {
  std::string out;
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += '\n';
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{:.17g},{},{:.17g},{},{:.17g},{},{}\n", quote(r.method),
                       quote(r.metric_name), r.metric, quote(r.constraint_name), r.constraint,
                       quote(r.hyperparameters), r.runtime_seconds, quote(r.trace), quote(r.selection));
  }
  return out;
}

std::string report_to_text(const Report& report) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"method", "metric (constraint)", "metric_name", "constraint_name", "hyperparameters",
                   "runtime_s"});
  for (const auto& r : report.rows) {
    cells.push_back({r.method, fmt::format("{:.3f} ({:.3f})", r.metric, r.constraint), r.metric_name,
                     r.constraint_name, r.hyperparameters, fmt::format("{:.1f}", r.runtime_seconds)});
  }
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  if (!report.task.empty() || !report.dataset.empty()) {
    out += fmt::format("task: {}  dataset: {}\n", report.task, report.dataset);
  }
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::string line;
    for (std::size_t i = 0; i < cells[r].size(); ++i) {
      line += fmt::format("{:<{}}", cells[r][i], width[i]);
      if (i + 1 < cells[r].size()) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
    }
  }
  return out;
}

std::vector<std::filesystem::path> emit_report(const Report& report, const std::filesystem::path& stem) {
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  std::filesystem::path csv = stem;
  csv += ".csv";
  std::filesystem::path txt = stem;
  txt += ".txt";
  for (const auto& [path, body] : {std::pair{csv, report_to_csv(report)}, std::pair{txt, report_to_text(report)}}) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write report file " + path.string());
    out << body;
    if (!out) throw Error("failed writing report file " + path.string());
  }
  return {csv, txt};
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw LoadError("report is empty");
  if (split_csv_line(line) != report_columns()) throw LoadError("unexpected report header: " + line);
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != report_columns().size()) throw LoadError("malformed report row: " + line);
    rows.push_back(ReportRow{f[0], f[1], parse_double(f[2]), f[3], parse_double(f[4]), f[5],
                             parse_double(f[6]), f[7], f[8]});
  }
  return rows;
}

std::vector<ReportRow> read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open report " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_report_csv(ss.str());
}

}  // namespace rategame
