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

#include "rategame/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <utility>

#include "rategame/errors.hpp"
#include "rategame/random.hpp"

namespace rategame {

Dataset::Dataset(std::string name, Eigen::MatrixXd features, std::vector<int> labels,
                 std::vector<int> groups, std::vector<std::string> feature_names)
    : name_(std::move(name)),
      features_(std::move(features)),
      labels_(std::move(labels)),
      groups_(std::move(groups)),
      feature_names_(std::move(feature_names)) {
  if (labels_.empty()) throw ConfigError("dataset '" + name_ + "' is empty");
  if (static_cast<std::size_t>(features_.rows()) != labels_.size() ||
      groups_.size() != labels_.size()) {
    throw ConfigError("dataset '" + name_ + "': features, labels and groups disagree in length");
  }
  if (!feature_names_.empty() &&
      feature_names_.size() != static_cast<std::size_t>(features_.cols())) {
    throw ConfigError("dataset '" + name_ + "': feature name count mismatch");
  }
  for (int y : labels_) {
    if (y != 1 && y != -1) throw ConfigError("dataset '" + name_ + "': label must be -1 or +1");
  }
  for (int g : groups_) {
    if (g < 0) throw ConfigError("dataset '" + name_ + "': group id must be non-negative");
    num_groups_ = std::max(num_groups_, g + 1);
  }
}

Dataset Dataset::from_examples(std::string name, std::span<const Example> examples) {
  if (examples.empty()) throw ConfigError("dataset '" + name + "' is empty");
  const auto d = examples.front().features.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(examples.size()), d);
  std::vector<int> labels(examples.size());
  std::vector<int> groups(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].features.size() != d) {
      throw ConfigError("dataset '" + name + "': inconsistent feature dimension");
    }
    x.row(static_cast<Eigen::Index>(i)) = examples[i].features.transpose();
    labels[i] = examples[i].label;
    groups[i] = examples[i].group;
  }
  return Dataset(std::move(name), std::move(x), std::move(labels), std::move(groups));
}

double Dataset::positive_proportion() const {
  const auto pos = std::count(labels_.begin(), labels_.end(), 1);
  return static_cast<double>(pos) / static_cast<double>(labels_.size());
}

std::size_t Dataset::group_size(int group) const {
  return static_cast<std::size_t>(std::count(groups_.begin(), groups_.end(), group));
}

double Dataset::group_positive_proportion(int group) const {
  std::size_t members = 0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (groups_[i] != group) continue;
    ++members;
    if (labels_[i] == 1) ++positives;
  }
  if (members == 0) {
    throw EvaluationError("dataset '" + name_ + "' has no examples in group " +
                          std::to_string(group));
  }
  return static_cast<double>(positives) / static_cast<double>(members);
}

Example Dataset::example(std::size_t i) const {
  return Example{features_.row(static_cast<Eigen::Index>(i)).transpose(), labels_[i], groups_[i]};
}

Dataset Dataset::subset(std::span<const std::size_t> indices, std::string name) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(indices.size()), features_.cols());
  std::vector<int> labels(indices.size());
  std::vector<int> groups(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto i = indices[r];
    x.row(static_cast<Eigen::Index>(r)) = features_.row(static_cast<Eigen::Index>(i));
    labels[r] = labels_[i];
    groups[r] = groups_[i];
  }
  Dataset out(std::move(name), std::move(x), std::move(labels), std::move(groups),
              feature_names_);
  if (!reference_.empty()) {
    out.reference_.resize(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) out.reference_[r] = reference_[indices[r]];
  }
  return out;
}

Dataset Dataset::with_reference(std::vector<int> predictions) const {
  if (predictions.size() != labels_.size()) {
    throw ConfigError("dataset '" + name_ + "': reference prediction count mismatch");
  }
  for (int v : predictions) {
    if (v != 1 && v != -1) throw ConfigError("reference predictions must be -1 or +1");
  }
  Dataset out = *this;
  out.reference_ = std::move(predictions);
  return out;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Splits one line; double quotes group a field and "" escapes a quote.
std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == delimiter) {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& column,
                         const std::filesystem::path& path) {
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) {
    throw LoadError(path.string() + ": missing column '" + column + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

double parse_number(const std::string& cell, const std::string& column, std::size_t row,
                    const std::filesystem::path& path) {
  double value = 0.0;
  const auto* begin = cell.data();
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    throw LoadError(path.string() + ": non-numeric value '" + cell + "' in column '" + column +
                    "' (data row " + std::to_string(row + 1) + ")");
  }
  return value;
}

}  // namespace

Dataset load_tabular_dataset(const std::filesystem::path& path, const TabularSchema& schema) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open dataset file " + path.string());

  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw LoadError(path.string() + ": empty file");
  }
  const auto header = split_line(line, schema.delimiter);

  const auto label_col = column_index(header, schema.label_column, path);
  const auto group_col = column_index(header, schema.protected_column, path);
  std::vector<std::size_t> numeric_cols;
  for (const auto& c : schema.numeric_columns) numeric_cols.push_back(column_index(header, c, path));
  std::vector<std::size_t> categorical_cols;
  for (const auto& c : schema.categorical_columns) {
    categorical_cols.push_back(column_index(header, c, path));
  }

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_line(line, schema.delimiter);
    if (cells.size() != header.size()) {
      throw LoadError(path.string() + ": data row " + std::to_string(rows.size() + 1) + " has " +
                      std::to_string(cells.size()) + " fields, header has " +
                      std::to_string(header.size()));
    }
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw LoadError(path.string() + ": no data rows");

  // Category levels in sorted order so the encoding is independent of row order.
  std::vector<std::vector<std::string>> levels(categorical_cols.size());
  for (std::size_t c = 0; c < categorical_cols.size(); ++c) {
    std::set<std::string> seen;
    for (const auto& row : rows) seen.insert(row[categorical_cols[c]]);
    levels[c].assign(seen.begin(), seen.end());
  }

  std::vector<std::string> names = schema.numeric_columns;
  for (std::size_t c = 0; c < categorical_cols.size(); ++c) {
    for (const auto& level : levels[c]) names.push_back(schema.categorical_columns[c] + "=" + level);
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(names.size()));
  std::vector<int> labels(rows.size());
  std::vector<int> groups(rows.size());
  const std::set<std::string> positive(schema.positive_labels.begin(), schema.positive_labels.end());

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const auto ri = static_cast<Eigen::Index>(r);
    labels[r] = positive.count(row[label_col]) ? 1 : -1;
    const auto g = std::find(schema.group_values.begin(), schema.group_values.end(), row[group_col]);
    groups[r] = static_cast<int>(g - schema.group_values.begin());
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < numeric_cols.size(); ++c) {
      x(ri, col++) = parse_number(row[numeric_cols[c]], schema.numeric_columns[c], r, path);
    }
    for (std::size_t c = 0; c < categorical_cols.size(); ++c) {
      const auto& value = row[categorical_cols[c]];
      const auto pos = std::lower_bound(levels[c].begin(), levels[c].end(), value) - levels[c].begin();
      x(ri, col + pos) = 1.0;
      col += static_cast<Eigen::Index>(levels[c].size());
    }
  }

  return Dataset(path.stem().string(), std::move(x), std::move(labels), std::move(groups),
                 std::move(names));
}

Standardizer Standardizer::fit(const Dataset& ds) {
  Standardizer s;
  const auto& x = ds.features();
  const double n = static_cast<double>(x.rows());
  s.mean_ = x.colwise().mean().transpose();
  s.scale_.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - s.mean_(j)).square().sum() / n;
    // Constant columns are centred but not rescaled.
    s.scale_(j) = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Dataset Standardizer::apply(const Dataset& ds) const {
  if (ds.dim() != mean_.size()) throw ConfigError("standardizer dimension mismatch");
  Eigen::MatrixXd x = ds.features();
  x.rowwise() -= mean_.transpose();
  x.array().rowwise() /= scale_.transpose().array();
  Dataset out(ds.name(), std::move(x), {ds.labels().begin(), ds.labels().end()},
              {ds.groups().begin(), ds.groups().end()}, ds.feature_names());
  if (!ds.reference().empty()) out = out.with_reference({ds.reference().begin(), ds.reference().end()});
  return out;
}

SplitIndices split_indices(std::size_t n, std::uint64_t seed) {
  if (n < 9) throw ConfigError("dataset too small to split: need at least 9 examples, got " +
                               std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle_in_place(order, rng);

  const std::size_t n_train = 4 * n / 9;
  const std::size_t n_val = 2 * n / 9;
  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                      order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return s;
}

DatasetSplits split_dataset(const Dataset& ds, std::uint64_t seed) {
  auto idx = split_indices(ds.size(), seed);
  DatasetSplits out{ds.subset(idx.train, ds.name() + "/train"),
                    ds.subset(idx.validation, ds.name() + "/validation"),
                    ds.subset(idx.test, ds.name() + "/test"), std::move(idx)};
  return out;
}

DatasetSplits prepare_splits(const Dataset& ds, std::uint64_t seed) {
  auto raw = split_dataset(ds, seed);
  const auto standardizer = Standardizer::fit(raw.train);
  return DatasetSplits{standardizer.apply(raw.train), standardizer.apply(raw.validation),
                       standardizer.apply(raw.test), std::move(raw.indices)};
}

}  // namespace rategame
