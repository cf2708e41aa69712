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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rategame {

/// One labelled instance. Labels are -1/+1, groups are small non-negative ids.
struct Example {
  Eigen::VectorXd features;
  int label = 1;
  int group = 0;
};

/// Immutable column-oriented collection of examples with a fixed feature
/// dimension. Construction validates labels, groups and shapes.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::string name, Eigen::MatrixXd features, std::vector<int> labels,
          std::vector<int> groups, std::vector<std::string> feature_names = {});

  static Dataset from_examples(std::string name, std::span<const Example> examples);

  const std::string& name() const { return name_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  int dim() const { return static_cast<int>(features_.cols()); }
  int num_groups() const { return num_groups_; }

  const Eigen::MatrixXd& features() const { return features_; }
  std::span<const int> labels() const { return labels_; }
  std::span<const int> groups() const { return groups_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  /// Fraction of examples labelled +1.
  double positive_proportion() const;
  /// Fraction of examples labelled +1 within `group`; throws if the group is empty.
  double group_positive_proportion(int group) const;
  std::size_t group_size(int group) const;

  Example example(std::size_t i) const;
  Dataset subset(std::span<const std::size_t> indices, std::string name) const;

  /// Attaches the +1/-1 predictions of a reference (legacy) model, used by
  /// churn-style selectors. Empty when none is attached.
  Dataset with_reference(std::vector<int> predictions) const;
  std::span<const int> reference() const { return reference_; }

 private:
  std::string name_;
  Eigen::MatrixXd features_;
  std::vector<int> labels_;
  std::vector<int> groups_;
  std::vector<std::string> feature_names_;
  std::vector<int> reference_;
  int num_groups_ = 0;
};

/// Column layout of a delimited text file.
struct TabularSchema {
  std::string label_column;
  /// Raw label values mapped to +1; everything else maps to -1.
  std::vector<std::string> positive_labels;
  std::string protected_column;
  /// group_values[i] maps to group id i; unlisted values map to group_values.size().
  std::vector<std::string> group_values;
  std::vector<std::string> numeric_columns;
  /// One-hot encoded, one indicator per distinct value (sorted).
  std::vector<std::string> categorical_columns;
  char delimiter = ',';
};

/// Reads a header-prefixed delimited file and encodes it per `schema`.
/// Features are returned unstandardized; see `prepare_splits`.
Dataset load_tabular_dataset(const std::filesystem::path& path, const TabularSchema& schema);

/// Per-feature affine standardization fitted on one dataset.
class Standardizer {
 public:
  static Standardizer fit(const Dataset& ds);
  Dataset apply(const Dataset& ds) const;
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& scale() const { return scale_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

struct DatasetSplits {
  Dataset train;
  Dataset validation;
  Dataset test;
  SplitIndices indices;
};

/// Random 4/9 : 2/9 : 1/3 partition; sizes floor(4n/9), floor(2n/9), rest.
SplitIndices split_indices(std::size_t n, std::uint64_t seed);

/// Splits `ds` without touching features.
DatasetSplits split_dataset(const Dataset& ds, std::uint64_t seed);

/// Splits, then standardizes all three parts with training statistics.
DatasetSplits prepare_splits(const Dataset& ds, std::uint64_t seed);

}  // namespace rategame
