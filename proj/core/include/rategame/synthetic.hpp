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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rategame/data.hpp"
#include "rategame/problem.hpp"
#include "rategame/rates.hpp"

namespace rategame {

struct GaussianOptions {
  std::size_t n = 2000;
  int dim = 2;
  /// Fraction of examples in group 1.
  double group_fraction = 0.3;
  /// Mean of group 1 is shifted by this amount along the first axis.
  double group_shift = 1.0;
  /// Probability of flipping a label.
  double label_noise = 0.1;
  /// When set, no noise and every example has |w*.x + b*| >= margin.
  bool separable = false;
  double margin = 1.0;
};

/// Two Gaussian groups labelled by a fixed hyperplane through the origin
/// with normal (1, ..., 1) / sqrt(dim).
Dataset make_gaussian_dataset(const GaussianOptions& options, std::uint64_t seed);

/// Linear models in two dimensions with unit-norm directions at
/// `num_angles` equally spaced angles, crossed with the given biases.
std::vector<LinearModel> direction_grid(int num_angles, std::span<const double> biases,
                                        double norm_bound);

struct SyntheticTask {
  std::string name;
  Dataset train;
  ProblemSpec problem;
};

/// The fixed synthetic suite used for convergence checks. Every task is a
/// constrained problem on two-dimensional data drawn with `seed`.
std::vector<SyntheticTask> synthetic_suite(std::uint64_t seed);

}  // namespace rategame
