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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "rategame/data.hpp"
#include "rategame/random.hpp"
#include "rategame/rates.hpp"

namespace rategame::testing {

/// Dataset from rows of (x..., label, group).
inline Dataset tiny_dataset(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                            const std::vector<int>& g) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(x.front().size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x[i].size(); ++j) {
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i][j];
    }
  }
  return Dataset("tiny", X, y, g);
}

/// n points with standard normal features, random labels and two groups.
inline Dataset random_dataset(std::size_t n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), dim);
  std::vector<int> y(n);
  std::vector<int> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) X(static_cast<Eigen::Index>(i), j) = standard_normal(rng);
    y[i] = (X(static_cast<Eigen::Index>(i), 0) + 0.7 * standard_normal(rng)) >= 0.0 ? 1 : -1;
    g[i] = uniform_unit(rng) < 0.35 ? 1 : 0;
  }
  return Dataset("random", X, y, g);
}

inline Eigen::VectorXd random_vector(Eigen::Index n, Rng& rng, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * standard_normal(rng);
  return v;
}

inline Eigen::VectorXd uniform_vector(Eigen::Index n, Rng& rng, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = lo + (hi - lo) * uniform_unit(rng);
  return v;
}

/// Central differences with step h.
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// max_i |a_i - b_i| / (1 + |a_i|).
inline double relative_gap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a(i) - b(i)) / (1.0 + std::abs(a(i))));
  }
  return worst;
}

}  // namespace rategame::testing
