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


#include "rategame/synthetic.hpp"

#include <cmath>

#include "rategame/errors.hpp"
#include "rategame/metrics.hpp"
#include "rategame/random.hpp"
#include "rategame/tasks.hpp"

namespace rategame {

Dataset make_gaussian_dataset(const GaussianOptions& o, std::uint64_t seed) {
  if (o.n == 0 || o.dim < 1) throw ConfigError("synthetic data needs n > 0 and dim >= 1");
  if (!(o.group_fraction > 0.0 && o.group_fraction < 1.0)) {
    throw ConfigError("group_fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  const double inv = 1.0 / std::sqrt(static_cast<double>(o.dim));
  Eigen::MatrixXd X(static_cast<Eigen::Index>(o.n), o.dim);
  std::vector<int> labels(o.n);
  std::vector<int> groups(o.n);
  for (std::size_t i = 0; i < o.n; ++i) {
    const int g = uniform_unit(rng) < o.group_fraction ? 1 : 0;
    Eigen::VectorXd x(o.dim);
    double s = 0.0;
    do {
      for (int j = 0; j < o.dim; ++j) x(j) = standard_normal(rng);
      if (g == 1) x(0) += o.group_shift;
      s = x.sum() * inv;
    } while (o.separable && std::abs(s) < o.margin);
    int y = s >= 0.0 ? 1 : -1;
    if (!o.separable && uniform_unit(rng) < o.label_noise) y = -y;
    X.row(static_cast<Eigen::Index>(i)) = x.transpose();
    labels[i] = y;
    groups[i] = g;
  }
  return Dataset("gaussian", std::move(X), std::move(labels), std::move(groups));
}

std::vector<LinearModel> direction_grid(int num_angles, std::span<const double> biases,
                                        double norm_bound) {
  if (num_angles < 1 || biases.empty()) throw ConfigError("direction grid needs angles and biases");
  std::vector<LinearModel> out;
  for (int a = 0; a < num_angles; ++a) {
    const double phi = 2.0 * 3.141592653589793 * a / num_angles;
    Eigen::VectorXd w(2);
    w << std::cos(phi), std::sin(phi);
    for (double b : biases) out.emplace_back(w, b, norm_bound);
  }
  return out;
}

std::vector<SyntheticTask> synthetic_suite(std::uint64_t seed) {
  GaussianOptions o;
  o.n = 1500;
  const Dataset ds = make_gaussian_dataset(o, seed);
  std::vector<SyntheticTask> suite;

  // Demographic parity objective under an error budget 10% above the
  // labelling hyperplane's training error.
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(2, 1.0 / std::sqrt(2.0));
  const double err = 1.0 - evaluate_rate(LinearModel(w, 0.0, 10.0), RateDefinition::accuracy(), ds);
  suite.push_back({"kld-error", ds, make_kld_parity_problem(ds, 1.1 * err)});

  // Error objective under per-group KLD constraints.
  ProblemSpec p;
  MetricParams mp;
  mp.p = ds.positive_proportion();
  const MetricSpec kld = build_metric(MetricKind::kKld, mp);
  std::vector<std::vector<int>> idx;
  for (int g = 0; g < ds.num_groups(); ++g) {
    idx.push_back(p.add_rates({RateDefinition::positive_prediction(g, Sense::kDecreasing),
                               RateDefinition::negative_prediction(g, Sense::kDecreasing)}));
  }
  const int acc = p.add_rates({RateDefinition::accuracy(Sense::kDecreasing)}).front();
  p.linear_objective = error_rate_function(p.num_rates(), acc);
  for (int g = 0; g < ds.num_groups(); ++g) {
    p.convex_constraints.push_back(
        MetricTerm{kld, idx[static_cast<std::size_t>(g)], 0.01, "kld[g=" + std::to_string(g) + "]"});
  }
  p.validate();
  suite.push_back({"error-kld", ds, std::move(p)});
  return suite;
}

}  // namespace rategame
