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


#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "rategame/rates.hpp"
#include "rategame/surrogates.hpp"
#include "rategame/synthetic.hpp"

namespace {

using rategame::RateDefinition;
using rategame::Sense;

std::vector<RateDefinition> group_rates() {
  return {RateDefinition::positive_prediction(0, Sense::kDecreasing),
          RateDefinition::positive_prediction(1, Sense::kDecreasing),
          RateDefinition::accuracy(Sense::kDecreasing),
          RateDefinition::tpr(std::nullopt, Sense::kDecreasing)};
}

rategame::Dataset dataset(std::size_t n, int dim) {
  rategame::GaussianOptions o;
  o.n = n;
  o.dim = dim;
  return rategame::make_gaussian_dataset(o, 3);
}

void BM_WeightedSurrogate(benchmark::State& state) {
  const auto ds = dataset(static_cast<std::size_t>(state.range(0)), 20);
  const rategame::RateEvaluator ev(ds, group_rates());
  const Eigen::VectorXd params = Eigen::VectorXd::Constant(21, 0.05);
  const Eigen::Vector4d coeffs(0.5, -0.5, 1.0, -0.2);
  const auto sides = rategame::sides_for_coefficients(coeffs);
  for (auto _ : state) benchmark::DoNotOptimize(rategame::weighted_surrogate(ev, params, coeffs, sides));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WeightedSurrogate)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

void BM_TrueRates(benchmark::State& state) {
  const auto ds = dataset(static_cast<std::size_t>(state.range(0)), 20);
  const rategame::RateEvaluator ev(ds, group_rates());
  const rategame::LinearModel model(Eigen::VectorXd::Constant(20, 0.05), 0.1, 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(ev.evaluate(model));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrueRates)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

}  // namespace
