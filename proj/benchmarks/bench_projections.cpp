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

#include "rategame/projections.hpp"
#include "rategame/random.hpp"

namespace {

Eigen::VectorXd draw(Eigen::Index n, std::uint64_t seed) {
  rategame::Rng rng(seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 3.0 * rategame::standard_normal(rng);
  return v;
}

void BM_NonnegL1Ball(benchmark::State& state) {
  const Eigen::VectorXd v = draw(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(rategame::project_nonneg_l1_ball(v, 1.0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NonnegL1Ball)->RangeMultiplier(4)->Range(4, 4096)->Complexity();

void BM_FlooredL1Ball(benchmark::State& state) {
  const Eigen::VectorXd v = draw(state.range(0), 2);
  const Eigen::VectorXd floor = Eigen::VectorXd::Constant(state.range(0), 1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(rategame::project_floored_l1_ball(v, floor, 20.0));
}
BENCHMARK(BM_FlooredL1Ball)->RangeMultiplier(4)->Range(4, 4096);

void BM_L2Ball(benchmark::State& state) {
  const Eigen::VectorXd v = draw(state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(rategame::project_l2_ball(v, 1.0));
}
BENCHMARK(BM_L2Ball)->Range(8, 4096);

}  // namespace
