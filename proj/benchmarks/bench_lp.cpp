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

#include "rategame/lp_simplex.hpp"
#include "rategame/random.hpp"

namespace {

/// Shrinking LP shape: J constraint rows over T snapshots, feasible at uniform weights.
rategame::ShrinkProblem shrink_problem(Eigen::Index J, Eigen::Index T) {
  rategame::Rng rng(7);
  rategame::ShrinkProblem p;
  p.c.resize(T);
  p.A.resize(J, T);
  for (Eigen::Index t = 0; t < T; ++t) {
    p.c(t) = rategame::uniform_unit(rng);
    for (Eigen::Index j = 0; j < J; ++j) p.A(j, t) = rategame::standard_normal(rng);
  }
  for (Eigen::Index j = 0; j < J; ++j) p.A.row(j).array() -= p.A.row(j).mean() + 0.1;
  return p;
}

void BM_ShrinkLp(benchmark::State& state) {
  const auto p = shrink_problem(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(rategame::solve_lp_simplex(p));
}
BENCHMARK(BM_ShrinkLp)->ArgsProduct({{1, 2, 4}, {20, 200, 2000}})->Unit(benchmark::kMicrosecond);

}  // namespace
