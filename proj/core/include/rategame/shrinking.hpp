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
#include <vector>

#include "rategame/data.hpp"
#include "rategame/lp_simplex.hpp"
#include "rategame/problem.hpp"
#include "rategame/rates.hpp"
#include "rategame/trace.hpp"

namespace rategame {

/// Objective and constraint values of every snapshot on `eval_ds`.
ShrinkProblem build_shrink_problem(const Trace& trace, const ProblemSpec& p, const Dataset& eval_ds);

struct ShrinkOutcome {
  StochasticModel model;
  /// Snapshot index of every atom, in atom order.
  std::vector<std::size_t> snapshots;
  LpStatus status = LpStatus::kOptimal;
  /// Set when the LP was infeasible and the least-violation fallback was used.
  bool fallback = false;
};

/// Solves the shrinking LP over the snapshots. When it is infeasible, returns
/// the uniform mixture over the snapshots of least max violation.
ShrinkOutcome shrink(const Trace& trace, const ProblemSpec& p, const Dataset& eval_ds);
ShrinkOutcome shrink(const Trace& trace, const ShrinkProblem& problem);

/// Among candidates with max violation <= tolerance, the least objective;
/// otherwise the least max violation. Ties go to the earliest index.
std::size_t select_index(const std::vector<double>& objectives,
                         const std::vector<double>& max_violations, double tolerance);

struct BestIterate {
  LinearModel model;
  std::size_t snapshot = 0;
};

BestIterate best_iterate(const Trace& trace, const ProblemSpec& p, const Dataset& val_ds,
                         double tolerance);

/// Equal weight on every snapshot.
StochasticModel uniform_mixture(const Trace& trace);

}  // namespace rategame
