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

#include <Eigen/Dense>

namespace rategame {

enum class LpStatus { kOptimal, kInfeasible };

/// min c.mu  s.t.  A mu <= 0,  1.mu = 1,  mu >= 0.
struct ShrinkProblem {
  Eigen::VectorXd c;
  /// One row per constraint, one column per snapshot.
  Eigen::MatrixXd A;

  /// Throws ConfigError on mismatched sizes, non-finite entries or T = 0.
  void validate() const;
};

struct ShrinkResult {
  Eigen::VectorXd mu;
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  int support() const;
};

/// Two-phase dense simplex with Bland's rule. The optimum is a basic
/// solution, so at most J + 1 entries of mu are nonzero.
ShrinkResult solve_lp_simplex(const ShrinkProblem& problem, double tolerance = 1e-9);
ShrinkResult solve_lp_simplex(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                              double tolerance = 1e-9);

}  // namespace rategame
