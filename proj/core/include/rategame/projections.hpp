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

/// Euclidean projection onto {x >= 0, ||x||_1 <= radius}.
Eigen::VectorXd project_nonneg_l1_ball(const Eigen::VectorXd& v, double radius);

/// Euclidean projection onto {x >= floor, ||x||_1 <= radius} for a
/// coordinate-wise floor >= 0 with sum(floor) <= radius.
Eigen::VectorXd project_floored_l1_ball(const Eigen::VectorXd& v, const Eigen::VectorXd& floor,
                                        double radius);

/// Radial projection onto the l2 ball of radius `radius`.
Eigen::VectorXd project_l2_ball(const Eigen::VectorXd& w, double radius);

/// Coordinate-wise clamp into [lo, hi].
Eigen::VectorXd project_box(const Eigen::VectorXd& v, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi);
Eigen::VectorXd project_box(const Eigen::VectorXd& v, double lo, double hi);

struct ProjectionSpec {
  enum class Kind { kNonnegL1Ball, kL2Ball, kBox };
  Kind kind = Kind::kNonnegL1Ball;
  double radius = 1.0;
  double lo = 0.0;
  double hi = 1.0;

  static ProjectionSpec nonneg_l1_ball(double radius);
  static ProjectionSpec l2_ball(double radius);
  static ProjectionSpec box(double lo, double hi);

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
};

}  // namespace rategame
