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

#include "rategame/projections.hpp"

#include <algorithm>
#include <functional>
#include <vector>

#include "rategame/errors.hpp"

namespace rategame {

Eigen::VectorXd project_nonneg_l1_ball(const Eigen::VectorXd& v, double radius) {
  if (!(radius >= 0.0)) throw ConfigError("l1 ball radius must be non-negative");
  Eigen::VectorXd x = v.cwiseMax(0.0);
  if (x.sum() <= radius) return x;
  if (radius == 0.0) return Eigen::VectorXd::Zero(v.size());

  // Sort-based simplex threshold.
  std::vector<double> u(x.data(), x.data() + x.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - radius) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  x = (x.array() - theta).cwiseMax(0.0).matrix();
  const double s = x.sum();
  if (s > radius) x *= radius / s;
  return x;
}

Eigen::VectorXd project_floored_l1_ball(const Eigen::VectorXd& v, const Eigen::VectorXd& floor,
                                        double radius) {
  if (floor.size() != v.size()) throw ConfigError("floor size mismatch");
  if ((floor.array() < 0.0).any()) throw ConfigError("floor must be non-negative");
  const double mass = floor.sum();
  if (mass > radius) throw ConfigError("floor exceeds the l1 ball radius");
  return project_nonneg_l1_ball(v - floor, radius - mass) + floor;
}

Eigen::VectorXd project_l2_ball(const Eigen::VectorXd& w, double radius) {
  if (!(radius > 0.0)) throw ConfigError("l2 ball radius must be positive");
  const double n = w.norm();
  if (n <= radius) return w;
  return w * (radius / n);
}

Eigen::VectorXd project_box(const Eigen::VectorXd& v, const Eigen::VectorXd& lo,
                            const Eigen::VectorXd& hi) {
  if (lo.size() != v.size() || hi.size() != v.size()) throw ConfigError("box size mismatch");
  if ((lo.array() > hi.array()).any()) throw ConfigError("box lower bound exceeds upper bound");
  return v.cwiseMax(lo).cwiseMin(hi);
}

Eigen::VectorXd project_box(const Eigen::VectorXd& v, double lo, double hi) {
  if (lo > hi) throw ConfigError("box lower bound exceeds upper bound");
  return v.cwiseMax(lo).cwiseMin(hi);
}

ProjectionSpec ProjectionSpec::nonneg_l1_ball(double radius) {
  if (!(radius > 0.0)) throw ConfigError("l1 ball radius must be positive");
  ProjectionSpec p;
  p.kind = Kind::kNonnegL1Ball;
  p.radius = radius;
  return p;
}

ProjectionSpec ProjectionSpec::l2_ball(double radius) {
  if (!(radius > 0.0)) throw ConfigError("l2 ball radius must be positive");
  ProjectionSpec p;
  p.kind = Kind::kL2Ball;
  p.radius = radius;
  return p;
}

ProjectionSpec ProjectionSpec::box(double lo, double hi) {
  if (lo > hi) throw ConfigError("box lower bound exceeds upper bound");
  ProjectionSpec p;
  p.kind = Kind::kBox;
  p.lo = lo;
  p.hi = hi;
  return p;
}

Eigen::VectorXd ProjectionSpec::apply(const Eigen::VectorXd& v) const {
  switch (kind) {
    case Kind::kNonnegL1Ball:
      return project_nonneg_l1_ball(v, radius);
    case Kind::kL2Ball:
      return project_l2_ball(v, radius);
    case Kind::kBox:
      return project_box(v, lo, hi);
  }
  return v;
}

}  // namespace rategame
