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


#include "rategame/lp_simplex.hpp"

#include <limits>
#include <vector>

#include "rategame/errors.hpp"

namespace rategame {

namespace {

/// Dense tableau. Columns: mu (T), slacks (J), artificial (1), rhs.
class Tableau {
 public:
  Tableau(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, double tol)
      : T_(c.size()), J_(A.rows()), tol_(tol) {
    const Eigen::Index m = J_ + 1;
    const Eigen::Index n = T_ + J_ + 1;
    tab_ = Eigen::MatrixXd::Zero(m, n + 1);
    tab_.topLeftCorner(J_, T_) = A;
    tab_.block(0, T_, J_, J_).setIdentity();
    tab_.row(J_).head(T_).setOnes();
    tab_(J_, T_ + J_) = 1.0;
    tab_(J_, n) = 1.0;
    basis_.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < J_; ++i) basis_[static_cast<std::size_t>(i)] = T_ + i;
    basis_[static_cast<std::size_t>(J_)] = T_ + J_;
    cost_ = Eigen::VectorXd::Zero(n);
    cost_.head(T_) = c;
  }

  /// Minimizes the artificial variable. Returns false if it stays positive.
  bool phase_one() {
    Eigen::VectorXd cost = Eigen::VectorXd::Zero(num_cols());
    cost(artificial()) = 1.0;
    run(cost, true);
    if (rhs(J_) > tol_ && basis_[static_cast<std::size_t>(J_)] == artificial()) return false;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (basis_[i] == artificial() && tab_(static_cast<Eigen::Index>(i), num_cols()) > tol_) return false;
    }
    // Drive a zero-level artificial out of the basis.
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (basis_[i] != artificial()) continue;
      const auto r = static_cast<Eigen::Index>(i);
      for (Eigen::Index j = 0; j < artificial(); ++j) {
        if (std::abs(tab_(r, j)) > tol_) {
          pivot(r, j);
          break;
        }
      }
    }
    return true;
  }

  void phase_two() { run(cost_, false); }

  Eigen::VectorXd mu() const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(T_);
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (basis_[i] < T_) out(basis_[i]) = std::max(0.0, tab_(static_cast<Eigen::Index>(i), num_cols()));
    }
    return out;
  }

 private:
  Eigen::Index num_cols() const { return T_ + J_ + 1; }
  Eigen::Index artificial() const { return T_ + J_; }
  double rhs(Eigen::Index r) const { return tab_(r, num_cols()); }

  void pivot(Eigen::Index r, Eigen::Index col) {
    tab_.row(r) /= tab_(r, col);
    for (Eigen::Index i = 0; i < tab_.rows(); ++i) {
      if (i == r) continue;
      const double f = tab_(i, col);
      if (f != 0.0) tab_.row(i) -= f * tab_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = col;
  }

  void run(const Eigen::VectorXd& cost, bool allow_artificial) {
    const Eigen::Index limit = allow_artificial ? num_cols() : artificial();
    const int max_pivots = 50 * static_cast<int>(num_cols() + tab_.rows()) + 1000;
    for (int it = 0; it < max_pivots; ++it) {
      // Reduced costs: cost_j - c_B^T column_j.
      Eigen::VectorXd cb(tab_.rows());
      for (std::size_t i = 0; i < basis_.size(); ++i) cb(static_cast<Eigen::Index>(i)) = cost(basis_[i]);
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < limit; ++j) {
        if (is_basic(j)) continue;
        const double rc = cost(j) - cb.dot(tab_.col(j));
        if (rc < -tol_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < tab_.rows(); ++i) {
        const double a = tab_(i, enter);
        if (a <= tol_) continue;
        const double ratio = std::max(0.0, rhs(i)) / a;
        if (ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && basis_[static_cast<std::size_t>(i)] <
                                                    basis_[static_cast<std::size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) throw OptimizationError("shrinking LP is unbounded");
      pivot(leave, enter);
    }
    throw OptimizationError("shrinking LP exceeded its pivot budget");
  }

  bool is_basic(Eigen::Index j) const {
    for (auto b : basis_) {
      if (b == j) return true;
    }
    return false;
  }

  Eigen::Index T_;
  Eigen::Index J_;
  double tol_;
  Eigen::MatrixXd tab_;
  std::vector<Eigen::Index> basis_;
  Eigen::VectorXd cost_;
};

}  // namespace

void ShrinkProblem::validate() const {
  if (c.size() == 0) throw ConfigError("shrinking needs at least one snapshot");
  if (A.rows() > 0 && A.cols() != c.size()) {
    throw ConfigError("constraint matrix has " + std::to_string(A.cols()) + " columns, expected " +
                      std::to_string(c.size()));
  }
  if (!c.allFinite() || !A.allFinite()) throw ConfigError("shrinking problem has non-finite entries");
}

int ShrinkResult::support() const {
  int n = 0;
  for (Eigen::Index t = 0; t < mu.size(); ++t) n += mu(t) > 0.0 ? 1 : 0;
  return n;
}

ShrinkResult solve_lp_simplex(const ShrinkProblem& problem, double tolerance) {
  problem.validate();
  const Eigen::MatrixXd A =
      problem.A.rows() == 0 ? Eigen::MatrixXd(0, problem.c.size()) : problem.A;
  Tableau tab(problem.c, A, tolerance);
  ShrinkResult out;
  if (!tab.phase_one()) {
    out.status = LpStatus::kInfeasible;
    out.mu = Eigen::VectorXd::Zero(problem.c.size());
    return out;
  }
  tab.phase_two();
  out.status = LpStatus::kOptimal;
  out.mu = tab.mu();
  const double s = out.mu.sum();
  if (s > 0.0) out.mu /= s;
  out.objective = problem.c.dot(out.mu);
  return out;
}

ShrinkResult solve_lp_simplex(const Eigen::VectorXd& c, const Eigen::MatrixXd& A, double tolerance) {
  return solve_lp_simplex(ShrinkProblem{c, A}, tolerance);
}

}  // namespace rategame
