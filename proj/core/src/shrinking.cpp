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


#include "rategame/shrinking.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include <spdlog/spdlog.h>

#include "rategame/errors.hpp"

namespace rategame {

namespace {

void require_snapshots(const Trace& trace) {
  if (trace.snapshots.empty()) throw ConfigError("trace has no snapshots");
}

double max_or_neg_inf(const Eigen::VectorXd& col) {
  return col.size() == 0 ? -std::numeric_limits<double>::infinity() : col.maxCoeff();
}

}  // namespace

ShrinkProblem build_shrink_problem(const Trace& trace, const ProblemSpec& p, const Dataset& eval_ds) {
  require_snapshots(trace);
  const RateEvaluator ev(eval_ds, p.rates);
  const auto T = static_cast<Eigen::Index>(trace.snapshots.size());
  const auto J = static_cast<Eigen::Index>(p.num_constraints());
  ShrinkProblem out{Eigen::VectorXd(T), Eigen::MatrixXd(J, T)};
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto e = p.evaluate(ev.evaluate(trace.snapshots[static_cast<std::size_t>(t)].model));
    out.c(t) = e.objective;
    for (Eigen::Index j = 0; j < J; ++j) out.A(j, t) = e.violations[static_cast<std::size_t>(j)];
  }
  return out;
}

ShrinkOutcome shrink(const Trace& trace, const ShrinkProblem& problem) {
  require_snapshots(trace);
  if (problem.c.size() != static_cast<Eigen::Index>(trace.snapshots.size())) {
    throw ConfigError("shrinking problem does not match the trace");
  }
  const auto lp = solve_lp_simplex(problem);
  ShrinkOutcome out;
  out.status = lp.status;
  if (lp.status == LpStatus::kOptimal) {
    for (Eigen::Index t = 0; t < lp.mu.size(); ++t) {
      if (lp.mu(t) <= 0.0) continue;
      out.model.atoms.push_back({trace.snapshots[static_cast<std::size_t>(t)].model, lp.mu(t)});
      out.snapshots.push_back(static_cast<std::size_t>(t));
    }
    return out;
  }
  out.fallback = true;
  const auto T = problem.c.size();
  double least = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < T; ++t) least = std::min(least, max_or_neg_inf(problem.A.col(t)));
  for (Eigen::Index t = 0; t < T; ++t) {
    if (max_or_neg_inf(problem.A.col(t)) <= least) out.snapshots.push_back(static_cast<std::size_t>(t));
  }
  const double w = 1.0 / static_cast<double>(out.snapshots.size());
  for (auto t : out.snapshots) out.model.atoms.push_back({trace.snapshots[t].model, w});
  spdlog::warn("shrinking LP infeasible; using {} least-violation snapshot(s) (max violation {:.6g})",
               out.snapshots.size(), least);
  return out;
}

ShrinkOutcome shrink(const Trace& trace, const ProblemSpec& p, const Dataset& eval_ds) {
  return shrink(trace, build_shrink_problem(trace, p, eval_ds));
}

std::size_t select_index(const std::vector<double>& objectives,
                         const std::vector<double>& max_violations, double tolerance) {
  if (objectives.empty() || objectives.size() != max_violations.size()) {
    throw ConfigError("selection needs one objective and one violation per candidate");
  }
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    if (max_violations[i] > tolerance) continue;
    if (!best || objectives[i] < objectives[*best]) best = i;
  }
  if (best) return *best;
  std::size_t least = 0;
  for (std::size_t i = 1; i < max_violations.size(); ++i) {
    if (max_violations[i] < max_violations[least]) least = i;
  }
  return least;
}

BestIterate best_iterate(const Trace& trace, const ProblemSpec& p, const Dataset& val_ds,
                         double tolerance) {
  const auto sp = build_shrink_problem(trace, p, val_ds);
  std::vector<double> obj(static_cast<std::size_t>(sp.c.size()));
  std::vector<double> viol(obj.size());
  for (std::size_t t = 0; t < obj.size(); ++t) {
    obj[t] = sp.c(static_cast<Eigen::Index>(t));
    viol[t] = max_or_neg_inf(sp.A.col(static_cast<Eigen::Index>(t)));
  }
  const auto i = select_index(obj, viol, tolerance);
  return BestIterate{trace.snapshots[i].model, i};
}

StochasticModel uniform_mixture(const Trace& trace) {
  require_snapshots(trace);
  StochasticModel sm;
  const double w = 1.0 / static_cast<double>(trace.snapshots.size());
  for (const auto& s : trace.snapshots) sm.atoms.push_back({s.model, w});
  return sm;
}

}  // namespace rategame
