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


#include <doctest.h>

#include <cmath>
#include <vector>

#include "rategame/errors.hpp"
#include "rategame/metrics.hpp"
#include "rategame/random.hpp"
#include "rategame/sum_of_ratios.hpp"
#include "test_util.hpp"

using namespace rategame;
using rategame::testing::central_difference;
using rategame::testing::relative_gap;
using rategame::testing::uniform_vector;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

std::vector<MetricSpec> all_metrics() {
  MetricParams kp;
  kp.p = 0.3;
  return {build_metric("gmean"), build_metric("hmean"), build_metric("qmean"), build_metric("kld", kp),
          build_metric("fmeasure")};
}

/// Minimum of f over the grid {floor + i (1 - floor) / (n - 1)}^K.
double grid_min(const std::function<double(const Eigen::VectorXd&)>& f, int K, int n, double floor,
                Eigen::VectorXd* arg = nullptr) {
  std::vector<int> idx(static_cast<std::size_t>(K), 0);
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x(K);
  while (true) {
    for (int k = 0; k < K; ++k) x(k) = floor + (1.0 - floor) * idx[static_cast<std::size_t>(k)] / (n - 1);
    const double v = f(x);
    if (v < best) {
      best = v;
      if (arg) *arg = x;
    }
    int k = 0;
    while (k < K && ++idx[static_cast<std::size_t>(k)] == n) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == K) break;
  }
  return best;
}

double l1_objective(const MetricSpec& m, const Eigen::VectorXd& lambda, const Eigen::VectorXd& xi) {
  double v = m.value(xi);
  for (Eigen::Index k = 0; k < xi.size(); ++k) {
    v -= sense_sign(m.senses[static_cast<std::size_t>(k)]) * lambda(k) * xi(k);
  }
  return v;
}

}  // namespace

TEST_CASE("metric values at reference points") {
  CHECK(build_metric("gmean").value(vec({0.25, 1.0})) == doctest::Approx(0.5));
  CHECK(build_metric("qmean").value(vec({0.3, 0.4})) == doctest::Approx(0.5));
  MetricParams p;
  p.p = 0.5;
  CHECK(build_metric("kld", p).value(vec({0.5, 0.5})) == doctest::Approx(0.0));
  CHECK(build_metric("hmean").value(vec({1.0, 1.0})) == doctest::Approx(0.0));
  CHECK(build_metric("fmeasure").value(vec({0.5, 0.0, 0.5})) == doctest::Approx(1.0 - 1.0 / 1.5));
}

TEST_CASE("metric senses") {
  MetricParams p;
  p.p = 0.4;
  using S = Sense;
  CHECK(build_metric("gmean").senses == std::vector<S>{S::kDecreasing, S::kDecreasing});
  CHECK(build_metric("hmean").senses == std::vector<S>{S::kDecreasing, S::kDecreasing});
  CHECK(build_metric("qmean").senses == std::vector<S>{S::kIncreasing, S::kIncreasing});
  CHECK(build_metric("kld", p).senses == std::vector<S>{S::kDecreasing, S::kDecreasing});
  const auto f = build_metric("fmeasure");
  CHECK(f.pseudo_convex);
  CHECK(f.senses == std::vector<S>{S::kDecreasing, S::kIncreasing, S::kIncreasing});
}

TEST_CASE("metric construction errors") {
  CHECK_THROWS_AS(build_metric("kld"), ConfigError);
  CHECK_THROWS_AS(build_metric("auc"), ConfigError);
  CHECK_THROWS_AS(require_convex(build_metric("fmeasure"), "alg1"), ConfigError);
  CHECK_NOTHROW(require_convex(build_metric("gmean"), "alg1"));
  MetricParams bad;
  bad.domain_floor = 0.0;
  CHECK_THROWS_AS(build_metric("gmean", bad), ConfigError);
}

TEST_CASE("psi_grad reference values and domain errors") {
  const auto q = psi_grad(build_metric("qmean"), vec({0.3, 0.4}));
  CHECK(q(0) == doctest::Approx(0.6));
  CHECK(q(1) == doctest::Approx(0.8));
  MetricParams p;
  p.p = 0.5;
  const auto k = psi_grad(build_metric("kld", p), vec({0.5, 0.5}));
  CHECK(k(0) == doctest::Approx(-1.0));
  CHECK(k(1) == doctest::Approx(-1.0));
  const auto g = psi_grad(build_metric("gmean"), vec({1.0, 1.0}));
  CHECK(g(0) == doctest::Approx(-0.5));
  CHECK(g(1) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(psi_grad(build_metric("gmean"), vec({0.0, 0.5})), DomainError);
  CHECK_THROWS_AS(psi_grad(build_metric("gmean"), vec({0.5, 1.2})), DomainError);
  CHECK_THROWS_AS(psi_grad(build_metric("gmean"), vec({0.5})), DomainError);
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(42);
  for (const auto& m : all_metrics()) {
    const auto K = static_cast<Eigen::Index>(m.size());
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Eigen::VectorXd xi = uniform_vector(K, rng, 0.05, 0.95);
      const Eigen::VectorXd fd = central_difference(m.value, xi, 1e-5);
      worst = std::max(worst, relative_gap(psi_grad(m, xi), fd));
    }
    INFO(m.name);
    CHECK(worst <= 1e-4);
  }
}

TEST_CASE("gradient signs follow the senses") {
  Rng rng(7);
  for (const auto& m : all_metrics()) {
    const auto K = static_cast<Eigen::Index>(m.size());
    for (int t = 0; t < 200; ++t) {
      const Eigen::VectorXd g = psi_grad(m, uniform_vector(K, rng, m.domain_floor, 1.0));
      for (Eigen::Index k = 0; k < K; ++k) {
        INFO(m.name);
        if (m.senses[static_cast<std::size_t>(k)] == Sense::kIncreasing) {
          CHECK(g(k) >= 0.0);
        } else {
          CHECK(g(k) <= 0.0);
        }
      }
    }
  }
}

TEST_CASE("convex metrics satisfy midpoint convexity") {
  Rng rng(3);
  for (const auto& m : all_metrics()) {
    if (m.pseudo_convex) continue;
    const auto K = static_cast<Eigen::Index>(m.size());
    for (int t = 0; t < 500; ++t) {
      const Eigen::VectorXd a = uniform_vector(K, rng, m.domain_floor, 1.0);
      const Eigen::VectorXd b = uniform_vector(K, rng, m.domain_floor, 1.0);
      INFO(m.name);
      CHECK(m.value(0.5 * (a + b)) <= 0.5 * (m.value(a) + m.value(b)) + 1e-12);
    }
  }
}

TEST_CASE("Lipschitz constants bound the l1 gradient norm on the box") {
  Rng rng(19);
  for (const auto& m : all_metrics()) {
    const auto K = static_cast<Eigen::Index>(m.size());
    for (int t = 0; t < 500; ++t) {
      const Eigen::VectorXd xi = uniform_vector(K, rng, m.domain_floor, 1.0);
      INFO(m.name);
      CHECK(psi_grad(m, xi).lpNorm<1>() <= m.lipschitz + 1e-9);
    }
  }
}

TEST_CASE("KLD best response has the closed form") {
  MetricParams p;
  p.p = 0.5;
  p.kld_epsilon = 0.0;
  const auto m = build_metric("kld", p);
  const auto a = best_response_xi(m, vec({1.0, 1.0}));
  CHECK(a(0) == doctest::Approx(0.5));
  CHECK(a(1) == doctest::Approx(0.5));
  const auto b = best_response_xi(m, vec({0.5, 0.5}));
  CHECK(b(0) == 1.0);
  CHECK(b(1) == 1.0);
  const auto c = best_response_xi(m, vec({100.0, 0.0}));
  CHECK(c(0) == doctest::Approx(0.005));
  CHECK(c(1) == 1.0);
}

TEST_CASE("G-mean best response agrees with a 200x200 grid") {
  const auto m = build_metric("gmean");
  const Eigen::VectorXd lambda = vec({0.3, 0.3});
  const Eigen::VectorXd xi = best_response_xi(m, lambda);
  Eigen::VectorXd arg;
  const double best = grid_min([&](const Eigen::VectorXd& x) { return l1_objective(m, lambda, x); }, 2,
                               200, m.domain_floor, &arg);
  CHECK(l1_objective(m, lambda, xi) <= best + 1e-9);
  CHECK((xi - arg).lpNorm<Eigen::Infinity>() <= 1e-3);
}

TEST_CASE("unconstrained best responses are grid-optimal") {
  Rng rng(11);
  for (const auto& m : all_metrics()) {
    if (m.pseudo_convex) continue;
    const auto K = static_cast<int>(m.size());
    for (int t = 0; t < 10; ++t) {
      const Eigen::VectorXd lambda = uniform_vector(K, rng, 0.0, 2.0);
      const Eigen::VectorXd xi = best_response_xi(m, lambda);
      const double best =
          grid_min([&](const Eigen::VectorXd& x) { return l1_objective(m, lambda, x); }, K, 50, m.domain_floor);
      INFO(m.name);
      CHECK(l1_objective(m, lambda, xi) <= best + 1e-6);
      CHECK(xi.minCoeff() >= m.domain_floor);
      CHECK(xi.maxCoeff() <= 1.0);
    }
  }
}

TEST_CASE("constrained best responses are grid-optimal") {
  Rng rng(12);
  MetricParams kp;
  kp.p = 0.35;
  const std::vector<ConstraintSpec> cons{{build_metric("gmean"), 0.2}, {build_metric("hmean"), 0.3},
                                         {build_metric("kld", kp), 0.05}};
  for (int t = 0; t < 20; ++t) {
    const Eigen::VectorXd mult = uniform_vector(3, rng, 0.0, 1.5);
    const Eigen::VectorXd lambda = uniform_vector(2, rng, 0.0, 2.0);
    const Eigen::VectorXd xi = best_response_xi(cons, mult, lambda);
    auto f = [&](const Eigen::VectorXd& x) {
      double v = 0.0;
      for (std::size_t j = 0; j < cons.size(); ++j) v += mult(static_cast<Eigen::Index>(j)) * cons[j].value(x);
      return v + lambda.dot(x);
    };
    CHECK(f(xi) <= grid_min(f, 2, 50, 1e-3) + 1e-6);
  }
}

TEST_CASE("best response over overlapping terms in three coordinates") {
  Rng rng(13);
  const auto g = build_metric("gmean");
  const auto h = build_metric("hmean");
  for (int t = 0; t < 10; ++t) {
    const std::vector<XiTerm> terms{{&g, 0.5 + uniform_unit(rng), {0, 1}}, {&h, uniform_unit(rng), {1, 2}}};
    const Eigen::VectorXd linear = uniform_vector(3, rng, -0.5, 1.0);
    const Eigen::VectorXd xi = best_response_xi(terms, linear, 1e-3);
    auto f = [&](const Eigen::VectorXd& x) { return best_response_objective(terms, linear, x); };
    CHECK(f(xi) <= grid_min(f, 3, 50, 1e-3) + 1e-6);
  }
}

TEST_CASE("all-zero constraint multipliers are an unbounded best response") {
  const std::vector<ConstraintSpec> cons{{build_metric("gmean"), 0.2}};
  CHECK_THROWS_AS(best_response_xi(cons, vec({0.0}), vec({0.5, 0.5})), OptimizationError);
  try {
    best_response_xi(cons, vec({0.0}), vec({0.5, 0.5}));
  } catch (const OptimizationError& e) {
    CHECK(std::string(e.what()).find("unbounded best response") != std::string::npos);
  }
}

TEST_CASE("fmeasure-parity compiles to two positive terms") {
  const auto ds = rategame::testing::random_dataset(400, 2, 5);
  const auto c = compile_parity_constraint(ParityKind::kFMeasureParity, 0, 1, 0.01, ds);
  REQUIRE(c.spec.terms.size() == 2);
  CHECK(c.spec.threshold == doctest::Approx(1.01));
  CHECK(c.spec.terms[0].sign == 1);
  CHECK(c.spec.terms[1].sign == 1);
  CHECK_FALSE(c.transforms.empty());
  REQUIRE(c.rates.size() == 6);

  const double pa = ds.group_positive_proportion(0);
  const double pb = ds.group_positive_proportion(1);
  auto F = [](double p, double tpr, double fpr, double fnr) {
    const double tp = p * tpr, fp = (1 - p) * fpr, fn = p * fnr;
    return 2 * tp / (2 * tp + fp + fn);
  };
  Rng rng(8);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::VectorXd r = uniform_vector(6, rng, 0.01, 1.0);
    const double raw = F(pa, r(0), r(1), r(2)) - F(pb, r(3), r(4), r(5)) - 0.01;
    worst = std::max(worst, std::abs(c.spec.violation(r) - raw));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("predictive parity matches the precision difference") {
  const auto ds = rategame::testing::random_dataset(400, 2, 6);
  const auto c = compile_parity_constraint(ParityKind::kPredictiveParity, 1, 0, 0.02, ds);
  const double pa = ds.group_positive_proportion(1);
  const double pb = ds.group_positive_proportion(0);
  auto P = [](double p, double tpr, double fpr) { return p * tpr / (p * tpr + (1 - p) * fpr); };
  Rng rng(9);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const Eigen::VectorXd r = uniform_vector(4, rng, 0.01, 1.0);
    const double raw = P(pa, r(0), r(1)) - P(pb, r(2), r(3)) - 0.02;
    worst = std::max(worst, std::abs(c.spec.violation(r) - raw));
  }
  CHECK(worst <= 1e-10);

  const auto same = compile_parity_constraint(ParityKind::kPredictiveParity, 0, 0, 0.02, ds);
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd half = uniform_vector(2, rng, 0.01, 1.0);
    Eigen::VectorXd r(4);
    r << half, half;
    CHECK(same.spec.violation(r) == doctest::Approx(-0.02).epsilon(1e-12));
  }
}

TEST_CASE("churn difference keeps a signed second term") {
  auto ds = rategame::testing::random_dataset(300, 2, 10);
  std::vector<int> ref(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) ref[i] = (i % 3 == 0) ? -ds.labels()[i] : ds.labels()[i];
  ds = ds.with_reference(ref);
  const auto c = compile_parity_constraint(ParityKind::kChurnDifference, 0, 1, 0.05, ds);
  REQUIRE(c.spec.terms.size() == 2);
  CHECK(c.spec.terms[0].sign == 1);
  CHECK(c.spec.terms[1].sign == -1);
  CHECK(c.spec.threshold == 0.05);
  CHECK_THROWS_AS(compile_parity_constraint(ParityKind::kChurnDifference, 0, 1, 0.05,
                                            rategame::testing::random_dataset(30, 2, 1)),
                  ConfigError);
  CHECK_THROWS_AS(parse_parity_kind("demographic"), ConfigError);
}
