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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "rategame/data.hpp"
#include "rategame/errors.hpp"
#include "rategame/random.hpp"
#include "rategame/rates.hpp"
#include "test_util.hpp"

using namespace rategame;
using rategame::testing::random_dataset;
using rategame::testing::tiny_dataset;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("rategame_" + name);
  std::ofstream(path) << text;
  return path;
}

TabularSchema yes_no_schema() {
  TabularSchema s;
  s.label_column = "y";
  s.positive_labels = {"yes"};
  s.protected_column = "grp";
  s.group_values = {"a"};
  s.numeric_columns = {"x"};
  s.categorical_columns = {"color"};
  return s;
}

LinearModel identity_model() { return LinearModel(Eigen::VectorXd::Ones(1), 0.0, 10.0); }

}  // namespace

TEST_CASE("dataset rejects bad labels and negative groups") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 1);
  CHECK_THROWS_AS(Dataset("d", x, {1, 0}, {0, 0}), ConfigError);
  CHECK_THROWS_AS(Dataset("d", x, {1, -1}, {0, -1}), ConfigError);
  CHECK_THROWS_AS(Dataset("d", x, {1}, {0}), ConfigError);
  CHECK_THROWS_AS(Dataset("d", Eigen::MatrixXd(0, 1), {}, {}), ConfigError);
}

TEST_CASE("positive proportion is the empirical fraction") {
  const auto ds = tiny_dataset({{0}, {1}, {2}, {3}, {4}}, {1, -1, 1, 1, -1}, {0, 1, 0, 1, 0});
  CHECK(ds.positive_proportion() == doctest::Approx(0.6));
  CHECK(ds.group_positive_proportion(0) == doctest::Approx(2.0 / 3.0));
  CHECK(ds.group_positive_proportion(1) == doctest::Approx(0.5));
  CHECK(ds.num_groups() == 2);
  CHECK_THROWS_AS(ds.group_positive_proportion(4), EvaluationError);
}

TEST_CASE("from_examples checks the feature dimension") {
  std::vector<Example> ex(2);
  ex[0].features = Eigen::VectorXd::Zero(2);
  ex[1].features = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(Dataset::from_examples("e", ex), ConfigError);
  ex[1].features = Eigen::VectorXd::Ones(2);
  ex[1].label = -1;
  const auto ds = Dataset::from_examples("e", ex);
  CHECK(ds.size() == 2);
  CHECK(ds.example(1).label == -1);
}

TEST_CASE("tabular loader maps labels, groups and one-hot columns") {
  const auto path = write_temp("yesno.csv",
                               "x,y,grp,color\n1.5,yes,a,red\n2,no,b,blue\n-1,yes,a,red\n");
  const auto ds = load_tabular_dataset(path, yes_no_schema());
  REQUIRE(ds.size() == 3);
  CHECK(ds.positive_proportion() == doctest::Approx(2.0 / 3.0));
  CHECK(ds.labels()[0] == 1);
  CHECK(ds.labels()[1] == -1);
  CHECK(ds.groups()[0] == 0);
  CHECK(ds.groups()[1] == 1);
  REQUIRE(ds.dim() == 3);
  CHECK(ds.feature_names()[1] == "color=blue");
  CHECK(ds.features()(1, 1) == 1.0);
  CHECK(ds.features()(0, 2) == 1.0);
  CHECK(ds.features()(2, 0) == -1.0);
}

TEST_CASE("tabular loader error contract") {
  auto schema = yes_no_schema();
  schema.protected_column = "race2";
  const auto good = write_temp("good.csv", "x,y,grp,color\n1,yes,a,red\n");
  try {
    load_tabular_dataset(good, schema);
    FAIL("expected a load error");
  } catch (const LoadError& e) {
    CHECK(std::string(e.what()).find("race2") != std::string::npos);
  }
  const auto bad_cell = write_temp("badcell.csv", "x,y,grp,color\nabc,yes,a,red\n");
  CHECK_THROWS_AS(load_tabular_dataset(bad_cell, yes_no_schema()), LoadError);
  const auto empty = write_temp("empty.csv", "");
  CHECK_THROWS_AS(load_tabular_dataset(empty, yes_no_schema()), LoadError);
  const auto header_only = write_temp("header.csv", "x,y,grp,color\n");
  CHECK_THROWS_AS(load_tabular_dataset(header_only, yes_no_schema()), LoadError);
  CHECK_THROWS_AS(load_tabular_dataset("/nonexistent/file.csv", yes_no_schema()), LoadError);
}

TEST_CASE("bundled COMPAS file loads with the documented encoding") {
  const char* env = std::getenv("RATEGAME_DATA_DIR");
  const std::filesystem::path dir = env ? env : "data";
  const auto path = dir / "compas.csv";
  if (!std::filesystem::exists(path)) {
    MESSAGE("compas.csv not found; skipping");
    return;
  }
  TabularSchema s;
  s.label_column = "two_year_recid";
  s.positive_labels = {"1"};
  s.protected_column = "race";
  s.group_values = {"African-American"};
  s.numeric_columns = {"age", "juv_fel_count", "juv_misd_count", "juv_other_count", "priors_count"};
  s.categorical_columns = {"sex", "age_cat", "race", "c_charge_degree"};
  const auto ds = load_tabular_dataset(path, s);
  CHECK(ds.size() == 6172);
  CHECK(ds.dim() == 18);
  CHECK(ds.num_groups() == 2);
}

TEST_CASE("split sizes follow the 4/9 : 2/9 : 1/3 floor rule") {
  auto sizes = [](std::size_t n) {
    const auto s = split_indices(n, 7);
    return std::vector<std::size_t>{s.train.size(), s.validation.size(), s.test.size()};
  };
  CHECK(sizes(9) == std::vector<std::size_t>{4, 2, 3});
  CHECK(sizes(4073) == std::vector<std::size_t>{1810, 905, 1358});
  CHECK(sizes(10) == std::vector<std::size_t>{4, 2, 4});
  CHECK_THROWS_AS(split_indices(8, 0), ConfigError);
}

TEST_CASE("splits are deterministic and partition the data") {
  const auto a = split_indices(500, 3);
  const auto b = split_indices(500, 3);
  CHECK(a.train == b.train);
  CHECK(a.validation == b.validation);
  CHECK(a.test == b.test);
  CHECK(split_indices(500, 4).train != a.train);
  std::set<std::size_t> all;
  for (const auto* part : {&a.train, &a.validation, &a.test}) {
    for (auto i : *part) CHECK(all.insert(i).second);
  }
  CHECK(all.size() == 500);
  CHECK(*all.rbegin() == 499);
}

TEST_CASE("prepare_splits standardizes with training statistics") {
  const auto ds = random_dataset(300, 3, 11);
  const auto splits = prepare_splits(ds, 5);
  const Eigen::VectorXd mean = splits.train.features().colwise().mean();
  CHECK(mean.cwiseAbs().maxCoeff() < 1e-12);
  const auto raw = split_dataset(ds, 5);
  const auto st = Standardizer::fit(raw.train);
  const Eigen::MatrixXd expect =
      ((raw.test.features().rowwise() - st.mean().transpose()).array().rowwise() /
       st.scale().transpose().array())
          .matrix();
  CHECK((splits.test.features() - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("evaluate_rate counts agreeing predictions") {
  const auto ds = tiny_dataset({{1}, {2}, {3}, {-1}}, {1, 1, 1, 1}, {0, 0, 0, 0});
  const auto acc = RateDefinition::accuracy(Sense::kIncreasing);
  CHECK(evaluate_rate(identity_model(), acc, ds) == 0.75);

  const LinearModel negative(Eigen::VectorXd::Zero(1), -1.0, 10.0);
  CHECK(evaluate_rate(negative, RateDefinition::positive_prediction(std::nullopt, Sense::kIncreasing),
                      ds) == 0.0);

  const auto two = tiny_dataset({{0.5}, {-0.5}, {1.0}}, {1, 1, -1}, {0, 0, 0});
  CHECK(evaluate_rate(identity_model(), RateDefinition::tpr(std::nullopt, Sense::kIncreasing), two) ==
        0.5);
}

TEST_CASE("a zero score predicts +1") {
  CHECK(predict_sign(0.0) == 1);
  CHECK(predict_sign(-1e-300) == -1);
  const auto ds = tiny_dataset({{0}}, {1}, {0});
  const LinearModel zero(Eigen::VectorXd::Zero(1), 0.0, 1.0);
  CHECK(evaluate_rate(zero, RateDefinition::positive_prediction(std::nullopt, Sense::kIncreasing), ds) ==
        1.0);
}

TEST_CASE("empty selection is an evaluation error naming the selector") {
  const auto ds = tiny_dataset({{1}, {2}}, {-1, -1}, {0, 0});
  try {
    evaluate_rate(identity_model(), RateDefinition::tpr(std::nullopt, Sense::kIncreasing), ds);
    FAIL("expected an evaluation error");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("label=+1") != std::string::npos);
  }
  CHECK_THROWS_AS(RateEvaluator(ds, {RateDefinition::tpr(1, Sense::kIncreasing)}), EvaluationError);
}

TEST_CASE("rate vectors match per-rate evaluation and brute-force counts") {
  const auto ds = random_dataset(200, 2, 3);
  Rng rng(9);
  const LinearModel m(rategame::testing::random_vector(2, rng), 0.2, 10.0);
  const std::vector<RateDefinition> one{RateDefinition::tpr(0, Sense::kIncreasing)};
  CHECK(evaluate_rate_vector(m, one, ds)(0) == evaluate_rate(m, one[0], ds));

  const std::vector<RateDefinition> two{RateDefinition::tpr(1, Sense::kIncreasing),
                                        RateDefinition::fpr(0, Sense::kIncreasing)};
  const auto r = evaluate_rate_vector(m, two, ds);
  double tp = 0, pos = 0, fp = 0, neg = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const int pred = m.score(ds.features().row(static_cast<Eigen::Index>(i)).transpose(), ds.groups()[i]) >= 0.0 ? 1 : -1;
    if (ds.groups()[i] == 1 && ds.labels()[i] == 1) {
      pos += 1;
      tp += pred == 1;
    }
    if (ds.groups()[i] == 0 && ds.labels()[i] == -1) {
      neg += 1;
      fp += pred == 1;
    }
  }
  CHECK(r(0) == doctest::Approx(tp / pos).epsilon(1e-15));
  CHECK(r(1) == doctest::Approx(fp / neg).epsilon(1e-15));
}

TEST_CASE("a separating model has unit TPR and TNR") {
  const auto ds = tiny_dataset({{-2}, {-1}, {1}, {3}}, {-1, -1, 1, 1}, {0, 1, 0, 1});
  const std::vector<RateDefinition> rates{RateDefinition::tpr(std::nullopt, Sense::kDecreasing),
                                          RateDefinition::tnr(std::nullopt, Sense::kDecreasing)};
  const auto r = evaluate_rate_vector(identity_model(), rates, ds);
  CHECK(r(0) == 1.0);
  CHECK(r(1) == 1.0);
}

TEST_CASE("rates lie in [0, 1] and complementary targets sum to one") {
  const auto ds = random_dataset(150, 3, 21);
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const LinearModel m(rategame::testing::random_vector(3, rng), standard_normal(rng), 10.0);
    for (std::optional<int> g : {std::optional<int>{}, std::optional<int>{0}, std::optional<int>{1}}) {
      const double pp = evaluate_rate(m, RateDefinition::positive_prediction(g, Sense::kIncreasing), ds);
      const double pn = evaluate_rate(m, RateDefinition::negative_prediction(g, Sense::kIncreasing), ds);
      CHECK(pp + pn == 1.0);
      CHECK(pp >= 0.0);
      CHECK(pp <= 1.0);
      const double tpr = evaluate_rate(m, RateDefinition::tpr(g, Sense::kIncreasing), ds);
      const double fnr = evaluate_rate(m, RateDefinition::fnr(g, Sense::kIncreasing), ds);
      CHECK(tpr + fnr == doctest::Approx(1.0).epsilon(1e-15));
    }
  }
}

TEST_CASE("stochastic rates are the weighted sum of atom rates") {
  const auto ds = tiny_dataset({{-2}, {-1}, {1}, {3}, {4}}, {-1, 1, 1, 1, -1}, {0, 0, 0, 0, 0});
  const std::vector<RateDefinition> pp{RateDefinition::positive_prediction(std::nullopt, Sense::kIncreasing)};
  const LinearModel m1(Eigen::VectorXd::Ones(1), -3.5, 10.0);  // 1 of 5 positive
  const LinearModel m2(Eigen::VectorXd::Ones(1), 0.5, 10.0);   // 3 of 5 positive
  CHECK(stochastic_rates(StochasticModel::point_mass(m1), pp, ds)(0) == evaluate_rate(m1, pp[0], ds));
  StochasticModel half{{{m1, 0.5}, {m2, 0.5}}};
  CHECK(stochastic_rates(half, pp, ds)(0) == doctest::Approx(0.4));

  const auto big = random_dataset(120, 2, 8);
  Rng rng(4);
  std::vector<LinearModel> models;
  for (int t = 0; t < 3; ++t) models.emplace_back(rategame::testing::random_vector(2, rng), 0.1 * t, 10.0);
  const std::vector<RateDefinition> rates{RateDefinition::tpr(0, Sense::kIncreasing),
                                          RateDefinition::fpr(1, Sense::kIncreasing),
                                          RateDefinition::accuracy()};
  const std::vector<double> w{0.2, 0.5, 0.3};
  StochasticModel mix;
  Eigen::VectorXd expect = Eigen::VectorXd::Zero(3);
  for (int t = 0; t < 3; ++t) {
    mix.atoms.push_back({models[static_cast<std::size_t>(t)], w[static_cast<std::size_t>(t)]});
    expect += w[static_cast<std::size_t>(t)] * evaluate_rate_vector(models[static_cast<std::size_t>(t)], rates, big);
  }
  CHECK((stochastic_rates(mix, rates, big) - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("stochastic rates are linear in the mixture weights") {
  const auto ds = random_dataset(200, 2, 13);
  Rng rng(6);
  const std::vector<RateDefinition> rates{RateDefinition::tpr(std::nullopt, Sense::kIncreasing),
                                          RateDefinition::positive_prediction(1, Sense::kIncreasing)};
  for (int trial = 0; trial < 20; ++trial) {
    StochasticModel m1{{{LinearModel(rategame::testing::random_vector(2, rng), 0.0, 5.0), 0.3},
                        {LinearModel(rategame::testing::random_vector(2, rng), 0.5, 5.0), 0.7}}};
    StochasticModel m2 = StochasticModel::point_mass(LinearModel(rategame::testing::random_vector(2, rng), -0.2, 5.0));
    const double a = uniform_unit(rng);
    StochasticModel mix;
    for (const auto& at : m1.atoms) mix.atoms.push_back({at.model, a * at.weight});
    for (const auto& at : m2.atoms) mix.atoms.push_back({at.model, (1 - a) * at.weight});
    const Eigen::VectorXd lhs = stochastic_rates(mix, rates, ds);
    const Eigen::VectorXd rhs = a * stochastic_rates(m1, rates, ds) + (1 - a) * stochastic_rates(m2, rates, ds);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("stochastic model weights are validated") {
  const LinearModel m(Eigen::VectorXd::Ones(1), 0.0, 1.0);
  const StochasticModel good{{{m, 0.25}, {m, 0.75}}};
  const StochasticModel over{{{m, 0.5}, {m, 0.6}}};
  const StochasticModel negative{{{m, -0.5}, {m, 1.5}}};
  CHECK_NOTHROW(good.validate());
  CHECK_THROWS_AS(over.validate(), ConfigError);
  CHECK_THROWS_AS(negative.validate(), ConfigError);
  CHECK_THROWS_AS(StochasticModel{}.validate(), ConfigError);
}

TEST_CASE("minibatch estimates") {
  const auto ds = random_dataset(400, 2, 17);
  const LinearModel m(Eigen::Vector2d(1.0, -0.5), 0.1, 10.0);
  const std::vector<RateDefinition> rates{RateDefinition::tpr(std::nullopt, Sense::kIncreasing),
                                          RateDefinition::positive_prediction(1, Sense::kIncreasing)};
  const Eigen::VectorXd exact = evaluate_rate_vector(m, rates, ds);

  std::vector<std::size_t> all(ds.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto full = minibatch_rate_estimate(m, rates, ds, all);
  CHECK((full.values - exact).cwiseAbs().maxCoeff() < 1e-15);

  Rng rng(1);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(2);
  for (int b = 0; b < 10000; ++b) {
    const auto batch = sample_batch(ds.size(), 32, rng);
    const auto est = minibatch_rate_estimate(m, rates, ds, batch);
    for (int k = 0; k < 2; ++k) {
      if (est.present[static_cast<std::size_t>(k)]) {
        sum(k) += est.values(k);
        count(k) += 1;
      }
    }
  }
  CHECK(std::abs(sum(0) / count(0) - exact(0)) < 0.01);
  CHECK(std::abs(sum(1) / count(1) - exact(1)) < 0.01);

  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < ds.size() && negatives.size() < 10; ++i) {
    if (ds.labels()[i] == -1) negatives.push_back(i);
  }
  const auto est = minibatch_rate_estimate(m, rates, ds, negatives);
  CHECK_FALSE(est.present[0]);
}

TEST_CASE("rate evaluator agrees with direct evaluation") {
  const auto ds = random_dataset(250, 3, 23);
  const std::vector<RateDefinition> rates{RateDefinition::tpr(0, Sense::kIncreasing),
                                          RateDefinition::tnr(1, Sense::kDecreasing),
                                          RateDefinition::accuracy()};
  const RateEvaluator ev(ds, rates);
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const LinearModel m(rategame::testing::random_vector(3, rng), standard_normal(rng), 10.0);
    CHECK((ev.evaluate(m) - evaluate_rate_vector(m, rates, ds)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("group adjustments shift the score per group") {
  const LinearModel m(Eigen::VectorXd::Ones(1), 0.5, 10.0, {{2.0, 0.0}, {-1.0, 3.0}});
  Eigen::VectorXd x(1);
  x << 1.0;
  CHECK(m.score(x, 0) == 3.0);
  CHECK(m.score(x, 1) == 1.5);
  CHECK(m.score(x, 5) == 1.5);
}
