// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "iaif/influence/influence.hpp"
#include "iaif/oracle/oracle.hpp"
#include "iaif/util/error.hpp"
#include "support/check.hpp"

using namespace iaif;
using namespace iaif::oracle;

namespace {

data::Dataset constant_fit(std::vector<double> values) {
  data::Dataset d;
  d.task = data::Task::regression();
  d.features = Matrix::Ones(static_cast<Eigen::Index>(values.size()), 1);
  d.labels = std::move(values);
  return d;
}

Trainer newton(const model::Arch& arch, double beta) {
  Trainer t{arch, {}};
  t.config.weight_decay = beta;
  return t;
}

struct Binary {
  data::Dataset train;
  data::Dataset test;
};

// Overlapping binary blobs, standardized, with an intercept column.
Binary binary(std::uint64_t seed, int per_class = 60, int dim = 3) {
  const auto raw = testing::blobs(2, per_class, dim, seed, 1.5, 1.0);
  const auto parts = data::split(raw, 0.25, seed);
  const auto st = data::Standardizer::fit(parts.train);
  return {data::with_bias_column(st.apply(parts.train)),
          data::with_bias_column(st.apply(parts.test))};
}

}  // namespace

TEST_CASE("spearman: reference values, ties and degenerate input") {
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> rev{4, 3, 2, 1};
  const std::vector<double> swap{1, 3, 2, 4};
  CHECK(spearman(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spearman(a, rev) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(spearman(a, swap) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(average_ranks(std::vector<double>{10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
  // Ties: ranks (1, 2.5, 2.5, 4) against (1, 2, 3, 4).
  const double tied = spearman(std::vector<double>{1, 2, 2, 3}, a);
  CHECK(tied == doctest::Approx(4.5 / std::sqrt(4.5 * 5.0)).epsilon(1e-15));
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DegenerateError);
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), SizeError);
  CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{1}), SizeError);
}

TEST_CASE("ground truth: one-dimensional quadratic") {
  const data::Dataset train = constant_fit({0.0, 2.0});
  const Trainer t = newton(model::LinearRegression{1}, 0.0);
  const auto target = model::TargetSpec::mean_test_loss(constant_fit({2.0}));
  const auto ref = t.fit(train).params;
  CHECK(ref.theta[0] == doctest::Approx(1.0).epsilon(1e-14));

  const std::size_t first = 0;
  CHECK(ground_truth_removal(train, std::span(&first, 1), t, target, ref).delta ==
        doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(ground_truth_addition(train, constant_fit({4.0}), t, target, ref).delta ==
        doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(ground_truth_removal(train, {}, t, target, ref).delta == 0.0);
  CHECK(ground_truth_addition(train, constant_fit({}), t, target, ref).delta == 0.0);
  const std::vector<std::size_t> all{0, 1};
  CHECK_THROWS_AS(ground_truth_removal(train, all, t, target, ref), DegenerateError);
}

TEST_CASE("ground truth: adding a proportional copy leaves LR unchanged") {
  const Binary b = binary(11);
  const Trainer t = newton(model::LogisticBinary{b.train.dim()}, 0.01);
  const auto target = model::TargetSpec::mean_test_loss(b.test);
  const auto ref = t.fit(b.train).params;
  CHECK(std::abs(ground_truth_addition(b.train, b.train, t, target, ref).delta) <= 1e-10);
}

TEST_CASE("reweighting path: superlinear convergence and the removal endpoint") {
  const Binary b = binary(5);
  const Trainer t = newton(model::LogisticBinary{b.train.dim()}, 0.0);
  const std::vector<std::size_t> group{3, 8, 13, 21, 34};
  const std::vector<double> eps{0.0, 1e-2, 5e-3, 2.5e-3};
  const PathCheck check = reweighting_path_check(b.train, group, eps, t);
  CHECK(check.points[0].distance <= 1e-10);
  for (std::size_t k = 2; k < check.points.size(); ++k) {
    CHECK(check.points[k].distance / check.points[k - 1].distance <= 0.35);
  }
  const double n = static_cast<double>(b.train.size());
  const auto endpoint = reweighted_params(b.train, group, -1.0 / n, t);
  const auto target = model::TargetSpec::mean_test_loss(b.test);
  const auto removed = ground_truth_removal(b.train, group, t, target, check.reference);
  CHECK(relative_error(endpoint.theta, removed.params.theta) <= 1e-9);

  Trainer sgd = t;
  sgd.config.optimizer = model::Optimizer::sgd;
  CHECK_THROWS_AS(reweighting_path_check(b.train, group, eps, sgd), ConfigError);
}

TEST_CASE("singleton removal: estimate and retraining agree in sign") {
  const Binary b = binary(21, 50, 3);
  const Trainer t = newton(model::LogisticBinary{b.train.dim()}, 0.01);
  const auto target = model::TargetSpec::mean_test_loss(b.test);
  const auto ref = t.fit(b.train).params;
  const curvature::DampedCurvature h(curvature::exact_hessian(ref, b.train, 0.01), 0.0,
                                     curvature::Provenance::exact_hessian);
  const auto shifts = influence::compute_shifts(h, influence::example_gradients(ref, b.train),
                                                b.train.size());
  const Vector tg = model::target_grad(ref, target);
  const Matrix hf = curvature::target_hessian(ref, target, curvature::Provenance::exact_hessian).matrix;
  std::size_t agree = 0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < b.train.size(); ++i) {
    const double truth = ground_truth_removal(b.train, std::span(&i, 1), t, target, ref).delta;
    if (std::abs(truth) <= 1e-9) continue;
    const double est = influence::estimate_removal(tg, shifts, std::span(&i, 1), hf).total;
    ++counted;
    if ((est > 0) == (truth > 0)) ++agree;
  }
  REQUIRE(counted > 0);
  CHECK(static_cast<double>(agree) >= 0.95 * static_cast<double>(counted));
}

TEST_CASE("estimate error shrinks as the removed group shrinks") {
  const Binary b = binary(8, 80, 3);
  const Trainer t = newton(model::LogisticBinary{b.train.dim()}, 0.01);
  const auto target = model::TargetSpec::mean_test_loss(b.test);
  const auto ref = t.fit(b.train).params;
  const curvature::DampedCurvature h(curvature::exact_hessian(ref, b.train, 0.01), 0.0,
                                     curvature::Provenance::exact_hessian);
  const auto shifts = influence::compute_shifts(h, influence::example_gradients(ref, b.train),
                                                b.train.size());
  const Vector tg = model::target_grad(ref, target);
  const Matrix hf = curvature::target_hessian(ref, target, curvature::Provenance::exact_hessian).matrix;
  // Same-class groups so member effects add up rather than cancel; the error
  // is averaged over several draws per size.
  std::vector<std::size_t> same;
  for (std::size_t i = 0; i < b.train.size(); ++i) {
    if (b.train.class_of(i) == 0) same.push_back(i);
  }
  Rng rng(99);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t size : {40, 20, 10, 5}) {
    double total = 0.0;
    for (int draw = 0; draw < 8; ++draw) {
      auto perm = rng.permutation(same.size());
      std::vector<std::size_t> group;
      for (std::size_t k = 0; k < size; ++k) group.push_back(same[perm[k]]);
      std::sort(group.begin(), group.end());
      const double truth = ground_truth_removal(b.train, group, t, target, ref).delta;
      total += std::abs(influence::estimate_removal(tg, shifts, group, hf).total - truth);
    }
    CHECK(total < previous);
    previous = total;
  }
}

TEST_CASE("attribution benchmark: singletons on convex LR and determinism") {
  const Binary b = binary(3, 60, 3);
  AttributionConfig cfg;
  cfg.trainer = newton(model::LogisticBinary{b.train.dim()}, 0.01);
  cfg.group_size = 1;
  cfg.n_groups = 30;
  cfg.construction = data::GroupConstruction::random;
  cfg.seed = 4;
  const auto target = model::TargetSpec::mean_test_loss(b.test);
  const BenchmarkReport r = run_attribution_benchmark(b.train, target, cfg);
  CHECK(r.records.size() == 30);
  CHECK(r.rho_first_order >= 0.95);
  CHECK(std::abs(r.rho_with_interaction) <= 1.0);
  for (const auto& rec : r.records) {
    CHECK(std::abs(rec.estimate - rec.additive_total) <= 1e-15);
  }

  cfg.threads = 3;
  const BenchmarkReport again = run_attribution_benchmark(b.train, target, cfg);
  CHECK(r.to_json().dump() == again.to_json().dump());
  CHECK(r.groups_csv() == again.groups_csv());
  const std::string csv = r.groups_csv();
  const auto rows = std::count(csv.begin(), csv.end(), '\n');
  CHECK(rows == 31);
  CHECK(r.timing.stages.size() == 6);
}

TEST_CASE("attribution benchmark: failures carry the stage name") {
  const Binary b = binary(3, 20, 2);
  AttributionConfig cfg;
  cfg.trainer = newton(model::LogisticBinary{b.train.dim()}, 0.01);
  cfg.group_size = b.train.size() + 1;
  cfg.n_groups = 2;
  try {
    run_attribution_benchmark(b.train, model::TargetSpec::mean_test_loss(b.test), cfg);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "groups");
  }
}

TEST_CASE("selection benchmark: full budget, random entropy and validation") {
  const auto raw = testing::blobs(10, 70, 4, 17, 4.0, 1.0);
  const auto parts = data::split(raw, 0.2, 17);
  const auto st = data::Standardizer::fit(parts.train);
  const auto train = data::with_bias_column(st.apply(parts.train));
  const auto test = data::with_bias_column(st.apply(parts.test));

  SelectionConfig cfg;
  cfg.trainer = newton(model::LogisticMulticlass{train.dim(), 10}, 0.05);
  cfg.pool_size = 540;
  cfg.budgets = {500, 540};
  cfg.seeds = {0, 1, 2, 3, 4};
  cfg.seed = 2;
  const SelectionReport r = run_selection_benchmark(train, test, cfg);
  CHECK(r.records.size() == 6);
  const double random_loss = r.find(Method::random, 540).loss_mean;
  CHECK(r.find(Method::top_k_first_order, 540).loss_mean == random_loss);
  CHECK(r.find(Method::greedy_interaction, 540).loss_mean == random_loss);
  CHECK(std::abs(r.find(Method::random, 500).entropy_mean - std::log(10.0)) <= 0.15);
  CHECK(r.traces.size() == 3);
  for (const auto& [method, trace] : r.traces) CHECK(trace.size() == 540);

  SelectionConfig bad = cfg;
  bad.budgets = {540, 500};
  CHECK_THROWS_AS(run_selection_benchmark(train, test, bad), ConfigError);
  bad.budgets = {600};
  CHECK_THROWS_AS(run_selection_benchmark(train, test, bad), ConfigError);
  CHECK(parse_method("greedy_interaction") == Method::greedy_interaction);
  CHECK_THROWS_AS(parse_method("greedy"), ConfigError);
}

TEST_CASE("selection benchmark: greedy trace agrees with its replayed estimate") {
  const auto raw = testing::blobs(3, 40, 3, 23, 3.0, 1.0);
  const auto parts = data::split(raw, 0.25, 23);
  const auto st = data::Standardizer::fit(parts.train);
  SelectionConfig cfg;
  const auto train = data::with_bias_column(st.apply(parts.train));
  const auto test = data::with_bias_column(st.apply(parts.test));
  cfg.trainer = newton(model::LogisticMulticlass{train.dim(), 3}, 0.05);
  cfg.pool_size = 60;
  cfg.budgets = {5, 20};
  cfg.seeds = {7};
  const SelectionReport r = run_selection_benchmark(train, test, cfg);
  const auto& greedy = r.find(Method::greedy_interaction, 20);
  const auto& trace = r.traces.back().second;
  CHECK(std::abs(trace[19].cumulative - greedy.addition_estimate) <=
        1e-10 * std::abs(greedy.addition_estimate));
  CHECK(greedy.addition_estimate <= r.find(Method::top_k_first_order, 20).addition_estimate + 1e-15);
  const SelectionReport again = run_selection_benchmark(train, test, cfg);
  CHECK(r.to_json().dump() == again.to_json().dump());
  CHECK(r.selection_csv() == again.selection_csv());
}
