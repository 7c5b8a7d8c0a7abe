// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "iaif/influence/influence.hpp"
#include "iaif/selection/selection.hpp"
#include "iaif/util/error.hpp"
#include "support/check.hpp"

using namespace iaif;
using namespace iaif::selection;
using curvature::DampedCurvature;
using curvature::Provenance;

namespace {

struct Problem {
  Matrix h;
  Matrix hf;
  Vector target_grad;
  ColumnMatrix grads;
  std::size_t n_train;
};

Matrix random_spd(Rng& rng, Eigen::Index p, double shift) {
  Matrix a(p, p);
  for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = rng.normal();
  Matrix s = a * a.transpose() / static_cast<double>(p);
  symmetrize_from_upper(s);
  s.diagonal().array() += shift;
  return s;
}

Problem random_problem(std::uint64_t seed, Eigen::Index p, Eigen::Index pool, std::size_t n_train) {
  Rng rng(seed);
  Problem pr{random_spd(rng, p, 0.5), random_spd(rng, p, 0.0), testing::random_vector(rng, p),
             ColumnMatrix(p, pool), n_train};
  for (Eigen::Index k = 0; k < pr.grads.size(); ++k) pr.grads.data()[k] = rng.normal();
  return pr;
}

CandidateCache cache_of(const Problem& pr) {
  return precompute(DampedCurvature(pr.h, 0.0, Provenance::exact_hessian), pr.hf, pr.target_grad,
                    pr.grads, pr.n_train);
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12}); }

}  // namespace

TEST_CASE("precompute: self terms, identity target curvature and kappa consistency") {
  const Problem pr = random_problem(1, 6, 12, 30);
  const CandidateCache cache = cache_of(pr);
  const DampedCurvature h(pr.h, 0.0, Provenance::exact_hessian);
  const auto shifts = influence::compute_shifts(h, pr.grads, pr.n_train);
  for (std::size_t i = 0; i < cache.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    CHECK(cache.self_terms[c] >= 0.0);
    CHECK(rel(cache.self_terms[c], influence::kappa(shifts, i, i, pr.hf)) <= 1e-12);
    CHECK(rel(cache.first_order[c], influence::first_order(pr.target_grad, shifts, std::span(&i, 1),
                                                           influence::Direction::removal)) <= 1e-12);
  }
  const Matrix id = Matrix::Identity(6, 6);
  const CandidateCache plain = precompute(h, id, pr.target_grad, pr.grads, pr.n_train);
  CHECK(plain.weighted == plain.shifts);
}

TEST_CASE("marginal: empty state and usage errors") {
  const Problem pr = random_problem(2, 5, 8, 20);
  const CandidateCache cache = cache_of(pr);
  SelectionState state = initial_state(cache, 3);
  const double n2 = 1.0 / 400.0;
  for (std::size_t i = 0; i < cache.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    CHECK(rel(marginal(cache, state, i), -cache.first_order[c] + 0.5 * n2 * cache.self_terms[c]) <= 1e-14);
  }
  commit(cache, state, 4);
  CHECK_THROWS_AS(marginal(cache, state, 4), UsageError);
  CHECK_THROWS_AS(commit(cache, state, 4), UsageError);
  CHECK_THROWS_AS(initial_state(cache, 9), SizeError);
}

TEST_CASE("marginal equals the difference of from-scratch addition estimates") {
  const Problem pr = random_problem(3, 7, 40, 50);
  const CandidateCache cache = cache_of(pr);
  const auto shifts = influence::compute_shifts(DampedCurvature(pr.h, 0.0, Provenance::exact_hessian),
                                                pr.grads, pr.n_train);
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    SelectionState state = initial_state(cache, 40);
    auto perm = rng.permutation(cache.size());
    const std::size_t k = rng.below(20);
    for (std::size_t t = 0; t < k; ++t) commit(cache, state, perm[t]);
    std::vector<std::size_t> base = state.selected;
    std::sort(base.begin(), base.end());
    const double before = influence::estimate_addition(pr.target_grad, shifts, base, pr.hf).total;
    for (std::size_t t = k; t < k + 5; ++t) {
      std::vector<std::size_t> grown = base;
      grown.push_back(perm[t]);
      std::sort(grown.begin(), grown.end());
      const double after = influence::estimate_addition(pr.target_grad, shifts, grown, pr.hf).total;
      CHECK(rel(marginal(cache, state, perm[t]), after - before) <= 1e-10);
    }
  }
}

TEST_CASE("marginal grows for a duplicate of a selected example") {
  const Problem pr = random_problem(4, 5, 6, 10);
  Problem dup = pr;
  dup.grads.col(5) = dup.grads.col(2);
  const CandidateCache cache = cache_of(dup);
  SelectionState state = initial_state(cache, 6);
  const double first = marginal(cache, state, 2);
  commit(cache, state, 2);
  CHECK(marginal(cache, state, 5) > first);
  CHECK(rel(marginal(cache, state, 5) - first, cache.self_terms[2] / 100.0) <= 1e-10);
}

TEST_CASE("duplicate pool: greedy diversifies where top-k does not") {
  // Pool {d, d', e}: d and d' identical, d individually most helpful.
  Problem pr;
  pr.h = Matrix::Identity(2, 2);
  pr.hf = Matrix::Identity(2, 2);
  pr.target_grad = Vector(2);
  pr.target_grad << -1.0, -12.0;
  pr.grads = ColumnMatrix(2, 3);
  pr.grads << 1.0, 1.0, 0.0,
              0.0, 0.0, 0.1;
  pr.n_train = 1;
  const CandidateCache cache = cache_of(pr);
  // Independent enumeration of the addition estimate over all pairs.
  auto estimate = [&](std::size_t a, std::size_t b) {
    const Vector u = pr.grads.col(static_cast<Eigen::Index>(a)) + pr.grads.col(static_cast<Eigen::Index>(b));
    return -pr.target_grad.dot(u) + 0.5 * u.squaredNorm();
  };
  CHECK(estimate(0, 2) < estimate(0, 1));
  CHECK(estimate(0, 2) == estimate(1, 2));

  const GreedyResult g = greedy_select(cache, 2);
  std::set<std::size_t> picked(g.state.selected.begin(), g.state.selected.end());
  CHECK(picked == std::set<std::size_t>{0, 2});
  CHECK(g.state.selected == std::vector<std::size_t>{2, 0});
  CHECK(top_k_first_order(cache, 2) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("greedy: full budget, accumulator integrity, trace and operation count") {
  const Problem pr = random_problem(5, 6, 25, 40);
  const CandidateCache cache = cache_of(pr);
  const GreedyResult full = greedy_select(cache, cache.size());
  std::vector<std::size_t> sorted = full.state.selected;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
  CHECK_THROWS_AS(greedy_select(cache, 26), SizeError);

  const GreedyResult g = greedy_select(cache, 10);
  std::size_t expected_ops = 0;
  for (std::size_t t = 0; t < 10; ++t) expected_ops += cache.size() - t;
  CHECK(g.score_evaluations == expected_ops);
  const auto shifts = influence::compute_shifts(DampedCurvature(pr.h, 0.0, Provenance::exact_hessian),
                                                pr.grads, pr.n_train);
  const Vector dense = Matrix(pr.hf) * shifts.group_shift(g.state.selected);
  CHECK(relative_error(g.state.accumulator, dense) <= 1e-10);
  double running = 0.0;
  for (std::size_t t = 0; t < g.trace.size(); ++t) {
    running += g.trace[t].marginal;
    CHECK(g.trace[t].cumulative == running);
    const std::span<const std::size_t> prefix(g.state.selected.data(), t + 1);
    CHECK(rel(g.trace[t].cumulative, addition_estimate(cache, prefix)) <= 1e-10);
  }
}

TEST_CASE("greedy: zero target curvature reproduces top-k") {
  Problem pr = random_problem(6, 5, 30, 20);
  pr.hf.setZero();
  const CandidateCache cache = cache_of(pr);
  for (std::size_t k = 0; k <= cache.size(); k += 3) {
    auto g = greedy_select(cache, k).state.selected;
    auto t = top_k_first_order(cache, k);
    std::sort(g.begin(), g.end());
    std::sort(t.begin(), t.end());
    CHECK(g == t);
  }
  CHECK(top_k_first_order(cache, 0).empty());
}

TEST_CASE("greedy is invariant to pool permutation") {
  const Problem pr = random_problem(7, 6, 30, 25);
  const CandidateCache cache = cache_of(pr);
  Rng rng(3);
  const auto perm = rng.permutation(30);
  Problem shuffled = pr;
  for (std::size_t k = 0; k < 30; ++k) {
    shuffled.grads.col(static_cast<Eigen::Index>(k)) = pr.grads.col(static_cast<Eigen::Index>(perm[k]));
  }
  const auto a = greedy_select(cache, 12).state.selected;
  const auto b = greedy_select(cache_of(shuffled), 12).state.selected;
  for (std::size_t t = 0; t < a.size(); ++t) CHECK(perm[b[t]] == a[t]);
}

TEST_CASE("greedy: threads do not change the result; early stop is opt-in") {
  const Problem pr = random_problem(8, 6, 40, 30);
  const CandidateCache cache = cache_of(pr);
  GreedyOptions par;
  par.threads = 4;
  CHECK(greedy_select(cache, 15).state.selected == greedy_select(cache, 15, par).state.selected);

  Problem hurt = pr;
  hurt.target_grad.setZero();  // every marginal is q_i / (2N^2) > 0
  const CandidateCache positive = cache_of(hurt);
  CHECK(greedy_select(positive, 5).state.selected.size() == 5);
  GreedyOptions stop;
  stop.stop_at_positive = true;
  CHECK(greedy_select(positive, 5, stop).state.selected.empty());
}

TEST_CASE("class entropy") {
  const std::vector<int> labels{0, 0, 0, 1, 2, 2};
  CHECK(class_entropy(std::vector<std::size_t>{0, 1, 2}, labels) == 0.0);
  CHECK(class_entropy(std::vector<std::size_t>{0, 3, 4}, labels) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  CHECK(class_entropy(std::vector<std::size_t>{0, 1, 2, 3}, labels) ==
        doctest::Approx(0.5623351446188083).epsilon(1e-15));
  CHECK_THROWS_AS(class_entropy(std::vector<std::size_t>{}, labels), SizeError);
}

TEST_CASE("trace csv uses round-trip precision") {
  std::vector<TraceRow> rows{{0, 3, 0.1, 0.1, 0.0}};
  const std::string csv = trace_csv(rows);
  CHECK(csv.find("0,3,0.10000000000000001,0.10000000000000001,0\n") != std::string::npos);
}
