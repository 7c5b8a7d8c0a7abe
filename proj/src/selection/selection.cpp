// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/selection/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "iaif/util/error.hpp"
#include "iaif/util/format.hpp"
#include "iaif/util/parallel.hpp"

namespace iaif::selection {
namespace {

double inv_n(const CandidateCache& cache) {
  if (cache.n_train == 0) throw SizeError("candidate cache has N = 0");
  return 1.0 / static_cast<double>(cache.n_train);
}

void check_budget(const CandidateCache& cache, std::size_t budget) {
  if (budget > cache.size()) {
    throw SizeError("budget " + std::to_string(budget) + " exceeds pool size " +
                    std::to_string(cache.size()));
  }
}

}  // namespace

CandidateCache precompute(const curvature::DampedCurvature& curvature, const Matrix& hf,
                          const Vector& target_grad, const ColumnMatrix& pool_grads,
                          std::size_t n_train) {
  if (static_cast<std::size_t>(hf.rows()) != curvature.size() ||
      static_cast<std::size_t>(target_grad.size()) != curvature.size()) {
    throw SizeError("precompute: dimension mismatch");
  }
  CandidateCache cache;
  cache.n_train = n_train;
  cache.shifts = influence::compute_shifts(curvature, pool_grads, n_train).shifts;
  cache.weighted = Eigen::MatrixXd(hf) * cache.shifts;
  cache.self_terms = (cache.shifts.array() * cache.weighted.array()).colwise().sum().transpose();
  cache.first_order = inv_n(cache) * (cache.shifts.transpose() * target_grad);
  return cache;
}

SelectionState initial_state(const CandidateCache& cache, std::size_t budget) {
  check_budget(cache, budget);
  SelectionState state;
  state.accumulator = Vector::Zero(cache.shifts.rows());
  state.taken.assign(cache.size(), false);
  state.budget = budget;
  return state;
}

double marginal(const CandidateCache& cache, const SelectionState& state, std::size_t candidate) {
  if (candidate >= cache.size()) throw SizeError("candidate index out of range");
  if (state.taken[candidate]) {
    throw UsageError("candidate " + std::to_string(candidate) + " is already selected");
  }
  const double n = inv_n(cache);
  const auto i = static_cast<Eigen::Index>(candidate);
  return -cache.first_order[i] + n * n * state.accumulator.dot(cache.shifts.col(i)) +
         0.5 * n * n * cache.self_terms[i];
}

void commit(const CandidateCache& cache, SelectionState& state, std::size_t candidate) {
  if (candidate >= cache.size()) throw SizeError("candidate index out of range");
  if (state.taken[candidate]) throw UsageError("candidate already selected");
  if (state.selected.size() >= state.budget) throw UsageError("budget exhausted");
  state.taken[candidate] = true;
  state.selected.push_back(candidate);
  state.accumulator += cache.weighted.col(static_cast<Eigen::Index>(candidate));
}

double addition_estimate(const CandidateCache& cache, std::span<const std::size_t> set) {
  if (set.empty()) return 0.0;
  const double n = inv_n(cache);
  Vector u = Vector::Zero(cache.shifts.rows());
  Vector w = Vector::Zero(cache.shifts.rows());
  double linear = 0.0;
  for (std::size_t i : set) {
    if (i >= cache.size()) throw SizeError("candidate index out of range");
    const auto c = static_cast<Eigen::Index>(i);
    u += cache.shifts.col(c);
    w += cache.weighted.col(c);
    linear += cache.first_order[c];
  }
  return -linear + 0.5 * n * n * u.dot(w);
}

GreedyResult greedy_select(const CandidateCache& cache, std::size_t budget,
                           const GreedyOptions& options) {
  GreedyResult result;
  result.state = initial_state(cache, budget);
  if (!options.labels.empty() && options.labels.size() != cache.size()) {
    throw SizeError("one label per candidate required");
  }
  const std::size_t pool = cache.size();
  std::vector<double> scores(pool);
  double cumulative = 0.0;
  for (std::size_t step = 0; step < budget; ++step) {
    const SelectionState& snapshot = result.state;
    parallel_for(pool, options.threads, [&](std::size_t i) {
      scores[i] = snapshot.taken[i] ? 0.0 : marginal(cache, snapshot, i);
    });
    result.score_evaluations += pool - step;
    std::size_t best = pool;
    for (std::size_t i = 0; i < pool; ++i) {
      if (snapshot.taken[i]) continue;
      if (best == pool || scores[i] < scores[best]) best = i;
    }
    if (options.stop_at_positive && scores[best] > 0.0) break;
    commit(cache, result.state, best);
    cumulative += scores[best];
    TraceRow row{step, best, scores[best], cumulative, 0.0};
    if (!options.labels.empty()) row.entropy = class_entropy(result.state.selected, options.labels);
    result.trace.push_back(row);
  }
  return result;
}

std::vector<std::size_t> top_k_first_order(const CandidateCache& cache, std::size_t budget) {
  check_budget(cache, budget);
  std::vector<std::size_t> order(cache.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return -cache.first_order[static_cast<Eigen::Index>(a)] < -cache.first_order[static_cast<Eigen::Index>(b)];
  });
  order.resize(budget);
  return order;
}

double class_entropy(std::span<const std::size_t> selected, std::span<const int> labels) {
  if (selected.empty()) throw SizeError("class entropy of an empty selection");
  std::map<int, std::size_t> counts;
  for (std::size_t i : selected) {
    if (i >= labels.size()) throw SizeError("selected index has no label");
    ++counts[labels[i]];
  }
  double h = 0.0;
  const auto total = static_cast<double>(selected.size());
  for (const auto& [label, count] : counts) {
    const double p = static_cast<double>(count) / total;
    h -= p * std::log(p);
  }
  return h;
}

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "step,index,marginal,cumulative_addition_estimate,class_entropy\n";
  for (const auto& r : trace) {
    out += std::to_string(r.step) + "," + std::to_string(r.index) + "," + format_double(r.marginal) +
           "," + format_double(r.cumulative) + "," + format_double(r.entropy) + "\n";
  }
  return out;
}

}  // namespace iaif::selection
