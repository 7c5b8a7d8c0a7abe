// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iaif/curvature/curvature.hpp"
#include "iaif/influence/influence.hpp"
#include "iaif/util/linalg.hpp"

namespace iaif::selection {

using influence::ColumnMatrix;

/// Everything the greedy loop needs per pool candidate, computed once.
struct CandidateCache {
  ColumnMatrix shifts;    // u_i
  ColumnMatrix weighted;  // w_i = Hf u_i
  Vector self_terms;      // q_i = u_i . w_i
  Vector first_order;     // f_i = (1/N) target_grad . u_i
  std::size_t n_train = 0;

  std::size_t size() const { return static_cast<std::size_t>(shifts.cols()); }
};

CandidateCache precompute(const curvature::DampedCurvature& curvature, const Matrix& hf,
                          const Vector& target_grad, const ColumnMatrix& pool_grads,
                          std::size_t n_train);

struct SelectionState {
  std::vector<std::size_t> selected;
  Vector accumulator;  // sum of w_i over selected
  std::vector<bool> taken;
  std::size_t budget = 0;
};

SelectionState initial_state(const CandidateCache& cache, std::size_t budget);

/// -f_i + (1/N^2) w . u_i + q_i / (2 N^2). Throws UsageError if i is taken.
double marginal(const CandidateCache& cache, const SelectionState& state, std::size_t candidate);

/// Appends `candidate` and adds its w_i to the accumulator.
void commit(const CandidateCache& cache, SelectionState& state, std::size_t candidate);

/// Addition estimate of a set recomputed from the cache:
/// -sum f_i + (1/(2N^2)) u_S . (sum w_i).
double addition_estimate(const CandidateCache& cache, std::span<const std::size_t> set);

struct TraceRow {
  std::size_t step = 0;
  std::size_t index = 0;
  double marginal = 0.0;
  double cumulative = 0.0;  // running addition estimate
  double entropy = 0.0;     // class entropy of the selection so far (0 without labels)
};

struct GreedyOptions {
  bool stop_at_positive = false;
  std::size_t threads = 1;
  std::span<const int> labels;  // optional, enables the entropy column
};

struct GreedyResult {
  SelectionState state;
  std::vector<TraceRow> trace;
  std::size_t score_evaluations = 0;
};

/// K argmin steps over unselected candidates (ties to the lowest index).
GreedyResult greedy_select(const CandidateCache& cache, std::size_t budget,
                           const GreedyOptions& options = {});

/// K candidates with the smallest -f_i, ties to the lowest index.
std::vector<std::size_t> top_k_first_order(const CandidateCache& cache, std::size_t budget);

/// Shannon entropy (nats) of the selected labels' class frequencies.
double class_entropy(std::span<const std::size_t> selected, std::span<const int> labels);

std::string trace_csv(const std::vector<TraceRow>& trace);

}  // namespace iaif::selection
