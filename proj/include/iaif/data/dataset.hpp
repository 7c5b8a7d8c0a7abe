// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "iaif/util/linalg.hpp"

namespace iaif::data {

enum class TaskKind { classification, regression };

struct Task {
  TaskKind kind = TaskKind::classification;
  int n_classes = 2;  // 0 for regression

  static Task classification(int n_classes) { return {TaskKind::classification, n_classes}; }
  static Task regression() { return {TaskKind::regression, 0}; }
  bool is_classification() const { return kind == TaskKind::classification; }
  friend bool operator==(const Task&, const Task&) = default;
};

/// Feature rows plus labels. Class labels are stored as exact small integers
/// in `labels`; regression targets are arbitrary reals.
struct Dataset {
  Matrix features;
  std::vector<double> labels;
  Task task;
  std::string name;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
  std::span<const double> row(std::size_t i) const {
    return row_span(features, static_cast<Eigen::Index>(i));
  }
  int class_of(std::size_t i) const { return static_cast<int>(labels[i]); }

  /// Rows in the given order (duplicates allowed).
  Dataset subset(std::span<const std::size_t> indices) const;
  /// Rows not in `indices`, keeping the original order.
  Dataset without(std::span<const std::size_t> indices) const;
  /// This dataset followed by the rows of `extra`.
  Dataset concatenated(const Dataset& extra) const;

  /// Throws SizeError / FormatError when an invariant is broken: N >= 1,
  /// matching row count, finite features, class labels in [0, C).
  void validate() const;
};

/// Appends a constant-one column so linear models get an intercept.
Dataset with_bias_column(const Dataset& dataset);

struct Standardizer {
  Vector mean;
  Vector scale;  // per-dimension standard deviation, 1 where it vanishes

  static Standardizer fit(const Dataset& train);
  Dataset apply(const Dataset& dataset) const;
};

struct SplitResult {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

/// Seeded random partition with round(N * test_fraction) test rows, clamped so
/// both sides are non-empty. Throws ConfigError unless 0 < test_fraction < 1.
SplitResult split(const Dataset& dataset, double test_fraction, std::uint64_t seed);

}  // namespace iaif::data
