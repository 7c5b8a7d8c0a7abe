// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iaif/util/error.hpp"
#include "iaif/util/random.hpp"

namespace iaif::data {

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.task = task;
  out.name = name;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  out.labels.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::size_t i = indices[k];
    if (i >= size()) throw SizeError("subset index " + std::to_string(i) + " out of range");
    out.features.row(static_cast<Eigen::Index>(k)) = features.row(static_cast<Eigen::Index>(i));
    out.labels.push_back(labels[i]);
  }
  return out;
}

Dataset Dataset::without(std::span<const std::size_t> indices) const {
  std::vector<bool> drop(size(), false);
  for (std::size_t i : indices) {
    if (i >= size()) throw SizeError("removal index " + std::to_string(i) + " out of range");
    drop[i] = true;
  }
  std::vector<std::size_t> keep;
  keep.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (!drop[i]) keep.push_back(i);
  }
  return subset(keep);
}

Dataset Dataset::concatenated(const Dataset& extra) const {
  if (extra.size() == 0) return *this;
  if (extra.dim() != dim()) throw SizeError("concatenated: feature dimension mismatch");
  if (!(extra.task == task)) throw SizeError("concatenated: task mismatch");
  Dataset out;
  out.task = task;
  out.name = name;
  out.features.resize(features.rows() + extra.features.rows(), features.cols());
  out.features.topRows(features.rows()) = features;
  out.features.bottomRows(extra.features.rows()) = extra.features;
  out.labels = labels;
  out.labels.insert(out.labels.end(), extra.labels.begin(), extra.labels.end());
  return out;
}

void Dataset::validate() const {
  if (size() == 0) throw SizeError("dataset '" + name + "' is empty");
  if (static_cast<std::size_t>(features.rows()) != size()) {
    throw SizeError("dataset '" + name + "': feature rows do not match label count");
  }
  if (!features.allFinite()) throw FormatError("dataset '" + name + "' has non-finite features");
  if (task.is_classification()) {
    if (task.n_classes < 1) throw SizeError("classification task needs at least one class");
    for (std::size_t i = 0; i < size(); ++i) {
      const double y = labels[i];
      if (y != std::floor(y) || y < 0 || y >= task.n_classes) {
        throw FormatError("dataset '" + name + "': label " + std::to_string(y) + " at row " +
                          std::to_string(i) + " outside [0, " + std::to_string(task.n_classes) +
                          ")");
      }
    }
  } else {
    for (double y : labels) {
      if (!std::isfinite(y)) throw FormatError("dataset '" + name + "' has a non-finite target");
    }
  }
}

Dataset with_bias_column(const Dataset& dataset) {
  Dataset out = dataset;
  out.features.conservativeResize(Eigen::NoChange, dataset.features.cols() + 1);
  out.features.col(dataset.features.cols()).setOnes();
  return out;
}

Standardizer Standardizer::fit(const Dataset& train) {
  if (train.size() == 0) throw SizeError("cannot standardize an empty dataset");
  Standardizer s;
  const auto n = static_cast<double>(train.size());
  s.mean = train.features.colwise().sum().transpose() / n;
  s.scale.resize(train.features.cols());
  for (Eigen::Index j = 0; j < train.features.cols(); ++j) {
    const double var = (train.features.col(j).array() - s.mean(j)).square().sum() / n;
    const double sd = std::sqrt(var);
    s.scale(j) = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Dataset Standardizer::apply(const Dataset& dataset) const {
  if (dataset.features.cols() != mean.size()) throw SizeError("standardizer dimension mismatch");
  Dataset out = dataset;
  for (Eigen::Index i = 0; i < out.features.rows(); ++i) {
    out.features.row(i) =
        (out.features.row(i).transpose() - mean).cwiseQuotient(scale).transpose();
  }
  return out;
}

SplitResult split(const Dataset& dataset, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction", "must lie strictly between 0 and 1");
  }
  const std::size_t n = dataset.size();
  if (n < 2) throw SizeError("split needs at least two examples");
  auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

  Rng rng(seed);
  std::vector<std::size_t> perm = rng.permutation(n);
  SplitResult out;
  out.test_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  out.train_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
  std::sort(out.test_indices.begin(), out.test_indices.end());
  std::sort(out.train_indices.begin(), out.train_indices.end());
  out.train = dataset.subset(out.train_indices);
  out.test = dataset.subset(out.test_indices);
  out.train.name = dataset.name + "/train";
  out.test.name = dataset.name + "/test";
  return out;
}

}  // namespace iaif::data
