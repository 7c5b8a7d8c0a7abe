// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "iaif/data/dataset.hpp"
#include "iaif/util/linalg.hpp"

namespace iaif::model {

/// sigma(theta^T x), cross-entropy against y in {0, 1}. No implicit intercept.
struct LogisticBinary {
  std::size_t dim = 0;
  friend bool operator==(const LogisticBinary&, const LogisticBinary&) = default;
};

/// softmax(Theta x) with Theta stored class-major (C x d).
struct LogisticMulticlass {
  std::size_t dim = 0;
  std::size_t classes = 0;
  friend bool operator==(const LogisticMulticlass&, const LogisticMulticlass&) = default;
};

/// theta^T x with half squared error.
struct LinearRegression {
  std::size_t dim = 0;
  friend bool operator==(const LinearRegression&, const LinearRegression&) = default;
};

/// ReLU network dim -> hidden... -> outputs. Classification heads use softmax
/// cross-entropy over `outputs` logits; the regression head has one output
/// and half squared error.
struct Mlp {
  std::size_t dim = 0;
  std::vector<std::size_t> hidden{128, 64};
  std::size_t outputs = 0;
  bool regression = false;

  /// Layer widths including input and output.
  std::vector<std::size_t> widths() const;
  friend bool operator==(const Mlp&, const Mlp&) = default;
};

using Arch = std::variant<LogisticBinary, LogisticMulticlass, LinearRegression, Mlp>;

std::size_t parameter_count(const Arch& arch);
std::size_t input_dim(const Arch& arch);
/// Number of logits (1 for binary LR and regression heads).
std::size_t output_count(const Arch& arch);
bool is_linear_model(const Arch& arch);
bool is_regression(const Arch& arch);
std::string arch_name(const Arch& arch);

/// Throws SizeError when the dataset's dimension or task does not fit.
void check_compatible(const Arch& arch, const data::Dataset& dataset);

struct LayerBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// Contiguous slices of theta: one block for linear models, W and b per layer
/// for the MLP.
std::vector<LayerBlock> layer_blocks(const Arch& arch);

struct ModelParams {
  Arch arch;
  Vector theta;

  std::size_t size() const { return static_cast<std::size_t>(theta.size()); }
  /// Length matches the architecture and every entry is finite.
  void validate() const;
};

}  // namespace iaif::model
