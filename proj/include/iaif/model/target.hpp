// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "iaif/data/dataset.hpp"
#include "iaif/model/arch.hpp"
#include "iaif/util/linalg.hpp"

namespace iaif::model {

enum class TargetKind { mean_test_loss, single_example };

/// The scalar being attributed: mean unregularized loss over `examples`.
/// A single-example target is a one-row dataset.
struct TargetSpec {
  TargetKind kind = TargetKind::mean_test_loss;
  data::Dataset examples;

  static TargetSpec mean_test_loss(data::Dataset test);
  static TargetSpec single_example(const data::Dataset& source, std::size_t index);
};

double target_value(const ModelParams& params, const TargetSpec& target);
Vector target_grad(const ModelParams& params, const TargetSpec& target);

}  // namespace iaif::model
