// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/model/target.hpp"

#include <array>

#include "iaif/model/model.hpp"
#include "iaif/util/error.hpp"

namespace iaif::model {

TargetSpec TargetSpec::mean_test_loss(data::Dataset test) {
  if (test.size() == 0) throw SizeError("target test set is empty");
  return {TargetKind::mean_test_loss, std::move(test)};
}

TargetSpec TargetSpec::single_example(const data::Dataset& source, std::size_t index) {
  if (index >= source.size()) throw SizeError("target example index out of range");
  const std::array<std::size_t, 1> one{index};
  return {TargetKind::single_example, source.subset(one)};
}

double target_value(const ModelParams& params, const TargetSpec& target) {
  return mean_loss(params, target.examples);
}

Vector target_grad(const ModelParams& params, const TargetSpec& target) {
  return mean_loss_grad(params, target.examples);
}

}  // namespace iaif::model
