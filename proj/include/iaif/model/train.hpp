// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "iaif/data/dataset.hpp"
#include "iaif/model/arch.hpp"

namespace iaif::model {

enum class Optimizer { newton, sgd };

struct TrainConfig {
  Optimizer optimizer = Optimizer::newton;
  double learning_rate = 0.01;
  std::size_t epochs = 200;
  std::size_t batch_size = 64;
  double weight_decay = 0.01;  // beta in beta/2 ||theta||^2
  double momentum = 0.0;
  std::uint64_t seed = 0;
  double convergence_tol = 1e-10;  // Newton: gradient norm of the full objective
  std::size_t max_iterations = 100;  // Newton only

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct TrainResult {
  ModelParams params;
  double final_objective = 0.0;
  double final_grad_norm = 0.0;
  std::size_t iterations = 0;  // Newton steps or SGD updates
};

/// Seeded starting point: zeros for linear models, He-uniform weights and
/// zero biases for the MLP.
ModelParams initial_params(const Arch& arch, std::uint64_t seed);

/// Minimizes (1/N) sum_i loss_i + beta/2 ||theta||^2.
TrainResult train(const Arch& arch, const data::Dataset& dataset, const TrainConfig& config);

/// Minimizes sum_i weights_i loss_i + beta/2 ||theta||^2. Weights may be
/// negative; Newton then requires the weighted Hessian to stay positive definite.
TrainResult train_weighted(const Arch& arch, const data::Dataset& dataset,
                           std::span<const double> weights, const TrainConfig& config);

}  // namespace iaif::model
