// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/model/train.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "iaif/model/model.hpp"
#include "iaif/util/error.hpp"
#include "iaif/util/random.hpp"

namespace iaif::model {
namespace {

constexpr double kArmijo = 1e-4;

Matrix weighted_hessian(const ModelParams& params, const data::Dataset& dataset,
                        std::span<const double> weights, double beta) {
  const auto p = static_cast<Eigen::Index>(params.size());
  Matrix h = Matrix::Zero(p, p);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (weights[i] != 0.0) accumulate_exact_hessian(params, example_at(dataset, i), weights[i], h);
  }
  symmetrize_from_upper(h);
  h.diagonal().array() += beta;
  return h;
}

Vector newton_direction(const Matrix& h, const Vector& g) {
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() == Eigen::Success) return llt.solve(g);
  Eigen::LDLT<Matrix> ldlt(h);
  if (ldlt.info() == Eigen::Success) {
    Vector d = ldlt.solve(g);
    if (d.allFinite() && d.dot(g) > 0.0) return d;
  }
  return g;
}

TrainResult run_newton(const Arch& arch, const data::Dataset& dataset,
                       std::span<const double> weights, const TrainConfig& config) {
  if (!is_linear_model(arch)) {
    throw ConfigError("train.optimizer", "newton requires a linear model, got " + arch_name(arch));
  }
  const double beta = config.weight_decay;
  ModelParams params = initial_params(arch, config.seed);
  double value = weighted_objective(params, dataset, weights, beta);
  Vector grad = weighted_objective_grad(params, dataset, weights, beta);
  std::size_t iter = 0;
  for (; iter < config.max_iterations && grad.norm() > config.convergence_tol; ++iter) {
    const Vector dir = newton_direction(weighted_hessian(params, dataset, weights, beta), grad);
    const double slope = grad.dot(dir);
    double step = 1.0;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries, step *= 0.5) {
      ModelParams trial{arch, params.theta - step * dir};
      const double trial_value = weighted_objective(trial, dataset, weights, beta);
      if (!std::isfinite(trial_value)) continue;
      const Vector trial_grad = weighted_objective_grad(trial, dataset, weights, beta);
      // Near the optimum the objective stops resolving differences, so a
      // shrinking gradient also counts as progress.
      if (trial_value <= value - kArmijo * step * slope || trial_grad.norm() < grad.norm()) {
        params = std::move(trial);
        value = trial_value;
        grad = trial_grad;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!std::isfinite(value)) throw TrainingError("newton: objective became non-finite");
  const double norm = grad.norm();
  if (norm > config.convergence_tol) {
    throw TrainingError("newton: gradient norm " + std::to_string(norm) + " above tolerance after " +
                        std::to_string(iter) + " iterations");
  }
  return {std::move(params), value, norm, iter};
}

TrainResult run_sgd(const Arch& arch, const data::Dataset& dataset, std::span<const double> weights,
                    const TrainConfig& config) {
  const double beta = config.weight_decay;
  const std::size_t n = dataset.size();
  ModelParams params = initial_params(arch, config.seed);
  Vector velocity = Vector::Zero(params.theta.size());
  Vector grad(params.theta.size());
  Rng rng(derive_seed(config.seed, Stream::shuffle));
  std::size_t updates = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const std::vector<std::size_t> order = rng.permutation(n);
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      // Rescale so the batch estimates sum_i w_i grad_i without bias.
      const double scale = static_cast<double>(n) / static_cast<double>(stop - start);
      grad = beta * params.theta;
      double batch_loss = 0.0;
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = order[k];
        if (weights[i] == 0.0) continue;
        batch_loss += accumulate_grad(params, example_at(dataset, i), scale * weights[i], grad);
      }
      if (!std::isfinite(batch_loss) || !grad.allFinite()) {
        throw TrainingError("sgd diverged in epoch " + std::to_string(epoch));
      }
      if (config.momentum > 0.0) {
        velocity = config.momentum * velocity + grad;
        params.theta -= config.learning_rate * velocity;
      } else {
        params.theta -= config.learning_rate * grad;
      }
      ++updates;
    }
  }
  const double value = weighted_objective(params, dataset, weights, beta);
  if (!std::isfinite(value)) throw TrainingError("sgd: final objective is non-finite");
  const double norm = weighted_objective_grad(params, dataset, weights, beta).norm();
  return {std::move(params), value, norm, updates};
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate", "must be positive");
  if (epochs < 1) throw ConfigError("train.epochs", "must be at least 1");
  if (batch_size < 1) throw ConfigError("train.batch_size", "must be at least 1");
  if (!(weight_decay >= 0.0)) throw ConfigError("train.weight_decay", "must be non-negative");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train.momentum", "must be in [0, 1)");
  if (!(convergence_tol >= 0.0)) throw ConfigError("train.convergence_tol", "must be non-negative");
  if (max_iterations < 1) throw ConfigError("train.max_iterations", "must be at least 1");
}

ModelParams initial_params(const Arch& arch, std::uint64_t seed) {
  ModelParams params{arch, Vector::Zero(static_cast<Eigen::Index>(parameter_count(arch)))};
  const auto* mlp = std::get_if<Mlp>(&arch);
  if (mlp == nullptr) return params;
  Rng rng(derive_seed(seed, Stream::init));
  const auto widths = mlp->widths();
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t in = widths[l];
    const std::size_t out = widths[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(in));
    for (std::size_t k = 0; k < out * in; ++k) {
      params.theta[static_cast<Eigen::Index>(offset + k)] = rng.uniform(-bound, bound);
    }
    offset += out * (in + 1);
  }
  return params;
}

TrainResult train(const Arch& arch, const data::Dataset& dataset, const TrainConfig& config) {
  const std::vector<double> weights(dataset.size(), 1.0 / static_cast<double>(dataset.size()));
  return train_weighted(arch, dataset, weights, config);
}

TrainResult train_weighted(const Arch& arch, const data::Dataset& dataset,
                           std::span<const double> weights, const TrainConfig& config) {
  config.validate();
  dataset.validate();
  check_compatible(arch, dataset);
  if (weights.size() != dataset.size()) throw SizeError("one weight per example required");
  if (config.optimizer == Optimizer::newton) return run_newton(arch, dataset, weights, config);
  return run_sgd(arch, dataset, weights, config);
}

}  // namespace iaif::model
