// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "iaif/data/dataset.hpp"
#include "iaif/model/arch.hpp"
#include "iaif/util/linalg.hpp"

namespace iaif::model {

/// A single labelled example viewed in place.
struct Example {
  std::span<const double> x;
  double y = 0.0;
};

inline Example example_at(const data::Dataset& dataset, std::size_t i) {
  return {dataset.row(i), dataset.labels[i]};
}

Vector logits(const ModelParams& params, std::span<const double> x);

/// Binary LR: [sigma]. Softmax heads: class probabilities. Regression: [y_hat].
Vector predict(const ModelParams& params, std::span<const double> x);

/// Data loss only; the L2 term belongs to the objective.
double loss(const ModelParams& params, const Example& z);

Vector grad_example(const ModelParams& params, const Example& z);

/// grad += weight * grad loss(z); returns loss(z).
double accumulate_grad(const ModelParams& params, const Example& z, double weight, Vector& grad);

/// Exact Hessian-vector product of loss(params, z).
Vector hvp_example(const ModelParams& params, const Example& z, const Vector& v);

/// d loss / d logits: sigma - y, p - onehot(y), or y_hat - t.
Vector logit_residual(const ModelParams& params, const Example& z);

/// p x C matrix whose column c is the gradient of logit c.
Matrix logit_jacobian(const ModelParams& params, std::span<const double> x);

/// Hessian of the loss in the logits (sigma(1-sigma), diag(p) - p p^T, or 1).
Matrix output_hessian(const ModelParams& params, std::span<const double> x);

/// Adds weight * (exact Hessian of loss(z)) to the upper triangle of `upper`.
/// Closed form for linear models, forward-over-reverse for the MLP.
void accumulate_exact_hessian(const ModelParams& params, const Example& z, double weight,
                              Matrix& upper);

/// Adds weight * J^T Lambda J to the upper triangle of `upper`, written as a
/// sum of PSD rank-one terms.
void accumulate_gauss_newton(const ModelParams& params, std::span<const double> x, double weight,
                             Matrix& upper);

/// Mean data loss over the dataset (no regularizer).
double mean_loss(const ModelParams& params, const data::Dataset& dataset);
Vector mean_loss_grad(const ModelParams& params, const data::Dataset& dataset);

/// sum_i w_i loss_i + beta/2 ||theta||^2
double weighted_objective(const ModelParams& params, const data::Dataset& dataset,
                          std::span<const double> weights, double beta);
Vector weighted_objective_grad(const ModelParams& params, const data::Dataset& dataset,
                               std::span<const double> weights, double beta);

/// Uniform weights 1/N.
double objective(const ModelParams& params, const data::Dataset& dataset, double beta);
Vector objective_grad(const ModelParams& params, const data::Dataset& dataset, double beta);

/// Fraction of rows whose argmax prediction matches the label.
double accuracy(const ModelParams& params, const data::Dataset& dataset);

/// Row i is predict(params, x_i); used as the neighbor-search probe.
Matrix predictions(const ModelParams& params, const data::Dataset& dataset);

double sigmoid(double t);

}  // namespace iaif::model
