// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "iaif/curvature/curvature.hpp"
#include "iaif/data/dataset.hpp"
#include "iaif/model/arch.hpp"
#include "iaif/util/linalg.hpp"

namespace iaif::influence {

/// Column-major p x n block; column i belongs to example i.
using ColumnMatrix = Eigen::MatrixXd;

enum class Direction { removal, addition };

std::string to_string(Direction direction);

/// Per-example parameter shifts u_i = (curvature)^{-1} g_i.
struct ShiftSet {
  ColumnMatrix shifts;
  std::size_t n_train = 0;  // normalizer N
  curvature::Provenance provenance = curvature::Provenance::exact_hessian;

  std::size_t size() const { return static_cast<std::size_t>(shifts.cols()); }
  std::size_t dim() const { return static_cast<std::size_t>(shifts.rows()); }
  Vector shift(std::size_t i) const;
  /// Sum of member shifts in index order; zero for an empty group.
  Vector group_shift(std::span<const std::size_t> group) const;
};

/// Column i is grad loss(z_i) at params.
ColumnMatrix example_gradients(const model::ModelParams& params, const data::Dataset& dataset);

ShiftSet compute_shifts(const curvature::DampedCurvature& curvature, const ColumnMatrix& grads,
                        std::size_t n_train);

/// Removal: (1/N) target_grad . u_S. Addition: its negation. Zero for S empty.
double first_order(const Vector& target_grad, const ShiftSet& shifts,
                   std::span<const std::size_t> group, Direction direction);

/// (1/(2N^2)) u_S^T Hf u_S. Zero for S empty.
double interaction(const ShiftSet& shifts, std::span<const std::size_t> group, const Matrix& hf);

struct GroupEstimate {
  std::vector<std::size_t> group;
  double first_order = 0.0;
  double interaction = 0.0;
  double total = 0.0;
  Direction direction = Direction::removal;
};

GroupEstimate estimate_removal(const Vector& target_grad, const ShiftSet& shifts,
                               std::span<const std::size_t> group, const Matrix& hf);
GroupEstimate estimate_addition(const Vector& target_grad, const ShiftSet& shifts,
                                std::span<const std::size_t> group, const Matrix& hf);

/// u_a^T Hf u_b.
double kappa(const ShiftSet& shifts, std::size_t a, std::size_t b, const Matrix& hf);

/// M = H^{-1} Hf H^{-1}, materialized with 2p solves. Refuses p above `limit`.
Matrix interaction_operator(const curvature::DampedCurvature& curvature, const Matrix& hf,
                            std::size_t limit = 2000);

/// (sigma_a - y_a)(sigma_b - y_b) x_a^T M x_b
double factorized_kappa_lr(double sigma_a, double y_a, double sigma_b, double y_b,
                           std::span<const double> x_a, std::span<const double> x_b,
                           const Matrix& m);

/// r_a^T (J_a^T M J_b) r_b with J the p x C logit Jacobian.
double multiclass_kappa_factorized(const Vector& residual_a, const Vector& residual_b,
                                   const Matrix& jac_a, const Matrix& jac_b, const Matrix& m);

/// <p_a, p_b> - p_a[y_b] - p_b[y_a] + [y_a == y_b]
double residual_alignment(const Vector& prob_a, int label_a, const Vector& prob_b, int label_b);

struct SpectralTerm {
  double eigenvalue = 0.0;
  double contribution = 0.0;
};

/// Cached eigendecomposition of a symmetric target curvature.
class SpectralBasis {
 public:
  explicit SpectralBasis(const Matrix& hf);
  const Vector& eigenvalues() const { return values_; }
  const Eigen::MatrixXd& eigenvectors() const { return vectors_; }

  /// mu_k (v_k . left)(v_k . right) for every eigenpair, ascending mu.
  std::vector<SpectralTerm> terms(const Vector& left, const Vector& right) const;

 private:
  Vector values_;
  Eigen::MatrixXd vectors_;
};

std::vector<SpectralTerm> spectral_kappa(const ShiftSet& shifts, std::size_t a, std::size_t b,
                                         const SpectralBasis& basis);

struct SelfCross {
  double self_sum = 0.0;   // sum_i kappa(i, i)
  double cross_sum = 0.0;  // 2 sum_{i<j} kappa(i, j)
};

SelfCross self_cross_split(const ShiftSet& shifts, std::span<const std::size_t> group,
                           const Matrix& hf);

/// Entry (i, j): unweighted mean kappa over pairs with one member in class i
/// and the other in class j, self pairs excluded. NaN marks an entry with no
/// pairs (a diagonal class with fewer than two members).
Matrix class_pair_kappa_matrix(const ShiftSet& shifts, std::span<const int> labels, int n_classes,
                               const Matrix& hf);

nlohmann::json to_json(const GroupEstimate& estimate);

}  // namespace iaif::influence
