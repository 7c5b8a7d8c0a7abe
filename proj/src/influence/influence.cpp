// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/influence/influence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "iaif/model/model.hpp"
#include "iaif/util/error.hpp"

namespace iaif::influence {
namespace {

void check_members(const ShiftSet& shifts, std::span<const std::size_t> group) {
  for (std::size_t i : group) {
    if (i >= shifts.size()) {
      throw SizeError("group member " + std::to_string(i) + " outside shift set of size " +
                      std::to_string(shifts.size()));
    }
  }
}

double inv_n(const ShiftSet& shifts) {
  if (shifts.n_train == 0) throw SizeError("shift set has N = 0");
  return 1.0 / static_cast<double>(shifts.n_train);
}

}  // namespace

std::string to_string(Direction direction) {
  return direction == Direction::removal ? "removal" : "addition";
}

Vector ShiftSet::shift(std::size_t i) const {
  if (i >= size()) throw SizeError("shift index out of range");
  return shifts.col(static_cast<Eigen::Index>(i));
}

Vector ShiftSet::group_shift(std::span<const std::size_t> group) const {
  check_members(*this, group);
  Vector total = Vector::Zero(shifts.rows());
  for (std::size_t i : group) total += shifts.col(static_cast<Eigen::Index>(i));
  return total;
}

ColumnMatrix example_gradients(const model::ModelParams& params, const data::Dataset& dataset) {
  ColumnMatrix grads = ColumnMatrix::Zero(static_cast<Eigen::Index>(params.size()),
                                          static_cast<Eigen::Index>(dataset.size()));
  Vector g(static_cast<Eigen::Index>(params.size()));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    g.setZero();
    model::accumulate_grad(params, model::example_at(dataset, i), 1.0, g);
    grads.col(static_cast<Eigen::Index>(i)) = g;
  }
  return grads;
}

ShiftSet compute_shifts(const curvature::DampedCurvature& curvature, const ColumnMatrix& grads,
                        std::size_t n_train) {
  if (static_cast<std::size_t>(grads.rows()) != curvature.size()) {
    throw SizeError("gradient length does not match curvature dimension");
  }
  ShiftSet out;
  out.n_train = n_train;
  out.provenance = curvature.provenance();
  out.shifts = curvature.solve(Matrix(grads));
  if (!out.shifts.allFinite()) throw Error("non-finite parameter shift");
  return out;
}

double first_order(const Vector& target_grad, const ShiftSet& shifts,
                   std::span<const std::size_t> group, Direction direction) {
  if (group.empty()) return 0.0;
  if (static_cast<std::size_t>(target_grad.size()) != shifts.dim()) {
    throw SizeError("target gradient length does not match shifts");
  }
  const double value = inv_n(shifts) * target_grad.dot(shifts.group_shift(group));
  return direction == Direction::removal ? value : -value;
}

double interaction(const ShiftSet& shifts, std::span<const std::size_t> group, const Matrix& hf) {
  if (group.empty()) return 0.0;
  const Vector u = shifts.group_shift(group);
  const double n = inv_n(shifts);
  return 0.5 * n * n * u.dot(matvec(hf, u));
}

GroupEstimate estimate_removal(const Vector& target_grad, const ShiftSet& shifts,
                               std::span<const std::size_t> group, const Matrix& hf) {
  GroupEstimate e;
  e.group.assign(group.begin(), group.end());
  e.direction = Direction::removal;
  e.first_order = first_order(target_grad, shifts, group, Direction::removal);
  e.interaction = interaction(shifts, group, hf);
  e.total = e.first_order + e.interaction;
  return e;
}

GroupEstimate estimate_addition(const Vector& target_grad, const ShiftSet& shifts,
                                std::span<const std::size_t> group, const Matrix& hf) {
  GroupEstimate e = estimate_removal(target_grad, shifts, group, hf);
  e.direction = Direction::addition;
  e.first_order = -e.first_order;
  e.total = e.first_order + e.interaction;
  return e;
}

double kappa(const ShiftSet& shifts, std::size_t a, std::size_t b, const Matrix& hf) {
  return shifts.shift(a).dot(matvec(hf, shifts.shift(b)));
}

Matrix interaction_operator(const curvature::DampedCurvature& curvature, const Matrix& hf,
                            std::size_t limit) {
  if (curvature.size() > limit) {
    throw SizeError("interaction operator needs p <= " + std::to_string(limit));
  }
  if (static_cast<std::size_t>(hf.rows()) != curvature.size()) {
    throw SizeError("target curvature dimension mismatch");
  }
  // H^{-1} Hf H^{-1} = (H^{-1} (H^{-1} Hf)^T) since both factors are symmetric.
  const Matrix left = curvature.solve(hf);
  Matrix m = curvature.solve(Matrix(left.transpose()));
  symmetrize_from_upper(m);
  return m;
}

double factorized_kappa_lr(double sigma_a, double y_a, double sigma_b, double y_b,
                           std::span<const double> x_a, std::span<const double> x_b,
                           const Matrix& m) {
  if (x_a.size() != static_cast<std::size_t>(m.rows()) || x_b.size() != x_a.size()) {
    throw SizeError("feature length does not match the interaction operator");
  }
  const Eigen::Map<const Vector> xa(x_a.data(), static_cast<Eigen::Index>(x_a.size()));
  const Eigen::Map<const Vector> xb(x_b.data(), static_cast<Eigen::Index>(x_b.size()));
  return (sigma_a - y_a) * (sigma_b - y_b) * xa.dot(matvec(m, xb));
}

double multiclass_kappa_factorized(const Vector& residual_a, const Vector& residual_b,
                                   const Matrix& jac_a, const Matrix& jac_b, const Matrix& m) {
  if (jac_a.rows() != m.rows() || jac_b.rows() != m.rows() || jac_a.cols() != residual_a.size() ||
      jac_b.cols() != residual_b.size()) {
    throw SizeError("multiclass factorization: dimension mismatch");
  }
  const Matrix coupling = jac_a.transpose() * m * jac_b;  // C x C
  return residual_a.dot(coupling * residual_b);
}

double residual_alignment(const Vector& prob_a, int label_a, const Vector& prob_b, int label_b) {
  const auto c = prob_a.size();
  if (prob_b.size() != c || label_a < 0 || label_b < 0 || label_a >= c || label_b >= c) {
    throw SizeError("residual alignment: dimension or label mismatch");
  }
  return prob_a.dot(prob_b) - prob_a[label_b] - prob_b[label_a] + (label_a == label_b ? 1.0 : 0.0);
}

SpectralBasis::SpectralBasis(const Matrix& hf) {
  const Eigen::MatrixXd dense = hf;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
  if (eig.info() != Eigen::Success) throw Error("eigendecomposition of the target curvature failed");
  values_ = eig.eigenvalues();
  vectors_ = eig.eigenvectors();
}

std::vector<SpectralTerm> SpectralBasis::terms(const Vector& left, const Vector& right) const {
  const Vector pl = vectors_.transpose() * left;
  const Vector pr = vectors_.transpose() * right;
  std::vector<SpectralTerm> out(static_cast<std::size_t>(values_.size()));
  for (Eigen::Index k = 0; k < values_.size(); ++k) {
    out[static_cast<std::size_t>(k)] = {values_[k], values_[k] * pl[k] * pr[k]};
  }
  return out;
}

std::vector<SpectralTerm> spectral_kappa(const ShiftSet& shifts, std::size_t a, std::size_t b,
                                         const SpectralBasis& basis) {
  return basis.terms(shifts.shift(a), shifts.shift(b));
}

SelfCross self_cross_split(const ShiftSet& shifts, std::span<const std::size_t> group,
                           const Matrix& hf) {
  check_members(shifts, group);
  SelfCross out;
  std::vector<Vector> weighted;
  weighted.reserve(group.size());
  for (std::size_t i : group) weighted.push_back(matvec(hf, shifts.shift(i)));
  for (std::size_t s = 0; s < group.size(); ++s) {
    const auto us = shifts.shifts.col(static_cast<Eigen::Index>(group[s]));
    out.self_sum += us.dot(weighted[s]);
    for (std::size_t t = s + 1; t < group.size(); ++t) out.cross_sum += 2.0 * us.dot(weighted[t]);
  }
  return out;
}

Matrix class_pair_kappa_matrix(const ShiftSet& shifts, std::span<const int> labels, int n_classes,
                               const Matrix& hf) {
  if (n_classes < 1) throw SizeError("class-pair matrix needs a classification task");
  if (labels.size() != shifts.size()) throw SizeError("one label per shift required");
  for (int y : labels) {
    if (y < 0 || y >= n_classes) throw SizeError("label out of range");
  }
  const Eigen::MatrixXd weighted = Eigen::MatrixXd(hf) * shifts.shifts;
  const Eigen::MatrixXd pairs = shifts.shifts.transpose() * weighted;
  const auto C = static_cast<Eigen::Index>(n_classes);
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(C, C);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(C, C);
  const auto n = static_cast<Eigen::Index>(labels.size());
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const int ca = labels[static_cast<std::size_t>(a)];
      const int cb = labels[static_cast<std::size_t>(b)];
      sums(std::min(ca, cb), std::max(ca, cb)) += pairs(a, b);
      counts(std::min(ca, cb), std::max(ca, cb)) += 1.0;
    }
  }
  Matrix out(C, C);
  for (Eigen::Index i = 0; i < C; ++i) {
    for (Eigen::Index j = 0; j < C; ++j) {
      const Eigen::Index r = std::min(i, j);
      const Eigen::Index c = std::max(i, j);
      out(i, j) = counts(r, c) > 0 ? sums(r, c) / counts(r, c) : std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

nlohmann::json to_json(const GroupEstimate& estimate) {
  return {{"group", estimate.group},
          {"direction", to_string(estimate.direction)},
          {"first_order", estimate.first_order},
          {"interaction", estimate.interaction},
          {"total", estimate.total}};
}

}  // namespace iaif::influence
