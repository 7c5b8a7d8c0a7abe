// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "iaif/data/dataset.hpp"
#include "iaif/model/arch.hpp"
#include "iaif/model/target.hpp"
#include "iaif/util/linalg.hpp"

namespace iaif::curvature {

enum class Provenance { exact_hessian, gauss_newton };

std::string to_string(Provenance provenance);

/// `automatic` picks the exact Hessian for linear models and Gauss-Newton for
/// the MLP.
enum class Mode { exact, gauss_newton, automatic };

Provenance resolve(Mode mode, const model::Arch& arch);

inline constexpr std::size_t kDefaultDenseLimit = 20000;

/// (1/N) sum_i Hess loss_i + beta I, assembled densely.
Matrix exact_hessian(const model::ModelParams& params, const data::Dataset& dataset, double beta,
                     std::size_t dense_limit = kDefaultDenseLimit);

/// (1/N) sum_i J_i Lambda_i J_i^T + beta I (J_i is p x C as in logit_jacobian).
Matrix gauss_newton(const model::ModelParams& params, const data::Dataset& dataset, double beta,
                    std::size_t dense_limit = kDefaultDenseLimit);

Matrix assemble(const model::ModelParams& params, const data::Dataset& dataset, double beta,
                Provenance provenance, std::size_t dense_limit = kDefaultDenseLimit);

/// base + damping * I with a cached Cholesky factor. Immutable once built.
class DampedCurvature {
 public:
  /// Throws NotPositiveDefiniteError when base + damping * I has no Cholesky
  /// factor, and SizeError when `base` is not square or not symmetric.
  DampedCurvature(Matrix base, double damping, Provenance provenance);

  std::size_t size() const { return static_cast<std::size_t>(base_.rows()); }
  const Matrix& base() const { return base_; }
  double damping() const { return damping_; }
  Provenance provenance() const { return provenance_; }

  /// (base + damping I)^{-1} v
  Vector solve(const Vector& v) const;
  /// Column-wise solve.
  Matrix solve(const Matrix& rhs) const;
  /// (base + damping I) v
  Vector matvec(const Vector& v) const;

 private:
  Matrix base_;
  double damping_;
  Provenance provenance_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

struct TargetCurvature {
  Matrix matrix;
  Provenance provenance = Provenance::exact_hessian;
  bool block_diagonal = false;
};

/// Hessian (or Gauss-Newton) of the target's mean loss. Never damped. With
/// `block_diagonal`, entries coupling different layers are zeroed.
TargetCurvature target_hessian(const model::ModelParams& params, const model::TargetSpec& target,
                               Provenance provenance, bool block_diagonal = false,
                               std::size_t dense_limit = kDefaultDenseLimit);

/// "IAIFMAT1", u64 rows, u64 cols, row-major little-endian doubles.
std::vector<std::uint8_t> serialize_matrix(const Matrix& m);
Matrix deserialize_matrix(std::span<const std::uint8_t> bytes);
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);

}  // namespace iaif::curvature
