// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <span>

namespace iaif {

using Vector = Eigen::VectorXd;
/// Dense row-major matrix. Curvature matrices are symmetric, so the storage
/// order only matters for feature tables and Jacobians.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<double> as_span(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

inline std::span<const double> row_span(const Matrix& m, Eigen::Index row) {
  return {m.data() + row * m.cols(), static_cast<std::size_t>(m.cols())};
}

/// y = M x through the active SIMD kernels.
Vector matvec(const Matrix& m, const Vector& x);
double dot(const Vector& a, const Vector& b);

/// max_ij |M - M^T|
double asymmetry(const Matrix& m);

/// Mirrors the upper triangle into the lower one.
void symmetrize_from_upper(Matrix& m);

/// ||a - b|| / max(||a||, ||b||, floor)
double relative_error(const Vector& a, const Vector& b, double floor = 1e-300);
double relative_error(double a, double b, double floor = 1e-300);

}  // namespace iaif
