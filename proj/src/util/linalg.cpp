// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/util/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "iaif/simd/kernels.hpp"
#include "iaif/util/error.hpp"

namespace iaif {

Vector matvec(const Matrix& m, const Vector& x) {
  if (m.cols() != x.size()) throw SizeError("matvec: dimension mismatch");
  Vector y(m.rows());
  simd::kernels().gemv(m.data(), static_cast<std::size_t>(m.rows()),
                       static_cast<std::size_t>(m.cols()), x.data(), y.data());
  return y;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw SizeError("dot: dimension mismatch");
  return simd::dot(as_span(a), as_span(b));
}

double asymmetry(const Matrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
    }
  }
  return worst;
}

void symmetrize_from_upper(Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) m(i, j) = m(j, i);
  }
}

double relative_error(const Vector& a, const Vector& b, double floor) {
  const double scale = std::max({a.norm(), b.norm(), floor});
  return (a - b).norm() / scale;
}

double relative_error(double a, double b, double floor) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / scale;
}

}  // namespace iaif
