// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/simd/kernels.hpp"

namespace iaif::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(a + r * cols, x, cols);
}

void gemv_transposed_scalar(const double* a, std::size_t rows, std::size_t cols, const double* x,
                            double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy_scalar(x[r], a + r * cols, y, cols);
}

void outer_update_scalar(double alpha, const double* x, std::size_t m, const double* y,
                         std::size_t n, double* a) {
  for (std::size_t r = 0; r < m; ++r) axpy_scalar(alpha * x[r], y, a + r * n, n);
}

void rank_one_update_upper_scalar(double alpha, const double* x, std::size_t n, double* a) {
  for (std::size_t r = 0; r < n; ++r) {
    const double s = alpha * x[r];
    axpy_scalar(s, x + r, a + r * n + r, n - r);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      Level::scalar,          dot_scalar,          squared_distance_scalar,
      axpy_scalar,            gemv_scalar,         gemv_transposed_scalar,
      outer_update_scalar,    rank_one_update_upper_scalar,
  };
  return table;
}

}  // namespace iaif::simd
