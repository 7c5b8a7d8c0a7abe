// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

// AArch64 only: Advanced SIMD is mandatory there, so no runtime probe is needed.

#include <arm_neon.h>

#include "iaif/simd/kernels.hpp"

namespace iaif::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double squared_distance_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double sum = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_neon(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_neon(a + r * cols, x, cols);
}

void gemv_transposed_neon(const double* a, std::size_t rows, std::size_t cols, const double* x,
                          double* y) {
  for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) axpy_neon(x[r], a + r * cols, y, cols);
}

void outer_update_neon(double alpha, const double* x, std::size_t m, const double* y,
                       std::size_t n, double* a) {
  for (std::size_t r = 0; r < m; ++r) axpy_neon(alpha * x[r], y, a + r * n, n);
}

void rank_one_update_upper_neon(double alpha, const double* x, std::size_t n, double* a) {
  for (std::size_t r = 0; r < n; ++r) axpy_neon(alpha * x[r], x + r, a + r * n + r, n - r);
}

}  // namespace

const KernelTable& neon_kernels() {
  static const KernelTable table{
      Level::neon,          dot_neon,          squared_distance_neon,
      axpy_neon,            gemv_neon,         gemv_transposed_neon,
      outer_update_neon,    rank_one_update_upper_neon,
  };
  return table;
}

}  // namespace iaif::simd::detail
