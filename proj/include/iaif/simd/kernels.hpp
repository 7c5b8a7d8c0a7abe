// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace iaif::simd {

/// Instruction-set level of a kernel table.
enum class Level { scalar, avx2, neon };

std::string_view to_string(Level level);

/// Double-precision kernels used by every inner loop of the library.
///
/// All matrices are dense and row-major. The scalar table is the reference
/// implementation; vector tables must agree with it up to floating-point
/// reassociation of the reductions.
struct KernelTable {
  Level level;

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = A x, A is rows x cols
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
  // y = A^T x, A is rows x cols
  void (*gemv_transposed)(const double* a, std::size_t rows, std::size_t cols, const double* x,
                          double* y);
  // A += alpha * x y^T, A is m x n
  void (*outer_update)(double alpha, const double* x, std::size_t m, const double* y,
                       std::size_t n, double* a);
  // Upper triangle (j >= i) of the n x n matrix A += alpha * x x^T.
  void (*rank_one_update_upper)(double alpha, const double* x, std::size_t n, double* a);
};

const KernelTable& scalar_kernels();
/// Null when the build or the running CPU lacks the level.
const KernelTable* kernels_for(Level level);

/// Levels usable on this machine, scalar first.
std::vector<Level> supported_levels();

/// Table selected at startup: the widest supported level.
const KernelTable& kernels();
Level active_level();
/// Overrides the runtime choice. Throws std::invalid_argument for an
/// unsupported level. Not thread-safe with concurrent kernel calls.
void set_active_level(Level level);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return kernels().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace iaif::simd
