// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <stdexcept>
#include <string>

#include "iaif/simd/kernels.hpp"

namespace iaif::simd {
namespace detail {
#if defined(IAIF_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif
#if defined(IAIF_HAVE_NEON)
const KernelTable& neon_kernels();
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(IAIF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* widest_table() {
#if defined(IAIF_HAVE_AVX2)
  if (cpu_has_avx2()) return &detail::avx2_kernels();
#endif
#if defined(IAIF_HAVE_NEON)
  return &detail::neon_kernels();
#endif
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> table{widest_table()};
  return table;
}

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::scalar: return "scalar";
    case Level::avx2: return "avx2";
    case Level::neon: return "neon";
  }
  return "unknown";
}

const KernelTable* kernels_for(Level level) {
  switch (level) {
    case Level::scalar: return &scalar_kernels();
    case Level::avx2:
#if defined(IAIF_HAVE_AVX2)
      if (cpu_has_avx2()) return &detail::avx2_kernels();
#endif
      return nullptr;
    case Level::neon:
#if defined(IAIF_HAVE_NEON)
      return &detail::neon_kernels();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Level> supported_levels() {
  std::vector<Level> levels;
  for (Level l : {Level::scalar, Level::avx2, Level::neon}) {
    if (kernels_for(l) != nullptr) levels.push_back(l);
  }
  return levels;
}

const KernelTable& kernels() { return *active_table().load(std::memory_order_relaxed); }

Level active_level() { return kernels().level; }

void set_active_level(Level level) {
  const KernelTable* table = kernels_for(level);
  if (table == nullptr) {
    throw std::invalid_argument("SIMD level not supported here: " + std::string(to_string(level)));
  }
  active_table().store(table, std::memory_order_relaxed);
}

}  // namespace iaif::simd
