// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace iaif {

/// Stream tags for seed derivation. Every random draw in a pipeline comes from
/// `derive_seed(top_level_seed, tag, counter)`.
enum class Stream : std::uint64_t {
  synthetic_data = 1,
  split = 2,
  init = 3,
  shuffle = 4,
  groups = 5,
  pool = 6,
  random_selection = 7,
  probe = 8,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// seed' = splitmix64(splitmix64(seed ^ tag * 0x9E37...) + counter)
constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream tag, std::uint64_t counter = 0) {
  const auto t = static_cast<std::uint64_t>(tag);
  return splitmix64(splitmix64(seed ^ (t * 0x9E3779B97F4A7C15ULL)) + counter);
}

/// Portable generator: std::mt19937_64 bits with distributions defined here,
/// since the standard library's distributions are implementation-specific.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller; caches the second variate.
  double normal();

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  /// Random permutation of 0..n-1 (Fisher-Yates).
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace iaif
