// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "iaif/simd/kernels.hpp"
#include "iaif/util/random.hpp"

using iaif::Rng;
namespace simd = iaif::simd;

namespace {

std::vector<double> draw(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("scalar level is always supported and listed first") {
  const auto levels = simd::supported_levels();
  REQUIRE_FALSE(levels.empty());
  CHECK(levels.front() == simd::Level::scalar);
  CHECK(simd::kernels_for(simd::Level::scalar) == &simd::scalar_kernels());
}

TEST_CASE("every supported level agrees with the scalar reference") {
  const auto& ref = simd::scalar_kernels();
  Rng rng(99);
  // Lengths straddle the unrolled block, the 4-wide loop and the tail.
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 15u, 16u, 17u, 33u, 64u, 129u}) {
    const auto a = draw(rng, n);
    const auto b = draw(rng, n);
    for (auto level : simd::supported_levels()) {
      const auto* k = simd::kernels_for(level);
      REQUIRE(k != nullptr);
      CAPTURE(simd::to_string(level));
      CAPTURE(n);
      const double scale = 1.0 + static_cast<double>(n);
      CHECK(std::abs(k->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= 1e-13 * scale);
      CHECK(std::abs(k->squared_distance(a.data(), b.data(), n) -
                     ref.squared_distance(a.data(), b.data(), n)) <= 1e-13 * scale);

      auto y1 = b;
      auto y2 = b;
      k->axpy(0.37, a.data(), y1.data(), n);
      ref.axpy(0.37, a.data(), y2.data(), n);
      CHECK(max_abs_diff(y1, y2) <= 1e-15 * scale);

      const std::size_t rows = n % 5 + 1;
      const auto m = draw(rng, rows * n);
      std::vector<double> g1(rows), g2(rows);
      k->gemv(m.data(), rows, n, a.data(), g1.data());
      ref.gemv(m.data(), rows, n, a.data(), g2.data());
      CHECK(max_abs_diff(g1, g2) <= 1e-13 * scale);

      const auto xr = draw(rng, rows);
      std::vector<double> t1(n, 0.5), t2(n, 0.5);
      k->gemv_transposed(m.data(), rows, n, xr.data(), t1.data());
      ref.gemv_transposed(m.data(), rows, n, xr.data(), t2.data());
      CHECK(max_abs_diff(t1, t2) <= 1e-13 * scale);

      auto o1 = m;
      auto o2 = m;
      k->outer_update(-1.5, xr.data(), rows, a.data(), n, o1.data());
      ref.outer_update(-1.5, xr.data(), rows, a.data(), n, o2.data());
      CHECK(max_abs_diff(o1, o2) <= 1e-14 * scale);

      std::vector<double> u1(n * n, 1.0), u2(n * n, 1.0);
      k->rank_one_update_upper(0.25, a.data(), n, u1.data());
      ref.rank_one_update_upper(0.25, a.data(), n, u2.data());
      CHECK(max_abs_diff(u1, u2) <= 1e-14 * scale);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) CHECK(u1[i * n + j] == 1.0);
      }
    }
  }
}

TEST_CASE("scalar kernels match hand-computed values") {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{4, -5, 6};
  const auto& k = simd::scalar_kernels();
  CHECK(k.dot(a.data(), b.data(), 3) == 12.0);
  CHECK(k.squared_distance(a.data(), b.data(), 3) == 9.0 + 49.0 + 9.0);
  const std::vector<double> m{1, 2, 3, 4, 5, 6};  // 2 x 3
  std::vector<double> y(2);
  k.gemv(m.data(), 2, 3, a.data(), y.data());
  CHECK(y == std::vector<double>{14, 32});
}

TEST_CASE("active level can be switched and restored") {
  const auto original = simd::active_level();
  for (auto level : simd::supported_levels()) {
    simd::set_active_level(level);
    CHECK(simd::active_level() == level);
    CHECK(simd::kernels().level == level);
  }
  simd::set_active_level(original);
  for (auto level : {simd::Level::avx2, simd::Level::neon}) {
    if (simd::kernels_for(level) == nullptr) CHECK_THROWS_AS(simd::set_active_level(level), std::invalid_argument);
  }
}
