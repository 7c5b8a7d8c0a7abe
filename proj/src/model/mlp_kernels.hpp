// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

// Forward and backward passes of the ReLU network, templated on the scalar so
// the same code yields gradients (double) and exact Hessian-vector products
// (Dual: forward-mode over the reverse pass).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "iaif/model/arch.hpp"
#include "iaif/simd/kernels.hpp"

namespace iaif::model::detail {

/// First-order dual number: value plus directional derivative.
struct Dual {
  double v = 0.0;
  double d = 0.0;

  Dual() = default;
  constexpr Dual(double value, double tangent = 0.0) : v(value), d(tangent) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual exp(Dual a) {
  const double e = std::exp(a.v);
  return {e, e * a.d};
}
inline Dual log(Dual a) { return {std::log(a.v), a.d / a.v}; }

inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }

inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.v; }

template <class T>
struct MlpTape {
  std::vector<std::vector<T>> act;  // act[0] input, act[l] output of hidden layer l
  std::vector<std::vector<T>> pre;  // pre[l] pre-activation of layer l (last = logits)
};

// z = W a + b for W of shape out x in.
template <class T>
void affine(const T* w, const T* b, std::size_t out, std::size_t in, const T* a, T* z) {
  if constexpr (std::is_same_v<T, double>) {
    simd::kernels().gemv(w, out, in, a, z);
    for (std::size_t r = 0; r < out; ++r) z[r] += b[r];
  } else {
    for (std::size_t r = 0; r < out; ++r) {
      T acc = b[r];
      const T* row = w + r * in;
      for (std::size_t c = 0; c < in; ++c) acc += row[c] * a[c];
      z[r] = acc;
    }
  }
}

template <class T>
void forward(const Mlp& arch, const T* theta, std::span<const double> x, MlpTape<T>& tape) {
  const auto widths = arch.widths();
  const std::size_t layers = widths.size() - 1;
  tape.act.resize(layers);
  tape.pre.resize(layers);
  tape.act[0].assign(x.begin(), x.end());
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = widths[l];
    const std::size_t out = widths[l + 1];
    const T* w = theta + offset;
    const T* b = w + out * in;
    offset += out * (in + 1);
    tape.pre[l].resize(out);
    affine(w, b, out, in, tape.act[l].data(), tape.pre[l].data());
    if (l + 1 < layers) {
      tape.act[l + 1].resize(out);
      for (std::size_t r = 0; r < out; ++r) {
        tape.act[l + 1][r] = value_of(tape.pre[l][r]) > 0.0 ? tape.pre[l][r] : T(0.0);
      }
    }
  }
}

/// Accumulates d(loss)/d(theta) into `grad` given delta = d(loss)/d(logits).
template <class T>
void backward(const Mlp& arch, const T* theta, const MlpTape<T>& tape, std::vector<T> delta,
              T* grad) {
  const auto widths = arch.widths();
  const std::size_t layers = widths.size() - 1;
  std::vector<std::size_t> offsets(layers);
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layers; ++l) {
    offsets[l] = offset;
    offset += widths[l + 1] * (widths[l] + 1);
  }
  std::vector<T> next;
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t in = widths[l];
    const std::size_t out = widths[l + 1];
    const T* w = theta + offsets[l];
    T* gw = grad + offsets[l];
    T* gb = gw + out * in;
    const T* a = tape.act[l].data();
    if constexpr (std::is_same_v<T, double>) {
      simd::kernels().outer_update(1.0, delta.data(), out, a, in, gw);
    } else {
      for (std::size_t r = 0; r < out; ++r) {
        for (std::size_t c = 0; c < in; ++c) gw[r * in + c] += delta[r] * a[c];
      }
    }
    for (std::size_t r = 0; r < out; ++r) gb[r] += delta[r];
    if (l == 0) break;
    next.assign(in, T(0.0));
    if constexpr (std::is_same_v<T, double>) {
      simd::kernels().gemv_transposed(w, out, in, delta.data(), next.data());
    } else {
      for (std::size_t r = 0; r < out; ++r) {
        for (std::size_t c = 0; c < in; ++c) next[c] += w[r * in + c] * delta[r];
      }
    }
    const auto& mask_source = tape.pre[l - 1];
    for (std::size_t c = 0; c < in; ++c) {
      if (!(value_of(mask_source[c]) > 0.0)) next[c] = T(0.0);
    }
    delta.swap(next);
  }
}

/// Loss and d(loss)/d(logits) of the output head.
template <class T>
T head_loss(const Mlp& arch, const std::vector<T>& logits, double y, std::vector<T>& delta) {
  delta.resize(logits.size());
  if (arch.regression) {
    const T r = logits[0] - T(y);
    delta[0] = r;
    return T(0.5) * r * r;
  }
  double shift = value_of(logits[0]);
  for (const T& z : logits) shift = std::max(shift, value_of(z));
  T total(0.0);
  for (const T& z : logits) total += exp(z - T(shift));
  const T lse = T(shift) + log(total);
  const auto label = static_cast<std::size_t>(y);
  for (std::size_t c = 0; c < logits.size(); ++c) {
    delta[c] = exp(logits[c] - lse) - T(c == label ? 1.0 : 0.0);
  }
  return lse - logits[label];
}

}  // namespace iaif::model::detail
