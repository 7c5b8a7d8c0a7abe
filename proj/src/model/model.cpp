// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/model/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iaif/simd/kernels.hpp"
#include "iaif/util/error.hpp"
#include "mlp_kernels.hpp"

namespace iaif::model {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void check_input(const ModelParams& params, std::span<const double> x) {
  if (x.size() != input_dim(params.arch)) {
    throw SizeError("input has dimension " + std::to_string(x.size()) + ", model expects " +
                    std::to_string(input_dim(params.arch)));
  }
}

void check_label(const ModelParams& params, double y) {
  if (is_regression(params.arch)) return;
  const std::size_t classes = std::max<std::size_t>(2, output_count(params.arch));
  if (!(y >= 0.0 && y < static_cast<double>(classes)) || y != std::floor(y)) {
    throw SizeError("label " + std::to_string(y) + " out of range for " + arch_name(params.arch));
  }
}

// Numerically stable log(1 + e^t).
double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

Vector softmax(const Vector& z) {
  const double shift = z.maxCoeff();
  Vector p = (z.array() - shift).exp();
  return p / p.sum();
}

double log_sum_exp(const Vector& z) {
  const double shift = z.maxCoeff();
  return shift + std::log((z.array() - shift).exp().sum());
}

// ----- MLP helpers ---------------------------------------------------------

struct MlpPass {
  detail::MlpTape<double> tape;
  std::vector<double> delta;
  double loss = 0.0;
};

MlpPass mlp_pass(const Mlp& arch, const ModelParams& params, const Example& z) {
  MlpPass pass;
  detail::forward(arch, params.theta.data(), z.x, pass.tape);
  pass.loss = detail::head_loss(arch, pass.tape.pre.back(), z.y, pass.delta);
  return pass;
}

Vector mlp_hvp(const Mlp& arch, const ModelParams& params, const Example& z, const Vector& v) {
  const std::size_t p = params.size();
  std::vector<detail::Dual> theta(p);
  for (std::size_t k = 0; k < p; ++k) theta[k] = {params.theta[static_cast<Eigen::Index>(k)], v[static_cast<Eigen::Index>(k)]};
  detail::MlpTape<detail::Dual> tape;
  detail::forward(arch, theta.data(), z.x, tape);
  std::vector<detail::Dual> delta;
  detail::head_loss(arch, tape.pre.back(), z.y, delta);
  std::vector<detail::Dual> grad(p);
  detail::backward(arch, theta.data(), tape, std::move(delta), grad.data());
  Vector out(static_cast<Eigen::Index>(p));
  for (std::size_t k = 0; k < p; ++k) out[static_cast<Eigen::Index>(k)] = grad[k].d;
  return out;
}

}  // namespace

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

Vector logits(const ModelParams& params, std::span<const double> x) {
  check_input(params, x);
  const auto& k = simd::kernels();
  return std::visit(
      Overloaded{
          [&](const Mlp& a) {
            detail::MlpTape<double> tape;
            detail::forward(a, params.theta.data(), x, tape);
            const auto& z = tape.pre.back();
            return Vector(Eigen::Map<const Vector>(z.data(), static_cast<Eigen::Index>(z.size())));
          },
          [&](const LogisticMulticlass& a) {
            Vector z(static_cast<Eigen::Index>(a.classes));
            k.gemv(params.theta.data(), a.classes, a.dim, x.data(), z.data());
            return z;
          },
          [&](const auto&) {
            Vector z(1);
            z[0] = k.dot(params.theta.data(), x.data(), x.size());
            return z;
          },
      },
      params.arch);
}

Vector predict(const ModelParams& params, std::span<const double> x) {
  Vector z = logits(params, x);
  if (std::holds_alternative<LogisticBinary>(params.arch)) {
    z[0] = sigmoid(z[0]);
    return z;
  }
  if (is_regression(params.arch)) return z;
  return softmax(z);
}

double loss(const ModelParams& params, const Example& z) {
  check_label(params, z.y);
  if (const auto* m = std::get_if<Mlp>(&params.arch)) {
    check_input(params, z.x);
    return mlp_pass(*m, params, z).loss;
  }
  const Vector s = logits(params, z.x);
  return std::visit(Overloaded{
                        [&](const LogisticBinary&) { return softplus(s[0]) - z.y * s[0]; },
                        [&](const LogisticMulticlass&) {
                          return log_sum_exp(s) - s[static_cast<Eigen::Index>(z.y)];
                        },
                        [&](const auto&) { return 0.5 * (s[0] - z.y) * (s[0] - z.y); },
                    },
                    params.arch);
}

Vector logit_residual(const ModelParams& params, const Example& z) {
  check_label(params, z.y);
  Vector r = predict(params, z.x);
  if (is_regression(params.arch) || std::holds_alternative<LogisticBinary>(params.arch)) {
    r[0] -= z.y;
  } else {
    r[static_cast<Eigen::Index>(z.y)] -= 1.0;
  }
  return r;
}

double accumulate_grad(const ModelParams& params, const Example& z, double weight, Vector& grad) {
  check_label(params, z.y);
  const auto& k = simd::kernels();
  if (const auto* m = std::get_if<Mlp>(&params.arch)) {
    check_input(params, z.x);
    MlpPass pass = mlp_pass(*m, params, z);
    for (double& d : pass.delta) d *= weight;
    detail::backward(*m, params.theta.data(), pass.tape, std::move(pass.delta), grad.data());
    return pass.loss;
  }
  const Vector s = logits(params, z.x);
  if (const auto* a = std::get_if<LogisticMulticlass>(&params.arch)) {
    const Vector prob = softmax(s);
    for (std::size_t c = 0; c < a->classes; ++c) {
      const double r = prob[static_cast<Eigen::Index>(c)] - (static_cast<double>(c) == z.y ? 1.0 : 0.0);
      k.axpy(weight * r, z.x.data(), grad.data() + c * a->dim, a->dim);
    }
    return log_sum_exp(s) - s[static_cast<Eigen::Index>(z.y)];
  }
  if (std::holds_alternative<LogisticBinary>(params.arch)) {
    k.axpy(weight * (sigmoid(s[0]) - z.y), z.x.data(), grad.data(), z.x.size());
    return softplus(s[0]) - z.y * s[0];
  }
  k.axpy(weight * (s[0] - z.y), z.x.data(), grad.data(), z.x.size());
  return 0.5 * (s[0] - z.y) * (s[0] - z.y);
}

Vector grad_example(const ModelParams& params, const Example& z) {
  Vector g = Vector::Zero(params.theta.size());
  accumulate_grad(params, z, 1.0, g);
  return g;
}

Vector hvp_example(const ModelParams& params, const Example& z, const Vector& v) {
  check_label(params, z.y);
  check_input(params, z.x);
  if (v.size() != params.theta.size()) throw SizeError("hvp: direction has wrong length");
  if (const auto* m = std::get_if<Mlp>(&params.arch)) return mlp_hvp(*m, params, z, v);

  const auto& k = simd::kernels();
  Vector out = Vector::Zero(params.theta.size());
  if (const auto* a = std::get_if<LogisticMulticlass>(&params.arch)) {
    const Vector prob = predict(params, z.x);
    Vector s(static_cast<Eigen::Index>(a->classes));
    k.gemv(v.data(), a->classes, a->dim, z.x.data(), s.data());
    const Vector t = prob.cwiseProduct(s) - prob * prob.dot(s);
    for (std::size_t c = 0; c < a->classes; ++c) {
      k.axpy(t[static_cast<Eigen::Index>(c)], z.x.data(), out.data() + c * a->dim, a->dim);
    }
    return out;
  }
  double curvature = 1.0;
  if (std::holds_alternative<LogisticBinary>(params.arch)) {
    const double sig = predict(params, z.x)[0];
    curvature = sig * (1.0 - sig);
  }
  k.axpy(curvature * k.dot(z.x.data(), v.data(), z.x.size()), z.x.data(), out.data(), z.x.size());
  return out;
}

Matrix logit_jacobian(const ModelParams& params, std::span<const double> x) {
  check_input(params, x);
  const auto p = static_cast<Eigen::Index>(params.size());
  const auto C = static_cast<Eigen::Index>(output_count(params.arch));
  Matrix jac = Matrix::Zero(p, C);
  if (const auto* m = std::get_if<Mlp>(&params.arch)) {
    detail::MlpTape<double> tape;
    detail::forward(*m, params.theta.data(), x, tape);
    Vector column(p);
    for (Eigen::Index c = 0; c < C; ++c) {
      std::vector<double> delta(static_cast<std::size_t>(C), 0.0);
      delta[static_cast<std::size_t>(c)] = 1.0;
      column.setZero();
      detail::backward(*m, params.theta.data(), tape, std::move(delta), column.data());
      jac.col(c) = column;
    }
    return jac;
  }
  const Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const auto d = static_cast<Eigen::Index>(x.size());
  for (Eigen::Index c = 0; c < C; ++c) jac.block(c * d, c, d, 1) = xv;
  return jac;
}

Matrix output_hessian(const ModelParams& params, std::span<const double> x) {
  if (is_regression(params.arch)) return Matrix::Ones(1, 1);
  const Vector prob = predict(params, x);
  if (std::holds_alternative<LogisticBinary>(params.arch)) {
    Matrix h(1, 1);
    h(0, 0) = prob[0] * (1.0 - prob[0]);
    return h;
  }
  Matrix h = -prob * prob.transpose();
  h.diagonal() += prob;
  return h;
}

void accumulate_exact_hessian(const ModelParams& params, const Example& z, double weight,
                              Matrix& upper) {
  check_label(params, z.y);
  check_input(params, z.x);
  const auto& k = simd::kernels();
  const std::size_t p = params.size();
  if (const auto* m = std::get_if<Mlp>(&params.arch)) {
    Vector basis = Vector::Zero(static_cast<Eigen::Index>(p));
    for (std::size_t col = 0; col < p; ++col) {
      basis[static_cast<Eigen::Index>(col)] = 1.0;
      const Vector hcol = mlp_hvp(*m, params, z, basis);
      basis[static_cast<Eigen::Index>(col)] = 0.0;
      // Row `col` of the symmetric example Hessian, upper part only.
      k.axpy(weight, hcol.data() + col, upper.data() + col * p + col, p - col);
    }
    return;
  }
  if (const auto* a = std::get_if<LogisticMulticlass>(&params.arch)) {
    // (diag(prob) - prob prob^T) kron x x^T, block by block.
    const Matrix lambda = output_hessian(params, z.x);
    const std::size_t d = a->dim;
    for (std::size_t c = 0; c < a->classes; ++c) {
      for (std::size_t i = 0; i < d; ++i) {
        const std::size_t row = c * d + i;
        double* dst = upper.data() + row * p;
        for (std::size_t c2 = c; c2 < a->classes; ++c2) {
          const double coef = weight * lambda(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c2)) * z.x[i];
          if (c2 == c) {
            k.axpy(coef, z.x.data() + i, dst + c2 * d + i, d - i);
          } else {
            k.axpy(coef, z.x.data(), dst + c2 * d, d);
          }
        }
      }
    }
    return;
  }
  double curvature = 1.0;
  if (std::holds_alternative<LogisticBinary>(params.arch)) {
    const double sig = predict(params, z.x)[0];
    curvature = sig * (1.0 - sig);
  }
  k.rank_one_update_upper(weight * curvature, z.x.data(), p, upper.data());
}

void accumulate_gauss_newton(const ModelParams& params, std::span<const double> x, double weight,
                             Matrix& upper) {
  const auto& k = simd::kernels();
  const std::size_t p = params.size();
  const Matrix jac = logit_jacobian(params, x);
  const Matrix lambda = output_hessian(params, x);
  if (jac.cols() == 1) {
    const Vector v = jac.col(0);
    k.rank_one_update_upper(weight * lambda(0, 0), v.data(), p, upper.data());
    return;
  }
  // diag(prob) - prob prob^T = sum_c prob_c (e_c - prob)(e_c - prob)^T
  const Vector probs = predict(params, x);
  const Vector jp = jac * probs;
  for (Eigen::Index c = 0; c < jac.cols(); ++c) {
    const Vector v = jac.col(c) - jp;
    k.rank_one_update_upper(weight * probs[c], v.data(), p, upper.data());
  }
}

double mean_loss(const ModelParams& params, const data::Dataset& dataset) {
  if (dataset.size() == 0) throw SizeError("mean_loss over an empty dataset");
  double total = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) total += loss(params, example_at(dataset, i));
  return total / static_cast<double>(dataset.size());
}

Vector mean_loss_grad(const ModelParams& params, const data::Dataset& dataset) {
  if (dataset.size() == 0) throw SizeError("mean_loss_grad over an empty dataset");
  Vector g = Vector::Zero(params.theta.size());
  const double w = 1.0 / static_cast<double>(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) accumulate_grad(params, example_at(dataset, i), w, g);
  return g;
}

double weighted_objective(const ModelParams& params, const data::Dataset& dataset,
                          std::span<const double> weights, double beta) {
  if (weights.size() != dataset.size()) throw SizeError("one weight per example required");
  double total = 0.0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (weights[i] != 0.0) total += weights[i] * loss(params, example_at(dataset, i));
  }
  return total + 0.5 * beta * params.theta.squaredNorm();
}

Vector weighted_objective_grad(const ModelParams& params, const data::Dataset& dataset,
                               std::span<const double> weights, double beta) {
  if (weights.size() != dataset.size()) throw SizeError("one weight per example required");
  Vector g = beta * params.theta;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (weights[i] != 0.0) accumulate_grad(params, example_at(dataset, i), weights[i], g);
  }
  return g;
}

double objective(const ModelParams& params, const data::Dataset& dataset, double beta) {
  return mean_loss(params, dataset) + 0.5 * beta * params.theta.squaredNorm();
}

Vector objective_grad(const ModelParams& params, const data::Dataset& dataset, double beta) {
  Vector g = mean_loss_grad(params, dataset);
  g += beta * params.theta;
  return g;
}

double accuracy(const ModelParams& params, const data::Dataset& dataset) {
  if (dataset.size() == 0) throw SizeError("accuracy over an empty dataset");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Vector out = predict(params, dataset.row(i));
    int guess = 0;
    if (out.size() == 1) {
      guess = out[0] >= 0.5 ? 1 : 0;
    } else {
      Eigen::Index arg = 0;
      out.maxCoeff(&arg);
      guess = static_cast<int>(arg);
    }
    hits += guess == dataset.class_of(i);
  }
  return static_cast<double>(hits) / static_cast<double>(dataset.size());
}

Matrix predictions(const ModelParams& params, const data::Dataset& dataset) {
  const auto C = static_cast<Eigen::Index>(output_count(params.arch));
  Matrix out(static_cast<Eigen::Index>(dataset.size()), C);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = predict(params, dataset.row(i)).transpose();
  }
  return out;
}

}  // namespace iaif::model
