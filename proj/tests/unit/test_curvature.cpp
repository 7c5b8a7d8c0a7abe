// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "iaif/curvature/curvature.hpp"
#include "iaif/model/model.hpp"
#include "iaif/model/target.hpp"
#include "iaif/util/error.hpp"
#include "support/check.hpp"

using namespace iaif;
using namespace iaif::curvature;

namespace {

data::Dataset standardized(int classes, int per_class, int dim, std::uint64_t seed) {
  const auto raw = testing::blobs(classes, per_class, dim, seed);
  return data::Standardizer::fit(raw).apply(raw);
}

model::ModelParams random_params(const model::Arch& arch, Rng& rng, double scale = 0.5) {
  return {arch, testing::random_vector(rng, static_cast<Eigen::Index>(model::parameter_count(arch)), scale)};
}

Matrix random_psd(Rng& rng, Eigen::Index n) {
  Matrix a(n, n);
  for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = rng.normal();
  Matrix out = a * a.transpose() / static_cast<double>(n);
  symmetrize_from_upper(out);
  return out;
}

}  // namespace

TEST_CASE("exact Hessian: single binary example at zero") {
  data::Dataset ds;
  ds.task = data::Task::classification(2);
  ds.features = Matrix(1, 2);
  ds.features << 1.0, 0.0;
  ds.labels = {1.0};
  const model::ModelParams zero{model::LogisticBinary{2}, Vector::Zero(2)};
  const Matrix h = exact_hessian(zero, ds, 0.0);
  CHECK(h(0, 0) == 0.25);
  CHECK(h(0, 1) == 0.0);
  CHECK(h(1, 1) == 0.0);
  const Matrix hb = exact_hessian(zero, ds, 0.01);
  CHECK(hb(0, 0) == 0.26);
  CHECK(hb(1, 1) == 0.01);
  CHECK(hb(0, 1) == 0.0);
}

TEST_CASE("exact Hessian matches finite differences of the objective gradient") {
  Rng rng(31);
  const auto multi = standardized(3, 10, 3, 1);
  const std::vector<std::pair<model::Arch, data::Dataset>> cases{
      {model::LogisticBinary{3}, standardized(2, 10, 3, 2)},
      {model::LogisticMulticlass{3, 3}, multi},
      {model::Mlp{3, {4, 3}, 3, false}, multi},
  };
  for (const auto& [arch, ds] : cases) {
    const auto params = random_params(arch, rng);
    const Matrix h = exact_hessian(params, ds, 0.05);
    CHECK(asymmetry(h) <= 1e-10);
    auto grad = [&](const Vector& t) { return model::objective_grad({arch, t}, ds, 0.05); };
    for (int k = 0; k < 5; ++k) {
      const Vector v = testing::random_vector(rng, params.theta.size());
      CHECK(relative_error(Vector(h * v), testing::central_difference_along(grad, params.theta, v)) <= 1e-5);
    }
  }
}

TEST_CASE("Gauss-Newton equals the exact Hessian on every linear architecture") {
  Rng rng(5);
  const auto bin = standardized(2, 15, 4, 3);
  const auto multi = standardized(4, 10, 4, 4);
  for (const auto& [arch, ds] : std::vector<std::pair<model::Arch, data::Dataset>>{
           {model::LogisticBinary{4}, bin}, {model::LogisticMulticlass{4, 4}, multi}}) {
    const auto params = random_params(arch, rng);
    const Matrix exact = exact_hessian(params, ds, 0.01);
    const Matrix gn = gauss_newton(params, ds, 0.01);
    CHECK((exact - gn).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("Gauss-Newton is PSD and symmetric on an MLP") {
  Rng rng(9);
  const auto ds = standardized(3, 20, 4, 5);
  const auto params = random_params(model::Mlp{4, {6, 5}, 3, false}, rng, 1.0);
  const Matrix gn = gauss_newton(params, ds, 0.0);
  CHECK(asymmetry(gn) <= 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gn);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);

  // Batched assembly against per-example rank-one accumulation.
  Matrix reference = Matrix::Zero(gn.rows(), gn.cols());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    model::accumulate_gauss_newton(params, ds.row(i), 1.0 / static_cast<double>(ds.size()), reference);
  }
  symmetrize_from_upper(reference);
  CHECK((reference - gn).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("dense limit is enforced") {
  const auto ds = standardized(2, 5, 3, 1);
  const model::ModelParams params{model::LogisticBinary{3}, Vector::Zero(3)};
  CHECK_THROWS_AS(exact_hessian(params, ds, 0.0, 2), SizeError);
  CHECK_THROWS_AS(gauss_newton(params, ds, 0.0, 2), SizeError);
}

TEST_CASE("damped solves: closed-form cases") {
  const DampedCurvature identity(Matrix::Identity(3, 3), 0.0, Provenance::exact_hessian);
  const Vector v = Vector::LinSpaced(3, 1.0, 3.0);
  CHECK(identity.solve(v) == v);

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = 2.0;
  const DampedCurvature damped(diag, 1.0, Provenance::gauss_newton);
  Vector rhs(2);
  rhs << 2.0, 6.0;
  const Vector x = damped.solve(rhs);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("damped solves: residual and inverse-map properties on random PSD matrices") {
  Rng rng(17);
  const Matrix base = random_psd(rng, 50);
  const DampedCurvature dc(base, 1e-2, Provenance::gauss_newton);
  for (int k = 0; k < 10; ++k) {
    const Vector v = testing::random_vector(rng, 50);
    const Vector x = dc.solve(v);
    Vector shifted = base * x + 1e-2 * x;
    CHECK((shifted - v).norm() <= 1e-10 * v.norm());
    CHECK(relative_error(dc.matvec(dc.solve(v)), v) <= 1e-8);
    CHECK(relative_error(dc.solve(dc.matvec(v)), v) <= 1e-8);
  }
  Matrix rhs(50, 3);
  for (Eigen::Index k = 0; k < rhs.size(); ++k) rhs.data()[k] = rng.normal();
  const Matrix xs = dc.solve(rhs);
  for (Eigen::Index c = 0; c < 3; ++c) CHECK(relative_error(Vector(xs.col(c)), dc.solve(Vector(rhs.col(c)))) <= 1e-14);
}

TEST_CASE("damped factorization reports failure with the damping value") {
  Matrix indefinite = Matrix::Identity(2, 2);
  indefinite(1, 1) = -1.0;
  try {
    DampedCurvature dc(indefinite, 0.5, Provenance::exact_hessian);
    FAIL("expected failure");
  } catch (const NotPositiveDefiniteError& e) {
    CHECK(e.damping() == 0.5);
  }
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(DampedCurvature(asym, 0.0, Provenance::exact_hessian), SizeError);
}

TEST_CASE("target Hessian: quadratic target and consistency") {
  data::Dataset reg;
  reg.task = data::Task::regression();
  reg.features = Matrix(1, 3);
  reg.features << 1.0, -2.0, 0.5;
  reg.labels = {0.7};
  const model::ModelParams lin{model::LinearRegression{3}, Vector::Constant(3, 0.3)};
  const auto single = model::TargetSpec::single_example(reg, 0);
  const Matrix hf = target_hessian(lin, single, Provenance::exact_hessian).matrix;
  const Vector x = reg.features.row(0).transpose();
  CHECK((hf - Matrix(x * x.transpose())).cwiseAbs().maxCoeff() == 0.0);

  Rng rng(3);
  const auto ds = standardized(3, 10, 4, 7);
  const auto params = random_params(model::Mlp{4, {5, 4}, 3, false}, rng);
  const std::array<std::size_t, 1> one{2};
  const Matrix a = target_hessian(params, model::TargetSpec::single_example(ds, 2), Provenance::exact_hessian).matrix;
  const Matrix b = target_hessian(params, model::TargetSpec::mean_test_loss(ds.subset(one)), Provenance::exact_hessian).matrix;
  CHECK(a == b);

  const auto all = model::TargetSpec::mean_test_loss(ds);
  const Matrix full = target_hessian(params, all, Provenance::exact_hessian).matrix;
  auto grad = [&](const Vector& t) { return model::target_grad({params.arch, t}, all); };
  for (int k = 0; k < 5; ++k) {
    const Vector v = testing::random_vector(rng, params.theta.size());
    CHECK(relative_error(Vector(full * v), testing::central_difference_along(grad, params.theta, v)) <= 1e-5);
  }
}

TEST_CASE("block-diagonal target curvature keeps only within-layer entries") {
  Rng rng(4);
  const auto ds = standardized(3, 10, 4, 8);
  const model::Mlp arch{4, {5, 4}, 3, false};
  const auto params = random_params(arch, rng);
  const auto target = model::TargetSpec::mean_test_loss(ds);
  const Matrix full = target_hessian(params, target, Provenance::gauss_newton).matrix;
  const auto blocked = target_hessian(params, target, Provenance::gauss_newton, true);
  CHECK(blocked.block_diagonal);
  const auto blocks = model::layer_blocks(arch);
  for (std::size_t l = 0; l < blocks.size(); l += 2) {
    const auto start = static_cast<Eigen::Index>(blocks[l].offset);
    const auto len = static_cast<Eigen::Index>(blocks[l].size + blocks[l + 1].size);
    CHECK(blocked.matrix.block(start, start, len, len) == full.block(start, start, len, len));
    const auto after = start + len;
    if (after < full.cols()) CHECK(blocked.matrix.block(start, after, len, full.cols() - after).isZero(0.0));
  }
}

TEST_CASE("matrix dumps round trip") {
  Rng rng(2);
  const Matrix m = random_psd(rng, 7).topRows(4);
  const auto bytes = serialize_matrix(m);
  CHECK(bytes.size() == 8 + 16 + 8 * 28);
  CHECK(deserialize_matrix(bytes) == m);
  auto cut = bytes;
  cut.resize(cut.size() - 8);
  CHECK_THROWS_AS(deserialize_matrix(cut), LengthError);
}
