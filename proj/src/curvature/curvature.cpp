// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/curvature/curvature.hpp"

#include <cmath>
#include <cstring>
#include <iterator>

#include "iaif/model/model.hpp"
#include "iaif/util/bytes.hpp"
#include "iaif/util/error.hpp"

namespace iaif::curvature {
namespace {

constexpr char kMatrixMagic[8] = {'I', 'A', 'I', 'F', 'M', 'A', 'T', '1'};
constexpr std::size_t kChunk = 128;  // examples per batched rank update

void check_dense(const model::ModelParams& params, std::size_t limit) {
  if (params.size() > limit) {
    throw SizeError("dense curvature needs p <= " + std::to_string(limit) + ", model has p = " +
                    std::to_string(params.size()));
  }
}

Matrix finish(Eigen::MatrixXd upper, double beta) {
  Matrix out = upper.selfadjointView<Eigen::Upper>();
  out.diagonal().array() += beta;
  return out;
}

// Gauss-Newton as a sum of PSD outer products, batched into SYRK updates.
// Column block per example: sqrt(Lambda) factors applied to the Jacobian.
Matrix gauss_newton_mean(const model::ModelParams& params, const data::Dataset& examples,
                         double beta) {
  const auto p = static_cast<Eigen::Index>(params.size());
  const bool single_output = model::output_count(params.arch) == 1;
  const auto C = static_cast<Eigen::Index>(model::output_count(params.arch));
  const Eigen::Index width = single_output ? 1 : C;
  Eigen::MatrixXd upper = Eigen::MatrixXd::Zero(p, p);
  Eigen::MatrixXd block;
  const double weight = 1.0 / static_cast<double>(examples.size());
  for (std::size_t start = 0; start < examples.size(); start += kChunk) {
    const std::size_t stop = std::min(examples.size(), start + kChunk);
    block.resize(p, static_cast<Eigen::Index>(stop - start) * width);
    for (std::size_t i = start; i < stop; ++i) {
      const auto x = examples.row(i);
      const Matrix jac = model::logit_jacobian(params, x);
      const auto col = static_cast<Eigen::Index>(i - start) * width;
      if (single_output) {
        const double lambda = model::output_hessian(params, x)(0, 0);
        block.col(col) = std::sqrt(lambda) * jac.col(0);
      } else {
        const Vector prob = model::predict(params, x);
        const Vector centre = jac * prob;
        for (Eigen::Index c = 0; c < C; ++c) {
          block.col(col + c) = std::sqrt(prob[c]) * (jac.col(c) - centre);
        }
      }
    }
    upper.selfadjointView<Eigen::Upper>().rankUpdate(block, weight);
  }
  return finish(std::move(upper), beta);
}

Matrix exact_mean(const model::ModelParams& params, const data::Dataset& examples, double beta) {
  const auto p = static_cast<Eigen::Index>(params.size());
  Matrix upper = Matrix::Zero(p, p);
  const double weight = 1.0 / static_cast<double>(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    model::accumulate_exact_hessian(params, model::example_at(examples, i), weight, upper);
  }
  symmetrize_from_upper(upper);
  upper.diagonal().array() += beta;
  return upper;
}

void check_assembly_input(const model::ModelParams& params, const data::Dataset& dataset,
                          std::size_t dense_limit) {
  params.validate();
  if (dataset.size() == 0) throw SizeError("curvature over an empty dataset");
  model::check_compatible(params.arch, dataset);
  check_dense(params, dense_limit);
}

}  // namespace

std::string to_string(Provenance provenance) {
  return provenance == Provenance::exact_hessian ? "exact_hessian" : "gauss_newton";
}

Provenance resolve(Mode mode, const model::Arch& arch) {
  switch (mode) {
    case Mode::exact:
      return Provenance::exact_hessian;
    case Mode::gauss_newton:
      return Provenance::gauss_newton;
    case Mode::automatic:
      break;
  }
  return model::is_linear_model(arch) ? Provenance::exact_hessian : Provenance::gauss_newton;
}

Matrix exact_hessian(const model::ModelParams& params, const data::Dataset& dataset, double beta,
                     std::size_t dense_limit) {
  check_assembly_input(params, dataset, dense_limit);
  return exact_mean(params, dataset, beta);
}

Matrix gauss_newton(const model::ModelParams& params, const data::Dataset& dataset, double beta,
                    std::size_t dense_limit) {
  check_assembly_input(params, dataset, dense_limit);
  return gauss_newton_mean(params, dataset, beta);
}

Matrix assemble(const model::ModelParams& params, const data::Dataset& dataset, double beta,
                Provenance provenance, std::size_t dense_limit) {
  return provenance == Provenance::exact_hessian
             ? exact_hessian(params, dataset, beta, dense_limit)
             : gauss_newton(params, dataset, beta, dense_limit);
}

DampedCurvature::DampedCurvature(Matrix base, double damping, Provenance provenance)
    : base_(std::move(base)), damping_(damping), provenance_(provenance) {
  if (base_.rows() != base_.cols()) throw SizeError("curvature matrix is not square");
  if (!(damping_ >= 0.0)) throw ConfigError("curvature.damping", "must be non-negative");
  const double scale = std::max(1.0, base_.cwiseAbs().maxCoeff());
  if (asymmetry(base_) > 1e-10 * scale) throw SizeError("curvature matrix is not symmetric");
  Eigen::MatrixXd shifted = base_;
  shifted.diagonal().array() += damping_;
  factor_.compute(shifted);
  if (factor_.info() != Eigen::Success) {
    throw NotPositiveDefiniteError(
        damping_, "curvature plus damping " + std::to_string(damping_) +
                      " is not positive definite; increase curvature.damping");
  }
}

Vector DampedCurvature::solve(const Vector& v) const {
  if (static_cast<std::size_t>(v.size()) != size()) throw SizeError("solve: length mismatch");
  return factor_.solve(v);
}

Matrix DampedCurvature::solve(const Matrix& rhs) const {
  if (static_cast<std::size_t>(rhs.rows()) != size()) throw SizeError("solve: row mismatch");
  return factor_.solve(Eigen::MatrixXd(rhs));
}

Vector DampedCurvature::matvec(const Vector& v) const {
  if (static_cast<std::size_t>(v.size()) != size()) throw SizeError("matvec: length mismatch");
  Vector out = iaif::matvec(base_, v);
  out += damping_ * v;
  return out;
}

TargetCurvature target_hessian(const model::ModelParams& params, const model::TargetSpec& target,
                               Provenance provenance, bool block_diagonal,
                               std::size_t dense_limit) {
  TargetCurvature out;
  out.provenance = provenance;
  out.block_diagonal = block_diagonal;
  out.matrix = assemble(params, target.examples, 0.0, provenance, dense_limit);
  if (block_diagonal) {
    // One block per layer: its weight and bias slices are adjacent.
    const auto blocks = model::layer_blocks(params.arch);
    std::vector<std::size_t> layer_of(params.size());
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      for (std::size_t k = 0; k < blocks[b].size; ++k) layer_of[blocks[b].offset + k] = b / 2;
    }
    if (blocks.size() == 1) return out;
    for (Eigen::Index r = 0; r < out.matrix.rows(); ++r) {
      for (Eigen::Index c = 0; c < out.matrix.cols(); ++c) {
        if (layer_of[static_cast<std::size_t>(r)] != layer_of[static_cast<std::size_t>(c)]) {
          out.matrix(r, c) = 0.0;
        }
      }
    }
  }
  return out;
}

std::vector<std::uint8_t> serialize_matrix(const Matrix& m) {
  std::vector<std::uint8_t> out(std::begin(kMatrixMagic), std::end(kMatrixMagic));
  put_le(out, static_cast<std::uint64_t>(m.rows()));
  put_le(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index k = 0; k < m.size(); ++k) put_le(out, m.data()[k]);
  return out;
}

Matrix deserialize_matrix(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMatrixMagic) ||
      std::memcmp(bytes.data(), kMatrixMagic, sizeof(kMatrixMagic)) != 0) {
    throw FormatError("not a matrix dump (bad magic)");
  }
  ByteReader in(bytes.subspan(sizeof(kMatrixMagic)), "matrix dump");
  const auto rows = in.get<std::uint64_t>();
  const auto cols = in.get<std::uint64_t>();
  if (cols != 0 && rows > in.remaining() / 8 / cols) throw LengthError("matrix dump is truncated");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = in.get<double>();
  if (in.remaining() != 0) throw LengthError("trailing bytes after matrix");
  return m;
}

void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  write_file_bytes(path, serialize_matrix(m));
}

Matrix read_matrix(const std::filesystem::path& path) { return deserialize_matrix(read_file_bytes(path)); }

}  // namespace iaif::curvature
