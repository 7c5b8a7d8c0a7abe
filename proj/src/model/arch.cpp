// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/model/arch.hpp"

#include <string>

#include "iaif/util/error.hpp"

namespace iaif::model {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::vector<std::size_t> Mlp::widths() const {
  std::vector<std::size_t> w{dim};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(outputs);
  return w;
}

std::size_t parameter_count(const Arch& arch) {
  return std::visit(Overloaded{
                        [](const LogisticBinary& a) { return a.dim; },
                        [](const LogisticMulticlass& a) { return a.dim * a.classes; },
                        [](const LinearRegression& a) { return a.dim; },
                        [](const Mlp& a) {
                          const auto w = a.widths();
                          std::size_t p = 0;
                          for (std::size_t l = 0; l + 1 < w.size(); ++l) p += w[l + 1] * (w[l] + 1);
                          return p;
                        },
                    },
                    arch);
}

std::size_t input_dim(const Arch& arch) {
  return std::visit([](const auto& a) { return a.dim; }, arch);
}

std::size_t output_count(const Arch& arch) {
  return std::visit(Overloaded{
                        [](const LogisticBinary&) { return std::size_t{1}; },
                        [](const LogisticMulticlass& a) { return a.classes; },
                        [](const LinearRegression&) { return std::size_t{1}; },
                        [](const Mlp& a) { return a.outputs; },
                    },
                    arch);
}

bool is_linear_model(const Arch& arch) { return !std::holds_alternative<Mlp>(arch); }

bool is_regression(const Arch& arch) {
  if (std::holds_alternative<LinearRegression>(arch)) return true;
  if (const auto* m = std::get_if<Mlp>(&arch)) return m->regression;
  return false;
}

std::string arch_name(const Arch& arch) {
  return std::visit(Overloaded{
                        [](const LogisticBinary&) { return std::string("lr_binary"); },
                        [](const LogisticMulticlass&) { return std::string("lr_multiclass"); },
                        [](const LinearRegression&) { return std::string("linear"); },
                        [](const Mlp&) { return std::string("mlp"); },
                    },
                    arch);
}

void check_compatible(const Arch& arch, const data::Dataset& dataset) {
  if (dataset.dim() != input_dim(arch)) {
    throw SizeError(arch_name(arch) + " expects dimension " + std::to_string(input_dim(arch)) +
                    ", dataset has " + std::to_string(dataset.dim()));
  }
  if (is_regression(arch)) {
    if (dataset.task.is_classification()) throw SizeError("regression model on a classification task");
    return;
  }
  if (!dataset.task.is_classification()) throw SizeError("classifier on a regression task");
  const auto classes = static_cast<std::size_t>(dataset.task.n_classes);
  const bool ok = std::visit(Overloaded{
                                 [&](const LogisticBinary&) { return classes == 2; },
                                 [&](const LogisticMulticlass& a) { return a.classes == classes; },
                                 [&](const LinearRegression&) { return false; },
                                 [&](const Mlp& a) { return a.outputs == classes; },
                             },
                             arch);
  if (!ok) {
    throw SizeError(arch_name(arch) + " output count does not match " + std::to_string(classes) +
                    " classes");
  }
}

std::vector<LayerBlock> layer_blocks(const Arch& arch) {
  if (const auto* m = std::get_if<Mlp>(&arch)) {
    const auto w = m->widths();
    std::vector<LayerBlock> blocks;
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
      const std::size_t wsize = w[l + 1] * w[l];
      blocks.push_back({"W" + std::to_string(l + 1), offset, wsize});
      offset += wsize;
      blocks.push_back({"b" + std::to_string(l + 1), offset, w[l + 1]});
      offset += w[l + 1];
    }
    return blocks;
  }
  return {{"theta", 0, parameter_count(arch)}};
}

void ModelParams::validate() const {
  const std::size_t p = parameter_count(arch);
  if (size() != p) {
    throw SizeError("theta has " + std::to_string(size()) + " entries, architecture needs " +
                    std::to_string(p));
  }
  if (!theta.allFinite()) throw TrainingError("theta has non-finite entries");
}

}  // namespace iaif::model
