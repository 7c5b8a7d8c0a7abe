// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

#include "iaif/cli/config.hpp"
#include "iaif/influence/influence.hpp"
#include "iaif/model/io.hpp"
#include "iaif/model/model.hpp"
#include "iaif/oracle/oracle.hpp"
#include "iaif/util/error.hpp"
#include "iaif/util/format.hpp"

namespace iaif::cli {
namespace {

namespace fs = std::filesystem;

struct Loaded {
  RunConfig config;
  PreparedData data;
  model::Arch arch;
};

Loaded load(const CommandOptions& options) {
  if (options.threads < 1) throw ConfigError("--threads", "must be at least 1");
  RunConfig config = parse_config(read_config_file(options.config));
  if (options.seed) override_seed(config, *options.seed);
  std::error_code ec;
  fs::create_directories(options.out, ec);
  if (ec) throw ConfigError("--out", "cannot create " + options.out.string() + ": " + ec.message());
  PreparedData data = prepare_data(config);
  model::Arch arch = build_arch(config, data.train);
  return {std::move(config), std::move(data), std::move(arch)};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

oracle::Trainer trainer_of(const Loaded& run) { return {run.arch, run.config.train}; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void cmd_train(const CommandOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded run = load(options);
  const model::TrainResult fit = trainer_of(run).fit(run.data.train);
  model::save_params(options.out / "params.bin", fit.params);

  nlohmann::json metrics = {
      {"arch", model::arch_name(run.arch)},
      {"optimizer", run.config.train.optimizer == model::Optimizer::newton ? "newton" : "sgd"},
      {"n_train", run.data.train.size()},
      {"n_test", run.data.test.size()},
      {"n_params", fit.params.size()},
      {"final_objective", fit.final_objective},
      {"final_grad_norm", fit.final_grad_norm},
      {"iterations", fit.iterations},
      {"train_loss", model::mean_loss(fit.params, run.data.train)},
      {"test_loss", model::mean_loss(fit.params, run.data.test)},
      {"config", run.config.echo}};
  if (run.data.train.task.is_classification()) {
    metrics["train_accuracy"] = model::accuracy(fit.params, run.data.train);
    metrics["test_accuracy"] = model::accuracy(fit.params, run.data.test);
  }
  write_json(options.out / "metrics.json", metrics);
  write_json(options.out / "timing.json", {{"train", seconds_since(start)}});
}

void cmd_attribute(const CommandOptions& options) {
  const Loaded run = load(options);
  oracle::AttributionConfig cfg;
  cfg.trainer = trainer_of(run);
  cfg.curvature = run.config.curvature;
  cfg.group_size = run.config.groups.size;
  cfg.n_groups = run.config.groups.count;
  cfg.construction = run.config.groups.construction;
  cfg.seed = run.config.seed;
  cfg.threads = options.threads;
  cfg.echo = run.config.echo;
  const oracle::BenchmarkReport report =
      oracle::run_attribution_benchmark(run.data.train, build_target(run.config, run.data), cfg);
  write_json(options.out / "report.json", report.to_json());
  write_text(options.out / "groups.csv", report.groups_csv());
  write_json(options.out / "timing.json", report.timing.to_json());
}

void cmd_select(const CommandOptions& options) {
  const Loaded run = load(options);
  oracle::SelectionConfig cfg;
  cfg.trainer = trainer_of(run);
  cfg.curvature = run.config.curvature;
  cfg.pool_size = run.config.selection.pool_size;
  cfg.budgets = run.config.selection.budgets;
  cfg.methods = run.config.selection.methods;
  cfg.seeds = run.config.selection.seeds;
  cfg.stop_at_positive = run.config.selection.stop_at_positive;
  cfg.seed = run.config.seed;
  cfg.threads = options.threads;
  cfg.echo = run.config.echo;
  const oracle::SelectionReport report =
      oracle::run_selection_benchmark(run.data.train, run.data.test, cfg);
  write_json(options.out / "report.json", report.to_json());
  write_text(options.out / "selection.csv", report.selection_csv());
  for (const auto& [method, trace] : report.traces) {
    write_text(options.out / ("trace_" + oracle::to_string(method) + ".csv"),
               selection::trace_csv(trace));
  }
  write_json(options.out / "timing.json", report.timing.to_json());
}

void cmd_kappa_matrix(const CommandOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Loaded run = load(options);
  const data::Dataset& train = run.data.train;
  if (!train.task.is_classification()) {
    throw ConfigError("dataset.source", "kappa-matrix needs a classification dataset");
  }
  const model::ModelParams theta = trainer_of(run).fit(train).params;
  const auto& cs = run.config.curvature;
  const curvature::Provenance provenance = curvature::resolve(cs.mode, run.arch);
  const curvature::DampedCurvature h(
      curvature::assemble(theta, train, run.config.train.weight_decay, provenance, cs.dense_limit),
      cs.damping, provenance);
  const Matrix hf = curvature::target_hessian(theta, build_target(run.config, run.data), provenance,
                                              cs.target_block_diagonal, cs.dense_limit)
                        .matrix;
  const auto shifts =
      influence::compute_shifts(h, influence::example_gradients(theta, train), train.size());
  std::vector<int> labels(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) labels[i] = train.class_of(i);
  const Matrix m = influence::class_pair_kappa_matrix(shifts, labels, train.task.n_classes, hf);

  std::string csv;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) csv += ",";
      csv += format_double(m(r, c));
    }
    csv += "\n";
  }
  write_text(options.out / "kappa_matrix.csv", csv);
  write_json(options.out / "timing.json", {{"total", seconds_since(start)}});
}

int run_command(const std::string& name, const CommandOptions& options) {
  try {
    if (name == "train") {
      cmd_train(options);
    } else if (name == "attribute") {
      cmd_attribute(options);
    } else if (name == "select") {
      cmd_select(options);
    } else if (name == "kappa-matrix") {
      cmd_kappa_matrix(options);
    } else {
      std::cerr << "error: unknown command '" << name << "'\n";
      return kExitConfig;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace iaif::cli
