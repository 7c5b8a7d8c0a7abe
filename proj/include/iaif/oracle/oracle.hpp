// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "iaif/curvature/curvature.hpp"
#include "iaif/data/dataset.hpp"
#include "iaif/data/groups.hpp"
#include "iaif/model/arch.hpp"
#include "iaif/model/target.hpp"
#include "iaif/model/train.hpp"
#include "iaif/selection/selection.hpp"

namespace iaif::oracle {

/// Architecture plus optimizer settings; every retraining reuses both.
struct Trainer {
  model::Arch arch;
  model::TrainConfig config;

  model::TrainResult fit(const data::Dataset& dataset) const;
};

struct Retrained {
  model::ModelParams params;
  double value = 0.0;  // target at the retrained parameters
  double delta = 0.0;  // value - target at the reference parameters
};

/// Trains on the dataset without `group`, each retained example keeping its
/// weight 1/N, and reports the target change against `reference`. Throws
/// DegenerateError when the group is everything.
Retrained ground_truth_removal(const data::Dataset& dataset, std::span<const std::size_t> group,
                               const Trainer& trainer, const model::TargetSpec& target,
                               const model::ModelParams& reference);

/// Trains on dataset + extra with uniform weights over all N + |extra| rows.
Retrained ground_truth_addition(const data::Dataset& dataset, const data::Dataset& extra,
                                const Trainer& trainer, const model::TargetSpec& target,
                                const model::ModelParams& reference);

/// Minimizer of (1/N) sum_i loss_i + eps sum_{i in group} loss_i + beta/2 ||theta||^2.
model::ModelParams reweighted_params(const data::Dataset& dataset,
                                     std::span<const std::size_t> group, double epsilon,
                                     const Trainer& trainer);

struct PathPoint {
  double epsilon = 0.0;
  double distance = 0.0;  // || theta(eps) - (theta_hat + eps * slope) ||
};

struct PathCheck {
  model::ModelParams reference;
  Vector slope;  // d theta / d eps = -H^{-1} sum_{group} g_i
  std::vector<PathPoint> points;
};

/// Retrains along the epsilon grid and measures the distance to the
/// first-order path. Requires a linear model and the Newton trainer.
PathCheck reweighting_path_check(const data::Dataset& dataset, std::span<const std::size_t> group,
                                 std::span<const double> epsilons, const Trainer& trainer);

/// Ranks with ties sharing their average position (1-based).
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks. Throws SizeError for mismatched or
/// short inputs and DegenerateError when either side is constant.
double spearman(std::span<const double> xs, std::span<const double> ys);

struct CurvatureSettings {
  curvature::Mode mode = curvature::Mode::automatic;
  double damping = 0.0;
  bool target_block_diagonal = false;
  std::size_t dense_limit = curvature::kDefaultDenseLimit;
};

/// Wall-clock seconds per stage; kept out of the reports so they stay
/// byte-stable across runs.
struct Timing {
  std::vector<std::pair<std::string, double>> stages;

  nlohmann::json to_json() const;
};

// ---------------------------------------------------------------- attribution

struct AttributionConfig {
  Trainer trainer;
  CurvatureSettings curvature;
  std::size_t group_size = 25;
  std::size_t n_groups = 50;
  data::GroupConstruction construction = data::GroupConstruction::similar_softmax;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  nlohmann::json echo;  // copied into the report verbatim
};

struct GroupRecord {
  std::size_t id = 0;
  data::GroupSpec group;
  double first_order = 0.0;
  double interaction = 0.0;
  double estimate = 0.0;             // first_order + interaction
  double singleton_first_sum = 0.0;  // sum of per-member first-order terms
  double additive_total = 0.0;       // sum of per-member estimates
  double ground_truth = 0.0;
  double label_purity = 0.0;
};

struct BenchmarkReport {
  std::vector<GroupRecord> records;
  double rho_first_order = 0.0;
  double rho_with_interaction = 0.0;
  std::size_t n_train = 0;
  std::size_t n_params = 0;
  curvature::Provenance provenance = curvature::Provenance::exact_hessian;
  double train_accuracy = 0.0;  // NaN for regression
  double train_grad_norm = 0.0;
  double reference_target = 0.0;
  nlohmann::json echo;
  Timing timing;

  nlohmann::json to_json() const;  // excludes timing
  std::string groups_csv() const;
};

BenchmarkReport run_attribution_benchmark(const data::Dataset& train,
                                          const model::TargetSpec& target,
                                          const AttributionConfig& config);

// ------------------------------------------------------------------ selection

enum class Method { random, top_k_first_order, greedy_interaction };

std::string to_string(Method method);
/// Throws ConfigError for unknown names.
Method parse_method(const std::string& name);

struct SelectionConfig {
  Trainer trainer;
  CurvatureSettings curvature;
  std::size_t pool_size = 2000;
  std::vector<std::size_t> budgets{200};
  std::vector<Method> methods{Method::random, Method::top_k_first_order,
                              Method::greedy_interaction};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  bool stop_at_positive = false;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  nlohmann::json echo;

  /// Throws ConfigError for empty/unsorted budgets, missing seeds or methods.
  void validate(std::size_t n_train) const;
};

struct SelectionRecord {
  Method method = Method::random;
  std::size_t budget = 0;
  std::vector<double> losses;     // per seed, in seed order
  std::vector<double> entropies;  // per seed
  double loss_mean = 0.0;
  double loss_std = 0.0;  // sample standard deviation, 0 for one seed
  double entropy_mean = 0.0;
  double addition_estimate = 0.0;  // of the first seed's selection
};

struct SelectionReport {
  std::vector<SelectionRecord> records;  // method-major, budgets ascending
  /// Per method: trace of the first seed's ordering over the largest budget.
  std::vector<std::pair<Method, std::vector<selection::TraceRow>>> traces;
  std::size_t pool_size = 0;
  std::size_t n_params = 0;
  curvature::Provenance provenance = curvature::Provenance::gauss_newton;
  double reference_test_loss = 0.0;
  nlohmann::json echo;
  Timing timing;

  const SelectionRecord& find(Method method, std::size_t budget) const;
  nlohmann::json to_json() const;  // excludes timing
  std::string selection_csv() const;
};

/// Subsamples a pool from `train`, fits the reference model on it, selects
/// with each method and retrains on every (method, budget, seed) subset.
SelectionReport run_selection_benchmark(const data::Dataset& train, const data::Dataset& test,
                                        const SelectionConfig& config);

}  // namespace iaif::oracle
