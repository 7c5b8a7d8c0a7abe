// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "iaif/data/dataset.hpp"
#include "iaif/data/sources.hpp"
#include "iaif/oracle/oracle.hpp"

namespace iaif::cli {

struct IdxSource {
  std::filesystem::path images;
  std::filesystem::path labels;
  int n_classes = 10;
  std::optional<std::size_t> max_count;
};

struct CsvSource {
  std::filesystem::path path;
  int target_column = -1;
};

using DataSource = std::variant<data::SyntheticConfig, IdxSource, CsvSource>;

struct DatasetSettings {
  DataSource source = data::SyntheticConfig{};
  double test_fraction = 0.2;
  bool standardize = true;
  bool bias = true;
};

enum class ArchKind { logistic_binary, logistic_multiclass, linear_regression, mlp };

struct ModelSettings {
  ArchKind kind = ArchKind::logistic_binary;
  std::vector<std::size_t> hidden{128, 64};
};

struct TargetSettings {
  model::TargetKind kind = model::TargetKind::mean_test_loss;
  std::size_t index = 0;  // test row for a single-example target
};

struct GroupSettings {
  std::size_t size = 25;
  std::size_t count = 50;
  data::GroupConstruction construction = data::GroupConstruction::similar_softmax;
};

struct SelectionSettings {
  std::size_t pool_size = 2000;
  std::vector<std::size_t> budgets{200};
  std::vector<oracle::Method> methods{oracle::Method::random, oracle::Method::top_k_first_order,
                                      oracle::Method::greedy_interaction};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  bool stop_at_positive = false;
};

/// Everything a command needs; parsed and validated before any compute.
struct RunConfig {
  std::uint64_t seed = 0;
  DatasetSettings dataset;
  ModelSettings model;
  model::TrainConfig train;
  oracle::CurvatureSettings curvature;
  TargetSettings target;
  GroupSettings groups;
  SelectionSettings selection;

  /// The parsed document with the effective seed; echoed into reports.
  nlohmann::json echo;
};

/// Parses and validates a config document. Unknown keys, wrong types, bad
/// ranges and missing files raise ConfigError carrying the field path.
RunConfig parse_config(const nlohmann::json& document);

/// Reads a JSON file; unreadable or malformed files raise ConfigError.
nlohmann::json read_config_file(const std::filesystem::path& path);

/// Applies a command-line seed override (also reflected in the echo).
void override_seed(RunConfig& config, std::uint64_t seed);

struct PreparedData {
  data::Dataset train;
  data::Dataset test;
};

/// Loads, splits, standardizes (train statistics) and appends the bias column.
PreparedData prepare_data(const RunConfig& config);

/// Builds the architecture for the prepared data; mismatches between the
/// arch and the task raise ConfigError("model.arch").
model::Arch build_arch(const RunConfig& config, const data::Dataset& train);

model::TargetSpec build_target(const RunConfig& config, const PreparedData& data);

}  // namespace iaif::cli
