// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace iaif::cli {

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
};

/// params.bin, metrics.json
void cmd_train(const CommandOptions& options);
/// report.json, groups.csv
void cmd_attribute(const CommandOptions& options);
/// report.json, selection.csv, trace_<method>.csv
void cmd_select(const CommandOptions& options);
/// kappa_matrix.csv (C rows of C values)
void cmd_kappa_matrix(const CommandOptions& options);

/// Every command also writes timing.json, the only output that varies
/// between identical runs.

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitFailure = 2;

/// Runs a command by name ("train", "attribute", "select", "kappa-matrix"),
/// reporting errors on stderr and mapping them to exit codes.
int run_command(const std::string& name, const CommandOptions& options);

}  // namespace iaif::cli
