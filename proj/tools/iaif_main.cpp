// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "iaif/cli/commands.hpp"
#include "iaif/simd/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Interaction-aware group influence: attribution, selection and retraining checks"};
  app.require_subcommand(1);

  iaif::cli::CommandOptions options;
  std::uint64_t seed = 0;
  std::string simd;
  const std::pair<const char*, const char*> commands[] = {
      {"train", "Fit the configured model; writes params.bin and metrics.json"},
      {"attribute", "Group attribution benchmark; writes report.json and groups.csv"},
      {"select", "Selection benchmark; writes report.json, selection.csv and traces"},
      {"kappa-matrix", "Class-pair interaction matrix; writes kappa_matrix.csv"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", options.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", options.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Override the config's top-level seed");
    sub->add_option("--threads", options.threads, "Worker threads")->capture_default_str();
    sub->add_option("--simd", simd, "Kernel level: scalar, avx2 or neon (default: best available)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return iaif::cli::kExitConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--seed") > 0) options.seed = seed;
  if (!simd.empty()) {
    bool found = false;
    for (auto level : iaif::simd::supported_levels()) {
      if (iaif::simd::to_string(level) == simd) {
        iaif::simd::set_active_level(level);
        found = true;
      }
    }
    if (!found) {
      std::cerr << "config error: --simd: level '" << simd << "' is not available on this machine\n";
      return iaif::cli::kExitConfig;
    }
  }
  return iaif::cli::run_command(chosen->get_name(), options);
}
