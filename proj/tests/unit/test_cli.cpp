// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "iaif/cli/commands.hpp"
#include "iaif/cli/config.hpp"
#include "iaif/util/error.hpp"

using namespace iaif;
using namespace iaif::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string field_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Scratch directory holding one config file; removed on destruction.
struct Workspace {
  fs::path root;
  explicit Workspace(const std::string& name, const json& config)
      : root(fs::temp_directory_path() / ("iaif_cli_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
    std::ofstream(root / "config.json") << config.dump();
  }
  ~Workspace() { fs::remove_all(root); }
  CommandOptions options(const std::string& out) const {
    CommandOptions o;
    o.config = root / "config.json";
    o.out = root / out;
    return o;
  }
};

json small_lr() {
  return json::parse(R"({
    "seed": 5,
    "dataset": {"source": {"kind": "synthetic", "n_classes": 2, "n_per_class": 40, "dim": 3,
                           "center_scale": 1.5}},
    "model": {"arch": "logistic_binary"},
    "train": {"weight_decay": 0.01},
    "groups": {"size": 4, "count": 12}
  })");
}

}  // namespace

TEST_CASE("config: defaults and derived settings") {
  const RunConfig c = parse_config(json::object());
  CHECK(c.seed == 0);
  CHECK(c.model.kind == ArchKind::logistic_binary);
  CHECK(c.train.optimizer == model::Optimizer::newton);
  CHECK(c.curvature.mode == curvature::Mode::automatic);
  CHECK(c.selection.methods.size() == 3);
  const RunConfig mlp = parse_config(json::parse(R"({"model": {"arch": "mlp", "hidden": [8]}})"));
  CHECK(mlp.train.optimizer == model::Optimizer::sgd);
  CHECK(mlp.model.hidden == std::vector<std::size_t>{8});
}

TEST_CASE("config: errors name the offending field") {
  CHECK(field_of(json::parse(R"({"seed": -1})")) == "seed");
  CHECK(field_of(json::parse(R"({"bogus": 1})")) == "bogus");
  CHECK(field_of(json::parse(R"({"dataset": {"source": {"kind": "idx", "labels": "x"}}})")) ==
        "dataset.source.images");
  CHECK(field_of(json::parse(R"({"dataset": {"source": {"kind": "csv", "path": "/no/such.csv"}}})")) ==
        "dataset.source.path");
  CHECK(field_of(json::parse(R"({"dataset": {"source": {"dim": 0}}})")) == "dataset.source.dim");
  CHECK(field_of(json::parse(R"({"dataset": {"test_fraction": 1.0}})")) == "dataset.test_fraction");
  CHECK(field_of(json::parse(R"({"model": {"arch": "svm"}})")) == "model.arch");
  CHECK(field_of(json::parse(R"({"model": {"arch": "mlp"}, "train": {"optimizer": "newton"}})")) ==
        "train.optimizer");
  CHECK(field_of(json::parse(R"({"train": {"learning_rate": "fast"}})")) == "train.learning_rate");
  CHECK(field_of(json::parse(R"({"train": {"epochs": 0}})")) == "train.epochs");
  CHECK(field_of(json::parse(R"({"curvature": {"damping": -1}})")) == "curvature.damping");
  CHECK(field_of(json::parse(R"({"curvature": {"mode": "fisher"}})")) == "curvature.mode");
  CHECK(field_of(json::parse(R"({"groups": {"construction": "nearest"}})")) == "groups.construction");
  CHECK(field_of(json::parse(R"({"selection": {"budgets": [10, 5]}})")) == "selection.budgets");
  CHECK(field_of(json::parse(R"({"selection": {"pool_size": 10, "budgets": [20]}})")) ==
        "selection.budgets");
  CHECK(field_of(json::parse(R"({"selection": {"methods": ["best"]}})")) == "selection.methods");
  CHECK(field_of(json::parse(R"({"selection": {"seeds": [1, "a"]}})")) == "selection.seeds[1]");
  CHECK(field_of(json::parse(R"({"target": {"kind": "max_loss"}})")) == "target.kind");
}

TEST_CASE("config: data preparation, arch and target") {
  RunConfig c = parse_config(small_lr());
  const PreparedData a = prepare_data(c);
  const PreparedData b = prepare_data(c);
  CHECK(a.train.features == b.train.features);
  CHECK(a.train.size() + a.test.size() == 80);
  CHECK(a.train.dim() == 4);  // three features plus the intercept
  CHECK(std::holds_alternative<model::LogisticBinary>(build_arch(c, a.train)));

  override_seed(c, 6);
  CHECK(c.echo["seed"] == 6);
  CHECK(prepare_data(c).train.features != a.train.features);

  c.model.kind = ArchKind::linear_regression;
  CHECK_THROWS_AS(build_arch(c, a.train), ConfigError);
  c.target.kind = model::TargetKind::single_example;
  c.target.index = a.test.size();
  CHECK_THROWS_AS(build_target(c, a), ConfigError);
}

TEST_CASE("train command: metrics and byte-identical artifacts") {
  const Workspace ws("train", small_lr());
  REQUIRE(run_command("train", ws.options("a")) == kExitOk);
  REQUIRE(run_command("train", ws.options("b")) == kExitOk);
  CHECK(slurp(ws.root / "a" / "params.bin") == slurp(ws.root / "b" / "params.bin"));
  CHECK(slurp(ws.root / "a" / "metrics.json") == slurp(ws.root / "b" / "metrics.json"));
  const json metrics = json::parse(slurp(ws.root / "a" / "metrics.json"));
  CHECK(metrics["final_grad_norm"].get<double>() <= 1e-10);
  CHECK(metrics["n_params"] == 4);
}

TEST_CASE("attribute command: report shape and rank correlations") {
  const Workspace ws("attribute", small_lr());
  REQUIRE(run_command("attribute", ws.options("a")) == kExitOk);
  const json report = json::parse(slurp(ws.root / "a" / "report.json"));
  for (const char* key : {"first_order", "first_order_plus_interaction"}) {
    const double rho = report["spearman"][key].get<double>();
    CHECK(rho >= -1.0);
    CHECK(rho <= 1.0);
  }
  const std::string csv = slurp(ws.root / "a" / "groups.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
  CHECK(fs::exists(ws.root / "a" / "timing.json"));
  CHECK(report.dump().find("timing") == std::string::npos);
}

TEST_CASE("kappa-matrix command: symmetric C x C output") {
  json cfg = small_lr();
  cfg["dataset"]["source"]["n_classes"] = 3;
  cfg["model"]["arch"] = "logistic_multiclass";
  const Workspace ws("kappa", cfg);
  REQUIRE(run_command("kappa-matrix", ws.options("a")) == kExitOk);
  std::vector<std::vector<double>> m;
  std::istringstream rows(slurp(ws.root / "a" / "kappa_matrix.csv"));
  for (std::string line; std::getline(rows, line);) {
    std::vector<double> row;
    std::istringstream cells(line);
    for (std::string cell; std::getline(cells, cell, ',');) row.push_back(std::stod(cell));
    m.push_back(row);
  }
  REQUIRE(m.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(m[i].size() == 3);
    for (std::size_t j = 0; j < 3; ++j) CHECK(m[i][j] == m[j][i]);
  }
}

TEST_CASE("exit codes: config errors map to 1, pipeline failures to 2") {
  json bad = small_lr();
  bad["model"]["arch"] = "linear_regression";
  const Workspace config_error("exit1", bad);
  CHECK(run_command("train", config_error.options("o")) == kExitConfig);
  CHECK(run_command("plot", config_error.options("o")) == kExitConfig);

  json huge = small_lr();
  huge["groups"]["size"] = 500;  // more members than training rows
  const Workspace stage_error("exit2", huge);
  CHECK(run_command("attribute", stage_error.options("o")) == kExitFailure);

  CommandOptions missing = config_error.options("o");
  missing.config = config_error.root / "missing.json";
  CHECK(run_command("train", missing) == kExitConfig);
}
