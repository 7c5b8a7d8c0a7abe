// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/cli/config.hpp"

#include <fstream>
#include <limits>
#include <set>

#include "iaif/util/error.hpp"
#include "iaif/util/random.hpp"

namespace iaif::cli {
namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::uint64_t as_unsigned(const json& v, const std::string& field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ConfigError(field, "must be non-negative");
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ConfigError(field, "expected a non-negative integer");
}

std::int64_t as_signed(const json& v, const std::string& field) {
  if (v.is_number_integer() && !v.is_number_unsigned()) return v.get<std::int64_t>();
  if (v.is_number_unsigned()) {
    if (v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw ConfigError(field, "integer out of range");
    }
    return static_cast<std::int64_t>(v.get<std::uint64_t>());
  }
  throw ConfigError(field, "expected an integer");
}

int as_int(const json& v, const std::string& field) {
  const std::int64_t x = as_signed(v, field);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    throw ConfigError(field, "integer out of range");
  }
  return static_cast<int>(x);
}

// One JSON object being consumed; remembers which keys were read so leftovers
// can be reported as unknown fields.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  std::string field(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, double fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) throw ConfigError(field(key), "expected a number");
    return v->get<double>();
  }

  std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) {
    const json* v = find(key);
    return v == nullptr ? fallback : as_unsigned(*v, field(key));
  }

  int integer(const std::string& key, int fallback) {
    const json* v = find(key);
    return v == nullptr ? fallback : as_int(*v, field(key));
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) throw ConfigError(field(key), "expected a string");
    return v->get<std::string>();
  }

  std::string required_string(const std::string& key) {
    if (!has(key)) throw ConfigError(field(key), "is required");
    return string(key, "");
  }

  std::vector<std::uint64_t> unsigned_list(const std::string& key,
                                           const std::vector<std::uint64_t>& fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) throw ConfigError(field(key), "expected an array");
    std::vector<std::uint64_t> out;
    for (std::size_t k = 0; k < v->size(); ++k) {
      out.push_back(as_unsigned((*v)[k], field(key) + "[" + std::to_string(k) + "]"));
    }
    return out;
  }

  std::vector<std::string> string_list(const std::string& key,
                                       const std::vector<std::string>& fallback) {
    const json* v = find(key);
    if (v == nullptr) return fallback;
    if (!v->is_array()) throw ConfigError(field(key), "expected an array");
    std::vector<std::string> out;
    for (std::size_t k = 0; k < v->size(); ++k) {
      if (!(*v)[k].is_string()) {
        throw ConfigError(field(key) + "[" + std::to_string(k) + "]", "expected a string");
      }
      out.push_back((*v)[k].get<std::string>());
    }
    return out;
  }

  Section child(const std::string& key) {
    static const json empty = json::object();
    const json* v = find(key);
    return Section(v == nullptr ? empty : *v, field(key));
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) throw ConfigError(field(key), "unknown field");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

std::filesystem::path existing_file(Section& s, const std::string& key) {
  const std::filesystem::path p = s.required_string(key);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(p, ec)) throw ConfigError(s.field(key), "file not found: " + p.string());
  return p;
}

DataSource parse_source(Section s) {
  const std::string kind = s.string("kind", "synthetic");
  DataSource out;
  if (kind == "synthetic") {
    data::SyntheticConfig c;
    c.n_classes = s.integer("n_classes", c.n_classes);
    c.n_per_class = s.integer("n_per_class", c.n_per_class);
    c.dim = s.integer("dim", c.dim);
    c.center_scale = s.number("center_scale", c.center_scale);
    c.noise_std = s.number("noise_std", c.noise_std);
    c.class_std_ratio = s.number("class_std_ratio", c.class_std_ratio);
    if (c.n_classes < 1) throw ConfigError(s.field("n_classes"), "must be positive");
    if (c.n_per_class < 1) throw ConfigError(s.field("n_per_class"), "must be positive");
    if (c.dim < 1) throw ConfigError(s.field("dim"), "must be positive");
    if (!(c.center_scale >= 0.0)) throw ConfigError(s.field("center_scale"), "must be non-negative");
    if (!(c.noise_std > 0.0)) throw ConfigError(s.field("noise_std"), "must be positive");
    if (!(c.class_std_ratio > 0.0)) throw ConfigError(s.field("class_std_ratio"), "must be positive");
    out = c;
  } else if (kind == "idx") {
    IdxSource c;
    c.images = existing_file(s, "images");
    c.labels = existing_file(s, "labels");
    c.n_classes = s.integer("n_classes", c.n_classes);
    if (c.n_classes < 2) throw ConfigError(s.field("n_classes"), "must be at least 2");
    if (s.has("max_count")) c.max_count = s.unsigned_int("max_count", 0);
    out = c;
  } else if (kind == "csv") {
    CsvSource c;
    c.path = existing_file(s, "path");
    c.target_column = s.integer("target_column", c.target_column);
    out = c;
  } else {
    throw ConfigError(s.field("kind"), "expected synthetic, idx or csv, got '" + kind + "'");
  }
  s.finish();
  return out;
}

DatasetSettings parse_dataset(Section s) {
  DatasetSettings d;
  d.source = parse_source(s.child("source"));
  d.test_fraction = s.number("test_fraction", d.test_fraction);
  if (!(d.test_fraction > 0.0 && d.test_fraction < 1.0)) {
    throw ConfigError(s.field("test_fraction"), "must lie strictly between 0 and 1");
  }
  d.standardize = s.boolean("standardize", d.standardize);
  d.bias = s.boolean("bias", d.bias);
  s.finish();
  return d;
}

ModelSettings parse_model(Section s) {
  ModelSettings m;
  const std::string arch = s.string("arch", "logistic_binary");
  if (arch == "logistic_binary") {
    m.kind = ArchKind::logistic_binary;
  } else if (arch == "logistic_multiclass") {
    m.kind = ArchKind::logistic_multiclass;
  } else if (arch == "linear_regression") {
    m.kind = ArchKind::linear_regression;
  } else if (arch == "mlp") {
    m.kind = ArchKind::mlp;
  } else {
    throw ConfigError(s.field("arch"), "unknown architecture '" + arch + "'");
  }
  const auto hidden = s.unsigned_list("hidden", {128, 64});
  m.hidden.assign(hidden.begin(), hidden.end());
  if (m.kind == ArchKind::mlp) {
    if (m.hidden.empty()) throw ConfigError(s.field("hidden"), "needs at least one layer");
    for (std::size_t w : m.hidden) {
      if (w == 0) throw ConfigError(s.field("hidden"), "layer widths must be positive");
    }
  }
  s.finish();
  return m;
}

model::TrainConfig parse_train(Section s, ArchKind arch) {
  model::TrainConfig t;
  const std::string fallback = arch == ArchKind::mlp ? "sgd" : "newton";
  const std::string opt = s.string("optimizer", fallback);
  if (opt == "newton") {
    t.optimizer = model::Optimizer::newton;
  } else if (opt == "sgd") {
    t.optimizer = model::Optimizer::sgd;
  } else {
    throw ConfigError(s.field("optimizer"), "expected newton or sgd, got '" + opt + "'");
  }
  if (t.optimizer == model::Optimizer::newton && arch == ArchKind::mlp) {
    throw ConfigError(s.field("optimizer"), "newton requires a linear model");
  }
  t.learning_rate = s.number("learning_rate", t.learning_rate);
  t.epochs = s.unsigned_int("epochs", t.epochs);
  t.batch_size = s.unsigned_int("batch_size", t.batch_size);
  t.weight_decay = s.number("weight_decay", t.weight_decay);
  t.momentum = s.number("momentum", t.momentum);
  t.convergence_tol = s.number("convergence_tol", t.convergence_tol);
  t.max_iterations = s.unsigned_int("max_iterations", t.max_iterations);
  t.validate();
  s.finish();
  return t;
}

oracle::CurvatureSettings parse_curvature(Section s) {
  oracle::CurvatureSettings c;
  const std::string mode = s.string("mode", "auto");
  if (mode == "exact") {
    c.mode = curvature::Mode::exact;
  } else if (mode == "gauss_newton") {
    c.mode = curvature::Mode::gauss_newton;
  } else if (mode == "auto") {
    c.mode = curvature::Mode::automatic;
  } else {
    throw ConfigError(s.field("mode"), "expected exact, gauss_newton or auto, got '" + mode + "'");
  }
  c.damping = s.number("damping", c.damping);
  if (!(c.damping >= 0.0)) throw ConfigError(s.field("damping"), "must be non-negative");
  c.target_block_diagonal = s.boolean("target_block_diagonal", c.target_block_diagonal);
  c.dense_limit = s.unsigned_int("dense_limit", c.dense_limit);
  s.finish();
  return c;
}

TargetSettings parse_target(Section s) {
  TargetSettings t;
  const std::string kind = s.string("kind", "mean_test_loss");
  if (kind == "mean_test_loss") {
    t.kind = model::TargetKind::mean_test_loss;
  } else if (kind == "single_example") {
    t.kind = model::TargetKind::single_example;
  } else {
    throw ConfigError(s.field("kind"), "expected mean_test_loss or single_example");
  }
  t.index = s.unsigned_int("index", t.index);
  s.finish();
  return t;
}

GroupSettings parse_groups(Section s) {
  GroupSettings g;
  g.size = s.unsigned_int("size", g.size);
  g.count = s.unsigned_int("count", g.count);
  if (g.size < 1) throw ConfigError(s.field("size"), "must be at least 1");
  if (g.count < 2) throw ConfigError(s.field("count"), "rank correlation needs at least 2 groups");
  const std::string c = s.string("construction", "similar");
  if (c == "similar") {
    g.construction = data::GroupConstruction::similar_softmax;
  } else if (c == "random") {
    g.construction = data::GroupConstruction::random;
  } else {
    throw ConfigError(s.field("construction"), "expected similar or random, got '" + c + "'");
  }
  s.finish();
  return g;
}

SelectionSettings parse_selection(Section s) {
  SelectionSettings out;
  out.pool_size = s.unsigned_int("pool_size", out.pool_size);
  const auto budgets = s.unsigned_list("budgets", {200});
  out.budgets.assign(budgets.begin(), budgets.end());
  out.methods.clear();
  for (const auto& name : s.string_list("methods", {"random", "top_k_first_order", "greedy_interaction"})) {
    try {
      out.methods.push_back(oracle::parse_method(name));
    } catch (const ConfigError&) {
      throw ConfigError(s.field("methods"), "unknown method '" + name + "'");
    }
  }
  out.seeds = s.unsigned_list("seeds", out.seeds);
  out.stop_at_positive = s.boolean("stop_at_positive", out.stop_at_positive);
  s.finish();

  oracle::SelectionConfig probe;
  probe.pool_size = out.pool_size;
  probe.budgets = out.budgets;
  probe.methods = out.methods;
  probe.seeds = out.seeds;
  probe.validate(std::numeric_limits<std::size_t>::max());
  return out;
}

}  // namespace

RunConfig parse_config(const nlohmann::json& document) {
  Section root(document, "");
  RunConfig c;
  c.seed = root.unsigned_int("seed", 0);
  c.dataset = parse_dataset(root.child("dataset"));
  c.model = parse_model(root.child("model"));
  c.train = parse_train(root.child("train"), c.model.kind);
  c.train.seed = c.seed;
  c.curvature = parse_curvature(root.child("curvature"));
  c.target = parse_target(root.child("target"));
  c.groups = parse_groups(root.child("groups"));
  c.selection = parse_selection(root.child("selection"));
  root.finish();
  c.echo = document;
  c.echo["seed"] = c.seed;
  return c;
}

nlohmann::json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("--config", "malformed JSON in " + path.string() + ": " + e.what());
  }
}

void override_seed(RunConfig& config, std::uint64_t seed) {
  config.seed = seed;
  config.train.seed = seed;
  config.echo["seed"] = seed;
}

PreparedData prepare_data(const RunConfig& config) {
  const auto& s = config.dataset;
  data::Dataset all;
  if (const auto* syn = std::get_if<data::SyntheticConfig>(&s.source)) {
    data::SyntheticConfig c = *syn;
    c.seed = config.seed;
    all = data::make_synthetic_blobs(c);
  } else if (const auto* idx = std::get_if<IdxSource>(&s.source)) {
    all = data::dataset_from_idx(data::read_idx_file(idx->images), data::read_idx_file(idx->labels),
                                 idx->n_classes, 1.0 / 255.0, idx->max_count);
  } else {
    const auto& csv = std::get<CsvSource>(s.source);
    all = data::load_regression_csv(csv.path, csv.target_column);
  }
  auto parts = data::split(all, s.test_fraction, derive_seed(config.seed, Stream::split));
  PreparedData out{std::move(parts.train), std::move(parts.test)};
  if (s.standardize) {
    const auto st = data::Standardizer::fit(out.train);
    out.train = st.apply(out.train);
    out.test = st.apply(out.test);
  }
  if (s.bias) {
    out.train = data::with_bias_column(out.train);
    out.test = data::with_bias_column(out.test);
  }
  return out;
}

model::Arch build_arch(const RunConfig& config, const data::Dataset& train) {
  const std::size_t d = train.dim();
  const bool classification = train.task.is_classification();
  const auto classes = static_cast<std::size_t>(train.task.n_classes);
  switch (config.model.kind) {
    case ArchKind::logistic_binary:
      if (!classification || classes != 2) {
        throw ConfigError("model.arch", "logistic_binary needs a two-class dataset");
      }
      return model::LogisticBinary{d};
    case ArchKind::logistic_multiclass:
      if (!classification) throw ConfigError("model.arch", "logistic_multiclass needs class labels");
      return model::LogisticMulticlass{d, classes};
    case ArchKind::linear_regression:
      if (classification) throw ConfigError("model.arch", "linear_regression needs a regression dataset");
      return model::LinearRegression{d};
    case ArchKind::mlp:
      break;
  }
  model::Mlp mlp;
  mlp.dim = d;
  mlp.hidden = config.model.hidden;
  mlp.regression = !classification;
  mlp.outputs = classification ? classes : 1;
  return mlp;
}

model::TargetSpec build_target(const RunConfig& config, const PreparedData& data) {
  if (config.target.kind == model::TargetKind::mean_test_loss) {
    return model::TargetSpec::mean_test_loss(data.test);
  }
  if (config.target.index >= data.test.size()) {
    throw ConfigError("target.index", "exceeds the " + std::to_string(data.test.size()) +
                                          " test examples");
  }
  return model::TargetSpec::single_example(data.test, config.target.index);
}

}  // namespace iaif::cli
