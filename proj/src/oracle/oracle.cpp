// SPDX-FileCopyrightText: 2026 The iaif Authors
// SPDX-License-Identifier: Apache-2.0

#include "iaif/oracle/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "iaif/influence/influence.hpp"
#include "iaif/model/model.hpp"
#include "iaif/util/error.hpp"
#include "iaif/util/format.hpp"
#include "iaif/util/parallel.hpp"
#include "iaif/util/random.hpp"

namespace iaif::oracle {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs one pipeline stage, tagging failures with its name and recording the
// elapsed time. Config errors pass through untouched so callers can map them.
template <typename F>
auto run_stage(Timing& timing, const std::string& name, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  auto record = [&] {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    timing.stages.emplace_back(name, elapsed.count());
  };
  try {
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      record();
    } else {
      auto out = body();
      record();
      return out;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::vector<std::size_t> unique_members(std::span<const std::size_t> group, std::size_t n) {
  std::vector<std::size_t> out(group.begin(), group.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (!out.empty() && out.back() >= n) {
    throw SizeError("group member " + std::to_string(out.back()) + " outside dataset of size " +
                    std::to_string(n));
  }
  return out;
}

std::vector<int> class_labels(const data::Dataset& dataset) {
  std::vector<int> labels(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) labels[i] = dataset.class_of(i);
  return labels;
}

double mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

curvature::DampedCurvature training_curvature(const model::ModelParams& params,
                                              const data::Dataset& train, const Trainer& trainer,
                                              const CurvatureSettings& settings,
                                              curvature::Provenance provenance) {
  Matrix h = curvature::assemble(params, train, trainer.config.weight_decay, provenance,
                                 settings.dense_limit);
  return {std::move(h), settings.damping, provenance};
}

std::vector<selection::TraceRow> replay(const selection::CandidateCache& cache,
                                        std::span<const std::size_t> order,
                                        std::span<const int> labels) {
  selection::SelectionState state = selection::initial_state(cache, order.size());
  std::vector<selection::TraceRow> trace;
  trace.reserve(order.size());
  double running = 0.0;
  for (std::size_t t = 0; t < order.size(); ++t) {
    selection::TraceRow row;
    row.step = t;
    row.index = order[t];
    row.marginal = selection::marginal(cache, state, order[t]);
    selection::commit(cache, state, order[t]);
    running += row.marginal;
    row.cumulative = running;
    if (!labels.empty()) row.entropy = selection::class_entropy(state.selected, labels);
    trace.push_back(row);
  }
  return trace;
}

}  // namespace

model::TrainResult Trainer::fit(const data::Dataset& dataset) const {
  return model::train(arch, dataset, config);
}

Retrained ground_truth_removal(const data::Dataset& dataset, std::span<const std::size_t> group,
                               const Trainer& trainer, const model::TargetSpec& target,
                               const model::ModelParams& reference) {
  const auto members = unique_members(group, dataset.size());
  if (members.size() == dataset.size()) {
    throw DegenerateError("removing every training example leaves nothing to train on");
  }
  // Retained examples keep their 1/N weight, so the regularizer is not
  // rescaled relative to the data term and removal is the eps = -1/N point.
  const data::Dataset rest = dataset.without(members);
  const std::vector<double> weights(rest.size(), 1.0 / static_cast<double>(dataset.size()));
  Retrained out;
  out.params = model::train_weighted(trainer.arch, rest, weights, trainer.config).params;
  out.value = model::target_value(out.params, target);
  out.delta = out.value - model::target_value(reference, target);
  return out;
}

Retrained ground_truth_addition(const data::Dataset& dataset, const data::Dataset& extra,
                                const Trainer& trainer, const model::TargetSpec& target,
                                const model::ModelParams& reference) {
  Retrained out;
  out.params = extra.size() == 0 ? trainer.fit(dataset).params
                                 : trainer.fit(dataset.concatenated(extra)).params;
  out.value = model::target_value(out.params, target);
  out.delta = out.value - model::target_value(reference, target);
  return out;
}

model::ModelParams reweighted_params(const data::Dataset& dataset,
                                     std::span<const std::size_t> group, double epsilon,
                                     const Trainer& trainer) {
  const auto members = unique_members(group, dataset.size());
  std::vector<double> weights(dataset.size(), 1.0 / static_cast<double>(dataset.size()));
  for (std::size_t i : members) weights[i] += epsilon;
  return model::train_weighted(trainer.arch, dataset, weights, trainer.config).params;
}

PathCheck reweighting_path_check(const data::Dataset& dataset, std::span<const std::size_t> group,
                                 std::span<const double> epsilons, const Trainer& trainer) {
  if (!model::is_linear_model(trainer.arch)) {
    throw ConfigError("model.arch", "the reweighting path check needs a convex linear model");
  }
  if (trainer.config.optimizer != model::Optimizer::newton) {
    throw ConfigError("train.optimizer", "the reweighting path check needs the newton trainer");
  }
  const auto members = unique_members(group, dataset.size());
  PathCheck out;
  out.reference = reweighted_params(dataset, members, 0.0, trainer);
  const curvature::DampedCurvature h(
      curvature::exact_hessian(out.reference, dataset, trainer.config.weight_decay), 0.0,
      curvature::Provenance::exact_hessian);
  Vector group_grad = Vector::Zero(static_cast<Eigen::Index>(out.reference.size()));
  for (std::size_t i : members) {
    model::accumulate_grad(out.reference, model::example_at(dataset, i), 1.0, group_grad);
  }
  out.slope = -h.solve(group_grad);
  for (double eps : epsilons) {
    const model::ModelParams moved = reweighted_params(dataset, members, eps, trainer);
    const Vector linear = out.reference.theta + eps * out.slope;
    out.points.push_back({eps, (moved.theta - linear).norm()});
  }
  return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t stop = start + 1;
    while (stop < order.size() && values[order[stop]] == values[order[start]]) ++stop;
    const double rank = 0.5 * static_cast<double>(start + stop + 1);
    for (std::size_t k = start; k < stop; ++k) ranks[order[k]] = rank;
    start = stop;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw SizeError("spearman: length mismatch");
  if (xs.size() < 2) throw SizeError("spearman needs at least two pairs");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      throw DegenerateError("spearman: non-finite value");
    }
  }
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double mx = mean(rx);
  const double my = mean(ry);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateError("spearman of a constant sequence is undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

nlohmann::json Timing::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  double total = 0.0;
  for (const auto& [name, seconds] : stages) {
    out[name] = seconds;
    total += seconds;
  }
  out["total"] = total;
  return out;
}

// ---------------------------------------------------------------- attribution

BenchmarkReport run_attribution_benchmark(const data::Dataset& train,
                                          const model::TargetSpec& target,
                                          const AttributionConfig& config) {
  BenchmarkReport report;
  report.echo = config.echo;
  report.n_train = train.size();
  Timing& timing = report.timing;

  const model::TrainResult fit =
      run_stage(timing, "train", [&] { return config.trainer.fit(train); });
  const model::ModelParams& theta = fit.params;
  report.n_params = theta.size();
  report.train_grad_norm = fit.final_grad_norm;
  report.train_accuracy =
      train.task.is_classification() ? model::accuracy(theta, train) : kNaN;
  report.reference_target = model::target_value(theta, target);
  report.provenance = curvature::resolve(config.curvature.mode, config.trainer.arch);

  struct Curvatures {
    curvature::DampedCurvature h;
    Matrix hf;
  };
  const Curvatures curv = run_stage(timing, "curvature", [&] {
    return Curvatures{
        training_curvature(theta, train, config.trainer, config.curvature, report.provenance),
        curvature::target_hessian(theta, target, report.provenance,
                                  config.curvature.target_block_diagonal,
                                  config.curvature.dense_limit)
            .matrix};
  });

  const std::vector<data::GroupSpec> groups = run_stage(timing, "groups", [&] {
    const std::uint64_t group_seed = derive_seed(config.seed, Stream::groups);
    if (config.construction == data::GroupConstruction::random) {
      return data::build_random_groups(train.size(), config.group_size, config.n_groups,
                                       group_seed);
    }
    return data::build_similar_groups(model::predictions(theta, train), config.group_size,
                                      config.n_groups, group_seed);
  });

  run_stage(timing, "estimates", [&] {
    const influence::ShiftSet shifts = influence::compute_shifts(
        curv.h, influence::example_gradients(theta, train), train.size());
    const Vector tg = model::target_grad(theta, target);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      GroupRecord rec;
      rec.id = g;
      rec.group = groups[g];
      const auto est = influence::estimate_removal(tg, shifts, groups[g].indices, curv.hf);
      rec.first_order = est.first_order;
      rec.interaction = est.interaction;
      rec.estimate = est.total;
      for (std::size_t i : groups[g].indices) {
        const auto single = influence::estimate_removal(tg, shifts, std::span(&i, 1), curv.hf);
        rec.singleton_first_sum += single.first_order;
        rec.additive_total += single.total;
      }
      rec.label_purity =
          train.task.is_classification() ? data::label_purity(groups[g], train) : kNaN;
      report.records.push_back(std::move(rec));
    }
  });

  run_stage(timing, "ground_truth", [&] {
    parallel_for(report.records.size(), config.threads, [&](std::size_t g) {
      report.records[g].ground_truth =
          ground_truth_removal(train, report.records[g].group.indices, config.trainer, target,
                               theta)
              .delta;
    });
  });

  run_stage(timing, "correlation", [&] {
    std::vector<double> truth;
    std::vector<double> first;
    std::vector<double> full;
    for (const auto& r : report.records) {
      truth.push_back(r.ground_truth);
      first.push_back(r.first_order);
      full.push_back(r.estimate);
    }
    report.rho_first_order = spearman(first, truth);
    report.rho_with_interaction = spearman(full, truth);
  });
  return report;
}

nlohmann::json BenchmarkReport::to_json() const {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& r : records) {
    groups.push_back({{"id", r.id},
                      {"anchor", r.group.anchor},
                      {"members", r.group.indices},
                      {"first_order", r.first_order},
                      {"interaction", r.interaction},
                      {"estimate", r.estimate},
                      {"singleton_first_order_sum", r.singleton_first_sum},
                      {"additive_total", r.additive_total},
                      {"ground_truth", r.ground_truth},
                      {"label_purity", r.label_purity}});
  }
  return {{"n_train", n_train},
          {"n_params", n_params},
          {"curvature_provenance", curvature::to_string(provenance)},
          {"train_accuracy", train_accuracy},
          {"train_grad_norm", train_grad_norm},
          {"reference_target", reference_target},
          {"spearman",
           {{"first_order", rho_first_order}, {"first_order_plus_interaction", rho_with_interaction}}},
          {"groups", groups},
          {"config", echo}};
}

std::string BenchmarkReport::groups_csv() const {
  std::string out =
      "group_id,anchor,size,first_order,interaction,estimate,additive_total,ground_truth,"
      "label_purity\n";
  for (const auto& r : records) {
    out += std::to_string(r.id) + "," + std::to_string(r.group.anchor) + "," +
           std::to_string(r.group.size()) + "," + format_double(r.first_order) + "," +
           format_double(r.interaction) + "," + format_double(r.estimate) + "," +
           format_double(r.additive_total) + "," + format_double(r.ground_truth) + "," +
           format_double(r.label_purity) + "\n";
  }
  return out;
}

// ------------------------------------------------------------------ selection

std::string to_string(Method method) {
  switch (method) {
    case Method::random:
      return "random";
    case Method::top_k_first_order:
      return "top_k_first_order";
    case Method::greedy_interaction:
      break;
  }
  return "greedy_interaction";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::random, Method::top_k_first_order, Method::greedy_interaction}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("selection.methods", "unknown method '" + name + "'");
}

void SelectionConfig::validate(std::size_t n_train) const {
  if (pool_size < 1) throw ConfigError("selection.pool_size", "must be at least 1");
  if (pool_size > n_train) {
    throw ConfigError("selection.pool_size", "exceeds the " + std::to_string(n_train) +
                                                 " available training examples");
  }
  if (budgets.empty()) throw ConfigError("selection.budgets", "at least one budget required");
  for (std::size_t k = 0; k < budgets.size(); ++k) {
    if (budgets[k] < 1) throw ConfigError("selection.budgets", "budgets must be positive");
    if (budgets[k] > pool_size) throw ConfigError("selection.budgets", "budget exceeds pool size");
    if (k > 0 && budgets[k] <= budgets[k - 1]) {
      throw ConfigError("selection.budgets", "budgets must be strictly ascending");
    }
  }
  if (methods.empty()) throw ConfigError("selection.methods", "at least one method required");
  if (seeds.empty()) throw ConfigError("selection.seeds", "at least one seed required");
}

const SelectionRecord& SelectionReport::find(Method method, std::size_t budget) const {
  for (const auto& r : records) {
    if (r.method == method && r.budget == budget) return r;
  }
  throw UsageError("no record for " + to_string(method) + " at budget " + std::to_string(budget));
}

SelectionReport run_selection_benchmark(const data::Dataset& train, const data::Dataset& test,
                                        const SelectionConfig& config) {
  config.validate(train.size());
  SelectionReport report;
  report.echo = config.echo;
  report.pool_size = config.pool_size;
  Timing& timing = report.timing;
  const bool classification = train.task.is_classification();

  const data::Dataset pool = run_stage(timing, "pool", [&] {
    Rng rng(derive_seed(config.seed, Stream::pool));
    std::vector<std::size_t> picked = rng.permutation(train.size());
    picked.resize(config.pool_size);
    std::sort(picked.begin(), picked.end());
    return train.subset(picked);
  });
  const std::vector<int> labels = classification ? class_labels(pool) : std::vector<int>{};
  const model::TargetSpec target = model::TargetSpec::mean_test_loss(test);

  const model::ModelParams theta =
      run_stage(timing, "train", [&] { return config.trainer.fit(pool).params; });
  report.n_params = theta.size();
  report.reference_test_loss = model::target_value(theta, target);
  report.provenance = curvature::resolve(config.curvature.mode, config.trainer.arch);

  const selection::CandidateCache cache = run_stage(timing, "curvature", [&] {
    const auto h = training_curvature(theta, pool, config.trainer, config.curvature,
                                      report.provenance);
    const Matrix hf = curvature::target_hessian(theta, target, report.provenance,
                                                config.curvature.target_block_diagonal,
                                                config.curvature.dense_limit)
                          .matrix;
    return selection::precompute(h, hf, model::target_grad(theta, target),
                                 influence::example_gradients(theta, pool), pool.size());
  });

  // Selection order per (method, seed); deterministic methods share one order.
  const std::size_t max_budget = config.budgets.back();
  std::vector<std::vector<std::vector<std::size_t>>> orders(config.methods.size());
  run_stage(timing, "select", [&] {
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      std::vector<selection::TraceRow> trace;
      switch (config.methods[m]) {
        case Method::random:
          for (std::uint64_t s : config.seeds) {
            Rng rng(derive_seed(s, Stream::random_selection));
            auto order = rng.permutation(pool.size());
            order.resize(max_budget);
            orders[m].push_back(std::move(order));
          }
          trace = replay(cache, orders[m].front(), labels);
          break;
        case Method::top_k_first_order:
          orders[m].push_back(selection::top_k_first_order(cache, max_budget));
          trace = replay(cache, orders[m].front(), labels);
          break;
        case Method::greedy_interaction: {
          selection::GreedyOptions opts;
          opts.stop_at_positive = config.stop_at_positive;
          opts.threads = config.threads;
          opts.labels = labels;
          auto result = selection::greedy_select(cache, max_budget, opts);
          orders[m].push_back(std::move(result.state.selected));
          trace = std::move(result.trace);
          break;
        }
      }
      report.traces.emplace_back(config.methods[m], std::move(trace));
    }
  });

  struct Job {
    std::size_t method;
    std::size_t budget;
    std::size_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    for (std::size_t b = 0; b < config.budgets.size(); ++b) {
      for (std::size_t s = 0; s < config.seeds.size(); ++s) jobs.push_back({m, b, s});
    }
  }
  std::vector<double> losses(jobs.size());
  std::vector<double> entropies(jobs.size());
  auto prefix_of = [&](const Job& job) {
    const auto& order = orders[job.method][std::min(job.seed, orders[job.method].size() - 1)];
    const std::size_t k = std::min(config.budgets[job.budget], order.size());
    return std::vector<std::size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  };
  run_stage(timing, "retrain", [&] {
    parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
      std::vector<std::size_t> chosen = prefix_of(jobs[j]);
      if (chosen.empty()) throw DegenerateError("selection is empty; nothing to retrain on");
      entropies[j] = classification ? selection::class_entropy(chosen, labels) : kNaN;
      // Sorted so equal sets train identically whatever the selection order.
      std::sort(chosen.begin(), chosen.end());
      Trainer seeded = config.trainer;
      seeded.config.seed = config.seeds[jobs[j].seed];
      losses[j] = model::target_value(seeded.fit(pool.subset(chosen)).params, target);
    });
  });

  for (std::size_t j = 0; j < jobs.size();) {
    SelectionRecord rec;
    rec.method = config.methods[jobs[j].method];
    rec.budget = config.budgets[jobs[j].budget];
    const auto first = prefix_of(jobs[j]);
    rec.addition_estimate = selection::addition_estimate(cache, first);
    for (std::size_t s = 0; s < config.seeds.size(); ++s, ++j) {
      rec.losses.push_back(losses[j]);
      rec.entropies.push_back(entropies[j]);
    }
    rec.loss_mean = mean(rec.losses);
    rec.loss_std = sample_std(rec.losses);
    rec.entropy_mean = mean(rec.entropies);
    report.records.push_back(std::move(rec));
  }
  return report;
}

nlohmann::json SelectionReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : records) {
    rows.push_back({{"method", to_string(r.method)},
                    {"budget", r.budget},
                    {"test_loss_mean", r.loss_mean},
                    {"test_loss_std", r.loss_std},
                    {"test_loss_per_seed", r.losses},
                    {"class_entropy_mean", r.entropy_mean},
                    {"class_entropy_per_seed", r.entropies},
                    {"addition_estimate", r.addition_estimate}});
  }
  return {{"pool_size", pool_size},
          {"n_params", n_params},
          {"curvature_provenance", curvature::to_string(provenance)},
          {"reference_test_loss", reference_test_loss},
          {"records", rows},
          {"config", echo}};
}

std::string SelectionReport::selection_csv() const {
  std::string out =
      "method,budget,seeds,test_loss_mean,test_loss_std,class_entropy_mean,addition_estimate\n";
  for (const auto& r : records) {
    out += to_string(r.method) + "," + std::to_string(r.budget) + "," +
           std::to_string(r.losses.size()) + "," + format_double(r.loss_mean) + "," +
           format_double(r.loss_std) + "," + format_double(r.entropy_mean) + "," +
           format_double(r.addition_estimate) + "\n";
  }
  return out;
}

}  // namespace iaif::oracle
