// Copyright 2026 The GPGP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// gpgp command-line front end. Exit codes: 0 success, 1 runtime or data
// error, 2 usage error.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "gpgp/gpgp.hpp"

namespace gpgp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr std::size_t kMaxSweepCells = 10000;

namespace fs = std::filesystem;

inline std::string default_output_dir() {
  if (const char* env = std::getenv("GPGP_OUTPUT_DIR"); env && *env) return env;
  return "gpgp_out";
}

// "0.2:1.0:5" (start:stop:count, inclusive) or "0.2,0.4,1".
inline std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw CLI::ValidationError("range must be start:stop:count");
    double lo = 0, hi = 0;
    if (!detail::parse_double(parts[0], lo) || !detail::parse_double(parts[1], hi))
      throw CLI::ValidationError("bad range bounds in '" + text + "'");
    const int count = std::stoi(parts[2]);
    if (count < 1) throw CLI::ValidationError("range count must be >= 1");
    for (int i = 0; i < count; ++i)
      out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    double v = 0;
    if (!detail::parse_double(detail::trim(p), v))
      throw CLI::ValidationError("'" + p + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("empty list");
  return out;
}

inline std::vector<ModelKind> parse_models(const std::string& text) {
  std::vector<ModelKind> out;
  std::stringstream ss(text);
  try {
    for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_model_kind(detail::trim(p)));
  } catch (const InputError& e) {
    throw CLI::ValidationError(e.what());
  }
  if (out.empty()) throw CLI::ValidationError("no models given");
  return out;
}

inline std::string format6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline nlohmann::json echo(const std::string& sub, const std::vector<std::string>& argv,
                           nlohmann::json options) {
  return {{"subcommand", sub}, {"argv", argv}, {"options", std::move(options)}};
}

inline void write_json(const fs::path& p, const nlohmann::json& j) {
  write_file_atomic(p, j.dump(2) + "\n");
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string mode = "cyclic";
  std::size_t n = 30, p = 5;
  int L = 1;
  double sparsity = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

inline nlohmann::json truth_json(const SyntheticSpec& spec, const SyntheticInstance& inst) {
  nlohmann::json z = nlohmann::json::object();
  for (std::size_t i = 0; i < inst.states.size(); ++i) z[inst.dataset.items.ids[i]] = inst.states[i];
  return {{"seed", spec.seed},
          {"mode", to_string(spec.mode)},
          {"L", spec.num_states},
          {"n", spec.n},
          {"p", spec.p},
          {"sparsity", spec.sparsity},
          {"z", z},
          {"alpha_digest", alpha_digest(inst)},
          {"ties_dropped", inst.ties_dropped}};
}

inline int run_simulate(const SimulateArgs& a, const std::vector<std::string>& argv) {
  SyntheticSpec spec;
  spec.mode = parse_synthetic_mode(a.mode);
  spec.n = a.n;
  spec.p = a.p;
  spec.num_states = a.L;
  spec.sparsity = a.sparsity;
  spec.seed = a.seed;
  const SyntheticInstance inst = generate(spec);
  const fs::path dir = a.out;
  write_file_atomic(dir / "items.csv", items_csv(inst.dataset.items));
  write_file_atomic(dir / "duels.csv", duels_csv(inst.dataset));
  auto truth = truth_json(spec, inst);
  truth["config"] = echo("simulate", argv,
                         {{"mode", a.mode}, {"n", a.n}, {"p", a.p}, {"L", a.L},
                          {"sparsity", a.sparsity}, {"seed", a.seed}});
  write_json(dir / "truth.json", truth);
  std::cout << "wrote " << inst.dataset.duels.size() << " duels over " << spec.n << " items to "
            << dir.string() << "\n";
  return kExitOk;
}

// --------------------------------------------------------------- benchmark

struct FitArgs {
  double gamma_lo = 0.1, gamma_hi = 10.0;
  int gamma_points = 10;
  std::optional<double> lengthscale;

  FitOptions options() const {
    FitOptions f;
    f.grid_lo = gamma_lo;
    f.grid_hi = gamma_hi;
    f.grid_points = gamma_points;
    f.lengthscale = lengthscale;
    return f;
  }
  nlohmann::json to_json() const {
    return {{"gamma_lo", gamma_lo},
            {"gamma_hi", gamma_hi},
            {"gamma_points", gamma_points},
            {"lengthscale", lengthscale ? nlohmann::json(*lengthscale) : nlohmann::json(nullptr)}};
  }
};

inline void add_fit_flags(CLI::App* sub, FitArgs& f) {
  sub->add_option("--gamma-lo", f.gamma_lo, "Smallest lengthscale, as a multiple of the median distance")
      ->check(CLI::PositiveNumber);
  sub->add_option("--gamma-hi", f.gamma_hi, "Largest lengthscale, as a multiple of the median distance")
      ->check(CLI::PositiveNumber);
  sub->add_option("--gamma-points", f.gamma_points, "Number of log-spaced grid points")
      ->check(CLI::Range(1, 1000));
  sub->add_option("--lengthscale", f.lengthscale, "Fixed lengthscale (skips evidence grid search)")
      ->check(CLI::PositiveNumber);
}

struct BenchmarkArgs {
  std::vector<std::string> items, duels, names;
  std::string models = "gpgp,pgp,pair-gp,pair-logreg";
  std::size_t trials = 20;
  double train_frac = 0.7;
  std::uint64_t seed = 0;
  FitArgs fit;
  std::string out;
};

inline int run_benchmark_cmd(const BenchmarkArgs& a, const std::vector<std::string>& argv) {
  if (a.items.size() != a.duels.size()) {
    std::cerr << "error: --items and --duels must be given the same number of times\n";
    return kExitUsage;
  }
  if (!a.names.empty() && a.names.size() != a.items.size()) {
    std::cerr << "error: --name must be given once per dataset\n";
    return kExitUsage;
  }
  BenchmarkConfig cfg;
  cfg.models = parse_models(a.models);
  cfg.trials = a.trials;
  cfg.train_frac = a.train_frac;
  cfg.base_seed = a.seed;
  cfg.fit = a.fit.options();

  std::vector<ExperimentReport> reports;
  for (std::size_t d = 0; d < a.items.size(); ++d) {
    const PreferenceDataset ds = load_dataset(a.items[d], a.duels[d]);
    const std::string name =
        a.names.empty() ? fs::path(a.duels[d]).stem().string() : a.names[d];
    reports.push_back(run_benchmark(ds, cfg, name));
  }

  const fs::path dir = a.out;
  std::string trials;
  for (const auto& r : reports) {
    const std::string csv = trials_csv(r);
    trials += trials.empty() ? csv : csv.substr(csv.find('\n') + 1);
  }
  write_file_atomic(dir / "trials.csv", trials);
  write_json(dir / "config.json",
             echo("benchmark", argv,
                  {{"items", a.items}, {"duels", a.duels}, {"names", a.names}, {"models", a.models},
                   {"trials", a.trials}, {"train_frac", a.train_frac}, {"seed", a.seed},
                   {"fit", a.fit.to_json()}}));

  for (const auto& r : reports) {
    std::cout << table_row(r) << "\n";
    for (const auto& m : r.models)
      if (m.absent_reason)
        std::cerr << "warning: " << r.dataset_name << ": " << to_string(m.kind) << " absent ("
                  << *m.absent_reason << ")\n";
  }
  if (reports.size() == 1) {
    write_json(dir / "report.json", to_json(reports.front()));
  } else {
    const AggregateReport agg = aggregate_reports(reports);
    write_json(dir / "report.json", to_json(agg));
    std::cout << table_row("aggregate", agg.parts.front().num_items, 0, agg.c_avg, agg.models) << "\n";
  }
  return kExitOk;
}

// ----------------------------------------------------------------- cluster

inline const std::vector<std::string>& cluster_methods() {
  static const std::vector<std::string> m{"gpgp-clus", "pr-clus", "svd-clus"};
  return m;
}

inline std::vector<std::string> parse_methods(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) {
    p = detail::trim(p);
    if (std::find(cluster_methods().begin(), cluster_methods().end(), p) == cluster_methods().end())
      throw CLI::ValidationError("unknown clustering method '" + p + "'");
    out.push_back(p);
  }
  if (out.empty()) throw CLI::ValidationError("no clustering method given");
  return out;
}

inline ClusterResult run_method(const std::string& method, const PreferenceDataset& ds, int L,
                                double tau, std::uint64_t seed, bool scale, const FitOptions& fo) {
  if (method == "svd-clus") return svd_clus(ds, L, seed, scale);
  if (method == "pr-clus") return pr_clus(ds, L, tau, seed, scale, fo);
  const FittedPreferenceModel model = fit(ds, ModelKind::GPGP, fo);
  PreferenceMatrix g{model.predict_matrix(), ds.items.ids};
  return gpgp_clus(g, L, seed, scale);
}

struct ClusterArgs {
  std::string items, duels, truth;
  std::optional<int> L;
  std::string methods = "gpgp-clus,pr-clus,svd-clus";
  double tau = 0.1;
  std::uint64_t seed = 0;
  bool scale = false;
  FitArgs fit;
  std::string out;
  // sweep mode
  std::string sweep;
  std::string sparsity = "0.2:1.0:5";
  std::size_t seeds = 20;
  std::size_t n = 30, p = 5;
  std::size_t jobs = 1;
};

inline std::vector<int> truth_labels(const std::string& path, const ItemTable& items) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  if (!j.contains("z") || !j["z"].is_object()) throw InputError(path + ": missing object 'z'");
  std::vector<int> out;
  for (const auto& id : items.ids) {
    if (!j["z"].contains(id)) throw InputError(path + ": no label for item '" + id + "'");
    out.push_back(j["z"][id].get<int>());
  }
  return out;
}

// Runs `work(index)` for index in [0, count) on up to `jobs` threads and
// returns results in index order.
template <typename F>
auto parallel_map(std::size_t count, std::size_t jobs, F work) {
  using R = decltype(work(std::size_t{0}));
  std::vector<R> results(count);
  jobs = std::max<std::size_t>(1, jobs);
  for (std::size_t start = 0; start < count; start += jobs) {
    std::vector<std::future<R>> batch;
    for (std::size_t k = start; k < std::min(count, start + jobs); ++k)
      batch.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async, work, k));
    for (std::size_t k = 0; k < batch.size(); ++k) results[start + k] = batch[k].get();
  }
  return results;
}

inline int run_cluster_sweep(const ClusterArgs& a, const std::vector<std::string>& argv) {
  if (a.sweep != "sparsity") {
    std::cerr << "error: --sweep supports only 'sparsity'\n";
    return kExitUsage;
  }
  const auto levels = parse_real_list(a.sparsity);
  const auto methods = parse_methods(a.methods);
  const FitOptions fo = a.fit.options();
  const std::size_t cells = levels.size() * a.seeds;

  struct Cell {
    std::vector<std::optional<double>> score;  // per method
  };
  auto cell_results = parallel_map(cells, a.jobs, [&](std::size_t c) {
    const std::size_t li = c / a.seeds, si = c % a.seeds;
    SyntheticSpec spec;
    spec.mode = SyntheticMode::Clustered;
    spec.n = a.n;
    spec.p = a.p;
    spec.num_states = *a.L;
    spec.sparsity = levels[li];
    spec.seed = derive_seed(a.seed, {li, si});
    const auto inst = generate(spec);
    Cell cell;
    for (const auto& m : methods) {
      try {
        const auto res = run_method(m, inst.dataset, *a.L, a.tau, derive_seed(spec.seed, {1}),
                                    a.scale, fo);
        cell.score.emplace_back(proportion_correct(res, inst.states));
      } catch (const Error&) {
        cell.score.emplace_back(std::nullopt);
      }
    }
    return cell;
  });

  std::string csv = "sparsity,method,mean,std,runs,failures\n";
  for (std::size_t li = 0; li < levels.size(); ++li)
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      std::vector<double> v;
      for (std::size_t si = 0; si < a.seeds; ++si)
        if (auto s = cell_results[li * a.seeds + si].score[mi]) v.push_back(*s);
      csv += format6(levels[li]) + "," + methods[mi] + "," +
             (v.empty() ? std::string() : format6(mean_of(v))) + "," +
             (v.empty() ? std::string() : format6(stddev_of(v))) + "," + std::to_string(v.size()) +
             "," + std::to_string(a.seeds - v.size()) + "\n";
    }
  const fs::path dir = a.out;
  write_file_atomic(dir / "plotdata_cluster.csv", csv);
  write_json(dir / "config.json",
             echo("cluster", argv,
                  {{"sweep", a.sweep}, {"L", *a.L}, {"methods", a.methods}, {"tau", a.tau},
                   {"seed", a.seed}, {"scale", a.scale}, {"sparsity", a.sparsity},
                   {"seeds", a.seeds}, {"n", a.n}, {"p", a.p}, {"fit", a.fit.to_json()}}));
  std::cout << csv;
  return kExitOk;
}

inline int run_cluster(const ClusterArgs& a, const std::vector<std::string>& argv) {
  if (!a.sweep.empty()) return run_cluster_sweep(a, argv);
  if (a.items.empty() || a.duels.empty()) {
    std::cerr << "error: --items and --duels are required (or use --sweep)\n";
    return kExitUsage;
  }
  const auto methods = parse_methods(a.methods);
  const PreferenceDataset ds = load_dataset(a.items, a.duels);
  std::optional<std::vector<int>> truth;
  if (!a.truth.empty()) truth = truth_labels(a.truth, ds.items);

  std::vector<ClusterResult> results;
  for (const auto& m : methods)
    results.push_back(run_method(m, ds, *a.L, a.tau, a.seed, a.scale, a.fit.options()));

  std::string csv = "id";
  for (const auto& m : methods) csv += "," + m;
  csv += "\n";
  for (std::size_t i = 0; i < ds.num_items(); ++i) {
    csv += ds.items.ids[i];
    for (const auto& r : results) csv += "," + std::to_string(r.assignment[i]);
    csv += "\n";
  }
  nlohmann::json report = nlohmann::json::object();
  for (std::size_t k = 0; k < methods.size(); ++k) {
    nlohmann::json entry = {{"singular_values", std::vector<double>(results[k].singular_values.data(),
                                                                   results[k].singular_values.data() +
                                                                       results[k].singular_values.size())},
                            {"scaled", results[k].scaled},
                            {"inertia", results[k].inertia}};
    if (truth) {
      const double pc = proportion_correct(results[k], *truth);
      entry["proportion_correct"] = pc;
      std::cout << methods[k] << " proportion_correct " << format6(pc) << "\n";
    }
    report[methods[k]] = entry;
  }
  const fs::path dir = a.out;
  write_file_atomic(dir / "assignments.csv", csv);
  write_json(dir / "report.json", report);
  write_json(dir / "config.json",
             echo("cluster", argv,
                  {{"items", a.items}, {"duels", a.duels}, {"truth", a.truth}, {"L", *a.L},
                   {"methods", a.methods}, {"tau", a.tau}, {"seed", a.seed},
                   {"scale", a.scale}, {"fit", a.fit.to_json()}}));
  if (!truth) std::cout << csv;
  return kExitOk;
}

// ------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string mode = "cyclic";
  std::string L = "1,2,5";
  std::string sparsity = "0.2:1.0:5";
  std::size_t seeds = 20;
  std::size_t n = 30, p = 5;
  std::string models = "gpgp,pgp,pair-gp,pair-logreg";
  double train_frac = 0.7;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool force = false;
  FitArgs fit;
  std::string out;
};

// One simulated instance, one train/test split, every model scored.
struct SweepCell {
  std::vector<std::optional<double>> accuracy;  // per model
};

// Seeds: the instance of cell (L index, sparsity index, seed index) uses
// derive_seed(base, {l, s, k}); its split uses derive_seed(instance seed, {0}).
inline SweepCell run_sweep_cell(SyntheticMode mode, std::size_t n, std::size_t p, int L,
                                double sparsity, std::uint64_t instance_seed,
                                const std::vector<ModelKind>& models, double train_frac,
                                const FitOptions& fo) {
  SyntheticSpec spec;
  spec.mode = mode;
  spec.n = n;
  spec.p = p;
  spec.num_states = L;
  spec.sparsity = sparsity;
  spec.seed = instance_seed;
  const auto inst = generate(spec);
  SweepCell cell;
  std::optional<std::pair<PreferenceDataset, PreferenceDataset>> parts;
  try {
    parts = split(inst.dataset, train_frac, derive_seed(instance_seed, {0}));
  } catch (const Error&) {
  }
  for (ModelKind k : models) {
    if (!parts) {
      cell.accuracy.emplace_back(std::nullopt);
      continue;
    }
    try {
      cell.accuracy.emplace_back(accuracy(fit(parts->first, k, fo), parts->second));
    } catch (const Error&) {
      cell.accuracy.emplace_back(std::nullopt);
    }
  }
  return cell;
}

inline int run_sweep(const SweepArgs& a, const std::vector<std::string>& argv) {
  const SyntheticMode mode = parse_synthetic_mode(a.mode);
  std::vector<int> ls;
  for (double v : parse_real_list(a.L)) {
    if (v < 1 || v != static_cast<int>(v)) {
      std::cerr << "error: --L values must be positive integers\n";
      return kExitUsage;
    }
    ls.push_back(static_cast<int>(v));
  }
  const auto levels = parse_real_list(a.sparsity);
  for (double s : levels)
    if (!(s > 0.0 && s <= 1.0)) {
      std::cerr << "error: sparsity levels must lie in (0, 1]\n";
      return kExitUsage;
    }
  const auto models = parse_models(a.models);
  const std::size_t cells = ls.size() * levels.size() * a.seeds;
  if (cells > kMaxSweepCells && !a.force) {
    std::cerr << "error: sweep has " << cells << " cells (limit " << kMaxSweepCells
              << "); pass --force to run it anyway\n";
    return kExitUsage;
  }
  const FitOptions fo = a.fit.options();
  const std::size_t per_l = levels.size() * a.seeds;
  auto results = parallel_map(cells, a.jobs, [&](std::size_t c) {
    const std::size_t li = c / per_l, si = (c % per_l) / a.seeds, k = c % a.seeds;
    return run_sweep_cell(mode, a.n, a.p, ls[li], levels[si], derive_seed(a.seed, {li, si, k}),
                          models, a.train_frac, fo);
  });

  const fs::path dir = a.out;
  std::string cells_csv = "L,sparsity,seed_index,model,accuracy\n";
  for (std::size_t li = 0; li < ls.size(); ++li) {
    std::string panel = "sparsity,model,mean,std,runs,failures\n";
    for (std::size_t si = 0; si < levels.size(); ++si)
      for (std::size_t mi = 0; mi < models.size(); ++mi) {
        std::vector<double> v;
        for (std::size_t k = 0; k < a.seeds; ++k) {
          const auto& acc = results[li * per_l + si * a.seeds + k].accuracy[mi];
          if (acc) v.push_back(*acc);
          cells_csv += std::to_string(ls[li]) + "," + format6(levels[si]) + "," + std::to_string(k) +
                       "," + to_string(models[mi]) + "," + (acc ? format6(*acc) : std::string()) + "\n";
        }
        panel += format6(levels[si]) + "," + to_string(models[mi]) + "," +
                 (v.empty() ? std::string() : format6(mean_of(v))) + "," +
                 (v.empty() ? std::string() : format6(stddev_of(v))) + "," +
                 std::to_string(v.size()) + "," + std::to_string(a.seeds - v.size()) + "\n";
      }
    write_file_atomic(dir / ("plotdata_L" + std::to_string(ls[li]) + ".csv"), panel);
    std::cout << "L=" << ls[li] << "\n" << panel;
  }
  write_file_atomic(dir / "cells.csv", cells_csv);
  write_json(dir / "config.json",
             echo("sweep", argv,
                  {{"mode", a.mode}, {"L", a.L}, {"sparsity", a.sparsity}, {"seeds", a.seeds},
                   {"n", a.n}, {"p", a.p}, {"models", a.models}, {"train_frac", a.train_frac},
                   {"seed", a.seed}, {"fit", a.fit.to_json()}}));
  return kExitOk;
}

// --------------------------------------------------------------------- main

inline int main(int argc, char** argv) {
  CLI::App app{"Preference learning with generalised preferential Gaussian processes"};
  app.require_subcommand(1);
  std::vector<std::string> args(argv + 1, argv + argc);
  const std::string out_default = default_output_dir();

  SimulateArgs sim;
  sim.out = out_default;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic duelling dataset");
  simulate->add_option("--mode", sim.mode, "cyclic or clustered")
      ->check(CLI::IsMember({"cyclic", "clustered"}));
  simulate->add_option("--n", sim.n, "Number of items")->check(CLI::Range(2, 100000));
  simulate->add_option("--p", sim.p, "Covariate dimension")->check(CLI::Range(1, 100000));
  simulate->add_option("--L", sim.L, "Number of latent states")->check(CLI::Range(1, 100000));
  simulate->add_option("--sparsity", sim.sparsity, "Probability that a pair duels, in (0,1]")
      ->check(CLI::Range(0.0, 1.0) & CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("-o,--out", sim.out, "Output directory");

  BenchmarkArgs bench;
  bench.out = out_default;
  auto* benchmark = app.add_subcommand("benchmark", "Repeated train/test evaluation of models");
  benchmark->add_option("--items", bench.items, "Items CSV (repeat for several datasets)")->required();
  benchmark->add_option("--duels", bench.duels, "Duels CSV (repeat for several datasets)")->required();
  benchmark->add_option("--name", bench.names, "Dataset name (repeat per dataset)");
  benchmark->add_option("--models", bench.models, "Comma-separated models");
  benchmark->add_option("--trials", bench.trials, "Number of random splits")->check(CLI::Range(1, 100000));
  benchmark->add_option("--train-frac", bench.train_frac, "Training fraction")
      ->check(CLI::Range(0.0, 1.0) & CLI::PositiveNumber);
  benchmark->add_option("--seed", bench.seed, "Base seed");
  add_fit_flags(benchmark, bench.fit);
  benchmark->add_option("-o,--out", bench.out, "Output directory");

  ClusterArgs clus;
  clus.out = out_default;
  auto* cluster = app.add_subcommand("cluster", "Recover clusters of comparable items");
  cluster->add_option("--items", clus.items, "Items CSV");
  cluster->add_option("--duels", clus.duels, "Duels CSV");
  cluster->add_option("--L", clus.L, "Number of clusters")->required()->check(CLI::Range(1, 100000));
  cluster->add_option("--method", clus.methods, "Comma-separated: gpgp-clus, pr-clus, svd-clus");
  cluster->add_option("--tau", clus.tau, "PR-CLUS abstention threshold in [0, 0.5)")
      ->check(CLI::Range(0.0, 0.4999999));
  cluster->add_option("--seed", clus.seed, "k-means seed (base seed in sweep mode)");
  cluster->add_option("--truth", clus.truth, "Ground-truth JSON with a 'z' object");
  cluster->add_flag("--scale", clus.scale, "Scale singular vectors by sqrt(sigma) before k-means");
  cluster->add_option("--sweep", clus.sweep, "Run a simulated sweep over 'sparsity'");
  cluster->add_option("--sparsity", clus.sparsity, "Sweep levels: start:stop:count or a list");
  cluster->add_option("--seeds", clus.seeds, "Sweep seeds per level")->check(CLI::Range(1, 100000));
  cluster->add_option("--n", clus.n, "Sweep items")->check(CLI::Range(2, 100000));
  cluster->add_option("--p", clus.p, "Sweep covariate dimension")->check(CLI::Range(1, 100000));
  cluster->add_option("--jobs", clus.jobs, "Concurrent sweep cells")->check(CLI::Range(1, 1024));
  add_fit_flags(cluster, clus.fit);
  cluster->add_option("-o,--out", clus.out, "Output directory");

  SweepArgs sw;
  sw.out = out_default;
  auto* sweep = app.add_subcommand("sweep", "Accuracy sweep over (L, sparsity, seed) on simulated data");
  sweep->add_option("--mode", sw.mode, "cyclic or clustered")->check(CLI::IsMember({"cyclic", "clustered"}));
  sweep->add_option("--L", sw.L, "Latent state counts, e.g. 1,2,5");
  sweep->add_option("--sparsity", sw.sparsity, "Levels: start:stop:count or a list");
  sweep->add_option("--seeds", sw.seeds, "Seeds per cell")->check(CLI::Range(1, 1000000));
  sweep->add_option("--n", sw.n, "Items")->check(CLI::Range(2, 100000));
  sweep->add_option("--p", sw.p, "Covariate dimension")->check(CLI::Range(1, 100000));
  sweep->add_option("--models", sw.models, "Comma-separated models");
  sweep->add_option("--train-frac", sw.train_frac, "Training fraction")
      ->check(CLI::Range(0.0, 1.0) & CLI::PositiveNumber);
  sweep->add_option("--seed", sw.seed, "Base seed");
  sweep->add_option("--jobs", sw.jobs, "Concurrent cells")->check(CLI::Range(1, 1024));
  sweep->add_flag("--force", sw.force, "Allow more than 10^4 cells");
  add_fit_flags(sweep, sw.fit);
  sweep->add_option("-o,--out", sw.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*simulate) return run_simulate(sim, args);
    if (*benchmark) return run_benchmark_cmd(bench, args);
    if (*cluster) return run_cluster(clus, args);
    if (*sweep) return run_sweep(sw, args);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace gpgp::cli
