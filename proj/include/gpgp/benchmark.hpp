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

// Train/test benchmark over repeated random splits, with per-model
// accuracy summaries and rank-sum comparisons against GPGP.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpgp/dataset.hpp"
#include "gpgp/error.hpp"
#include "gpgp/metrics.hpp"
#include "gpgp/preference_models.hpp"
#include "gpgp/seeds.hpp"

namespace gpgp {

struct BenchmarkConfig {
  std::vector<ModelKind> models{std::begin(kAllModels), std::end(kAllModels)};
  std::size_t trials = 20;
  double train_frac = 0.7;
  std::uint64_t base_seed = 0;
  FitOptions fit;
  double significance_level = 0.05;
};

struct ModelSummary {
  ModelKind kind = ModelKind::GPGP;
  std::vector<std::optional<double>> accuracies;  // per trial; nullopt if the fit failed
  std::vector<std::string> errors;                // per trial; empty when ok
  std::vector<double> lengthscales;               // selected per successful trial (GP kinds)
  std::size_t clamped_variances = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double stddev = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> p_vs_gpgp;
  bool significantly_worse = false;
  std::optional<std::string> absent_reason;

  std::vector<double> successful() const {
    std::vector<double> v;
    for (const auto& a : accuracies)
      if (a) v.push_back(*a);
    return v;
  }
};

struct ExperimentReport {
  std::string dataset_name;
  std::size_t num_items = 0;
  std::size_t num_duels = 0;
  double c_avg = 0.0;
  std::optional<double> c_avg_weighted;  // only when some pair duelled more than once
  BenchmarkConfig config;
  std::vector<std::uint64_t> trial_seeds;
  std::vector<ModelSummary> models;

  const ModelSummary* find(ModelKind k) const {
    for (const auto& m : models)
      if (m.kind == k) return &m;
    return nullptr;
  }
};

inline std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(trial)});
}

// Flags baselines significantly worse than GPGP and fills in means.
inline void summarize(std::vector<ModelSummary>& models, double level) {
  for (auto& m : models) {
    const auto ok = m.successful();
    if (ok.empty()) {
      if (!m.absent_reason) {
        std::string why = "every trial failed";
        for (const auto& e : m.errors)
          if (!e.empty()) {
            why += ": " + e;
            break;
          }
        m.absent_reason = why;
      }
      continue;
    }
    m.mean = mean_of(ok);
    m.stddev = stddev_of(ok);
  }
  const ModelSummary* ref = nullptr;
  for (const auto& m : models)
    if (m.kind == ModelKind::GPGP && !m.absent_reason) ref = &m;
  if (!ref) return;
  const auto ref_acc = ref->successful();
  for (auto& m : models) {
    if (m.kind == ModelKind::GPGP || m.absent_reason) continue;
    const auto acc = m.successful();
    m.p_vs_gpgp = wilcoxon_rank_sum(acc, ref_acc).p_value;
    m.significantly_worse = *m.p_vs_gpgp < level && m.mean < ref->mean;
  }
}

inline ExperimentReport run_benchmark(const PreferenceDataset& ds, const BenchmarkConfig& cfg,
                                      std::string name = "dataset") {
  validate(ds);
  if (cfg.trials < 1) throw InputError("benchmark needs at least one trial");
  if (cfg.models.empty()) throw InputError("benchmark needs at least one model");

  ExperimentReport rep;
  rep.dataset_name = std::move(name);
  rep.num_items = ds.num_items();
  rep.num_duels = ds.duels.size();
  rep.c_avg = ds.num_items() >= 3 ? avg_clustering_coefficient(ds) : 0.0;
  if (ds.num_items() >= 3 && has_repeated_pairs(ds))
    rep.c_avg_weighted = avg_weighted_clustering_coefficient(ds);
  rep.config = cfg;
  for (ModelKind k : cfg.models) {
    ModelSummary s;
    s.kind = k;
    rep.models.push_back(std::move(s));
  }

  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const std::uint64_t seed = trial_seed(cfg.base_seed, t);
    rep.trial_seeds.push_back(seed);
    const auto [train, test] = split(ds, cfg.train_frac, seed);
    for (auto& m : rep.models) {
      try {
        const FittedPreferenceModel model = fit(train, m.kind, cfg.fit);
        std::size_t clamped = 0;
        for (const Duel& d : test.duels)
          if (model.predict_pair_detailed(d.first, d.second).variance_clamped) ++clamped;
        m.accuracies.emplace_back(accuracy(model, test));
        m.errors.emplace_back();
        m.clamped_variances += clamped;
        if (is_gp_kind(m.kind)) m.lengthscales.push_back(model.lengthscale());
      } catch (const Error& e) {
        m.accuracies.emplace_back(std::nullopt);
        m.errors.emplace_back(e.what());
      }
    }
  }
  summarize(rep.models, cfg.significance_level);
  return rep;
}

// Averages per-dataset reports (e.g. one comparison graph per season):
// model means and standard deviations are averaged across datasets and
// the rank-sum test runs on the per-dataset means.
struct AggregateReport {
  std::vector<ExperimentReport> parts;
  std::vector<ModelSummary> models;  // accuracies hold per-dataset means
  double c_avg = 0.0;
  std::vector<double> mean_stddev;   // aligned with models
};

inline AggregateReport aggregate_reports(std::vector<ExperimentReport> parts) {
  if (parts.empty()) throw InputError("nothing to aggregate");
  AggregateReport agg;
  const auto& first = parts.front();
  double c = 0.0;
  for (const auto& p : parts) c += p.c_avg;
  agg.c_avg = c / static_cast<double>(parts.size());
  for (const auto& fm : first.models) {
    ModelSummary s;
    s.kind = fm.kind;
    double sd_sum = 0.0;
    std::size_t sd_n = 0;
    for (const auto& p : parts) {
      const ModelSummary* m = p.find(fm.kind);
      if (m && !m->absent_reason) {
        s.accuracies.emplace_back(m->mean);
        s.errors.emplace_back();
        sd_sum += m->stddev;
        ++sd_n;
      } else {
        s.accuracies.emplace_back(std::nullopt);
        s.errors.emplace_back(p.dataset_name + ": model absent");
      }
    }
    agg.mean_stddev.push_back(sd_n ? sd_sum / static_cast<double>(sd_n)
                                   : std::numeric_limits<double>::quiet_NaN());
    agg.models.push_back(std::move(s));
  }
  summarize(agg.models, first.config.significance_level);
  agg.parts = std::move(parts);
  return agg;
}

namespace detail {

inline nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json to_json(const BenchmarkConfig& cfg) {
  nlohmann::json models = nlohmann::json::array();
  for (ModelKind k : cfg.models) models.push_back(to_string(k));
  return {{"models", models},
          {"trials", cfg.trials},
          {"train_frac", cfg.train_frac},
          {"base_seed", cfg.base_seed},
          {"gamma_grid", {{"lo", cfg.fit.grid_lo}, {"hi", cfg.fit.grid_hi}, {"points", cfg.fit.grid_points}}},
          {"lengthscale", detail::optional_json(cfg.fit.lengthscale)},
          {"logreg_lambda", cfg.fit.logreg_lambda},
          {"significance_level", cfg.significance_level}};
}

inline nlohmann::json to_json(const ModelSummary& m) {
  nlohmann::json acc = nlohmann::json::array();
  for (const auto& a : m.accuracies) acc.push_back(detail::optional_json(a));
  nlohmann::json j = {{"model", to_string(m.kind)},
                      {"accuracies", acc},
                      {"errors", m.errors},
                      {"mean", detail::finite_or_null(m.mean)},
                      {"std", detail::finite_or_null(m.stddev)},
                      {"p_vs_gpgp", detail::optional_json(m.p_vs_gpgp)},
                      {"significantly_worse_than_gpgp", m.significantly_worse},
                      {"clamped_variances", m.clamped_variances},
                      {"lengthscales", m.lengthscales}};
  if (m.absent_reason) j["absent_reason"] = *m.absent_reason;
  return j;
}

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : r.models) models.push_back(to_json(m));
  return {{"dataset", r.dataset_name},
          {"num_items", r.num_items},
          {"num_duels", r.num_duels},
          {"c_avg", r.c_avg},
          {"c_avg_weighted", detail::optional_json(r.c_avg_weighted)},
          {"config", to_json(r.config)},
          {"trial_seeds", r.trial_seeds},
          {"models", models}};
}

inline nlohmann::json to_json(const AggregateReport& a) {
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : a.parts) parts.push_back(to_json(p));
  nlohmann::json models = nlohmann::json::array();
  for (std::size_t k = 0; k < a.models.size(); ++k) {
    auto j = to_json(a.models[k]);
    j["mean_of_std"] = detail::finite_or_null(a.mean_stddev[k]);
    models.push_back(std::move(j));
  }
  return {{"aggregate", {{"c_avg", a.c_avg}, {"models", models}}}, {"datasets", parts}};
}

// trial,model,accuracy,error
inline std::string trials_csv(const ExperimentReport& r) {
  std::string out = "dataset,trial,seed,model,accuracy,error\n";
  for (std::size_t t = 0; t < r.trial_seeds.size(); ++t)
    for (const auto& m : r.models) {
      std::string err = m.errors[t];
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      char acc[32] = "";
      if (m.accuracies[t]) std::snprintf(acc, sizeof acc, "%.6f", *m.accuracies[t]);
      out += r.dataset_name + "," + std::to_string(t) + "," + std::to_string(r.trial_seeds[t]) + "," +
             to_string(m.kind) + "," + acc + "," + err + "\n";
    }
  return out;
}

// One table row: mean +- std per model, '*' when significantly worse than GPGP.
inline std::string table_row(const std::string& name, std::size_t items, std::size_t duels,
                             double c_avg, const std::vector<ModelSummary>& models) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-16s | %5zu | %6zu | %.2f", name.c_str(), items, duels, c_avg);
  std::string out = buf;
  for (const auto& m : models) {
    if (m.absent_reason) {
      std::snprintf(buf, sizeof buf, " | %s n/a", to_string(m.kind).c_str());
    } else {
      std::snprintf(buf, sizeof buf, " | %s %.2f +- %.2f%s", to_string(m.kind).c_str(), m.mean,
                    m.stddev, m.significantly_worse ? "*" : "");
    }
    out += buf;
  }
  return out;
}

inline std::string table_row(const ExperimentReport& r) {
  return table_row(r.dataset_name, r.num_items, r.num_duels, r.c_avg, r.models);
}

}  // namespace gpgp
