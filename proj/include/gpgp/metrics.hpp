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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "gpgp/dataset.hpp"
#include "gpgp/error.hpp"
#include "gpgp/preference_models.hpp"

namespace gpgp {

// Uniform random partition of the duels; train gets ceil(train_frac * m).
// Both sides keep the full item table.
inline std::pair<PreferenceDataset, PreferenceDataset> split(const PreferenceDataset& ds,
                                                             double train_frac,
                                                             std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw InputError("train fraction must lie in (0, 1)");
  const std::size_t m = ds.duels.size();
  const auto n_train = static_cast<std::size_t>(std::ceil(train_frac * static_cast<double>(m) - 1e-9));
  if (n_train == 0 || n_train >= m)
    throw InputError("split of " + std::to_string(m) + " duels leaves an empty side");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::sort(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

  std::pair<PreferenceDataset, PreferenceDataset> out;
  out.first.items = ds.items;
  out.second.items = ds.items;
  for (std::size_t k = 0; k < m; ++k)
    (k < n_train ? out.first : out.second).duels.push_back(ds.duels[order[k]]);
  return out;
}

inline double accuracy(const FittedPreferenceModel& model, const PreferenceDataset& test) {
  if (test.duels.empty()) throw InputError("accuracy: empty test set");
  std::size_t hits = 0;
  for (const Duel& d : test.duels)
    if (predicts_first_wins(model, d.first, d.second) == (d.y > 0)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(test.duels.size());
}

namespace detail {

// Undirected multiplicities keyed by (min, max).
inline std::map<std::pair<std::size_t, std::size_t>, double> edge_multiplicities(
    const PreferenceDataset& ds) {
  std::map<std::pair<std::size_t, std::size_t>, double> w;
  for (const Duel& d : ds.duels) w[unordered_key(d.first, d.second)] += 1.0;
  return w;
}

}  // namespace detail

// Average local clustering coefficient of the undirected simple graph with
// an edge wherever any duel was played. Nodes of degree < 2 count as 0.
inline double avg_clustering_coefficient(const PreferenceDataset& ds) {
  const std::size_t n = ds.num_items();
  if (n < 3) throw InputError("clustering coefficient needs at least 3 items");
  std::vector<std::set<std::size_t>> adj(n);
  for (const auto& [e, w] : detail::edge_multiplicities(ds)) {
    adj[e.first].insert(e.second);
    adj[e.second].insert(e.first);
  }
  double total = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    const std::vector<std::size_t> nb(adj[v].begin(), adj[v].end());
    const std::size_t k = nb.size();
    if (k < 2) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b)
        if (adj[nb[a]].count(nb[b])) ++links;
    total += 2.0 * static_cast<double>(links) / static_cast<double>(k * (k - 1));
  }
  return total / static_cast<double>(n);
}

// Weighted variant with duel multiplicities as weights, geometric mean of
// the normalized triangle weights (Onnela et al.).
inline double avg_weighted_clustering_coefficient(const PreferenceDataset& ds) {
  const std::size_t n = ds.num_items();
  if (n < 3) throw InputError("clustering coefficient needs at least 3 items");
  const auto w = detail::edge_multiplicities(ds);
  double wmax = 0.0;
  for (const auto& [e, v] : w) wmax = std::max(wmax, v);
  std::vector<std::map<std::size_t, double>> adj(n);
  for (const auto& [e, v] : w) {
    adj[e.first][e.second] = v / wmax;
    adj[e.second][e.first] = v / wmax;
  }
  double total = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t k = adj[v].size();
    if (k < 2) continue;
    std::vector<std::pair<std::size_t, double>> nb(adj[v].begin(), adj[v].end());
    double s = 0.0;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b) {
        auto it = adj[nb[a].first].find(nb[b].first);
        if (it != adj[nb[a].first].end()) s += std::cbrt(nb[a].second * nb[b].second * it->second);
      }
    total += 2.0 * s / static_cast<double>(k * (k - 1));
  }
  return total / static_cast<double>(n);
}

inline bool has_repeated_pairs(const PreferenceDataset& ds) {
  for (const auto& [e, v] : detail::edge_multiplicities(ds))
    if (v > 1.0) return true;
  return false;
}

struct RankSumResult {
  double u = 0.0;         // Mann-Whitney U of the first sample
  double z = 0.0;         // normal score (0 for the exact path)
  double p_value = 1.0;   // two-sided
  bool exact = false;
};

// Samples up to this combined size use the exact permutation distribution.
inline constexpr std::size_t kRankSumExactLimit = 20;

// Two-sided Wilcoxon rank-sum (Mann-Whitney U) test. Ties get mid-ranks.
// Small samples use the exact permutation distribution of the tied rank
// sum; larger ones the normal approximation with tie-corrected variance
// and continuity correction. p is P(|U - E U| >= |u - E U|).
inline RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InputError("rank-sum test needs two nonempty samples");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;
  std::vector<std::pair<double, int>> all;
  all.reserve(n);
  for (double v : a) all.emplace_back(v, 0);
  for (double v : b) all.emplace_back(v, 1);
  std::sort(all.begin(), all.end());

  // Doubled mid-ranks are integers: positions first..last (1-based) share
  // rank (first + last) / 2.
  std::vector<long> rank2(n);
  std::vector<int> group(n);
  double tie_term = 0.0;
  for (std::size_t s = 0; s < n;) {
    std::size_t e = s;
    while (e + 1 < n && all[e + 1].first == all[s].first) ++e;
    const auto r2 = static_cast<long>(s + 1 + e + 1);
    for (std::size_t k = s; k <= e; ++k) {
      rank2[k] = r2;
      group[k] = all[k].second;
    }
    const double t = static_cast<double>(e - s + 1);
    tie_term += t * t * t - t;
    s = e + 1;
  }
  long obs2 = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (group[k] == 0) obs2 += rank2[k];

  RankSumResult res;
  const double dna = static_cast<double>(na), dnb = static_cast<double>(nb);
  res.u = obs2 / 2.0 - dna * (dna + 1.0) / 2.0;
  const double mean_u = dna * dnb / 2.0;

  if (n <= kRankSumExactLimit) {
    res.exact = true;
    const long total2 = std::accumulate(rank2.begin(), rank2.end(), 0L);
    // count[k][s]: subsets of size k with doubled rank sum s.
    std::vector<std::vector<double>> count(na + 1, std::vector<double>(static_cast<std::size_t>(total2) + 1, 0.0));
    count[0][0] = 1.0;
    for (std::size_t item = 0; item < n; ++item)
      for (std::size_t k = std::min(na, item + 1); k >= 1; --k)
        for (long s = total2; s >= rank2[item]; --s)
          count[k][static_cast<std::size_t>(s)] += count[k - 1][static_cast<std::size_t>(s - rank2[item])];
    // Compare |2 R - 2 E R| in exact integer arithmetic: E[2R] = na (n + 1).
    const long center2 = static_cast<long>(na * (n + 1));
    const long obs_dev = std::labs(obs2 - center2);
    double hit = 0.0, all_sets = 0.0;
    for (long s = 0; s <= total2; ++s) {
      const double c = count[na][static_cast<std::size_t>(s)];
      all_sets += c;
      if (std::labs(s - center2) >= obs_dev) hit += c;
    }
    res.p_value = std::min(1.0, hit / all_sets);
    return res;
  }

  const double dn = static_cast<double>(n);
  const double var_u = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (!(var_u > 0.0)) return res;
  const double dev = std::max(0.0, std::abs(res.u - mean_u) - 0.5);
  res.z = dev / std::sqrt(var_u);
  res.p_value = std::min(1.0, std::erfc(res.z / std::sqrt(2.0)));
  return res;
}

inline double mean_of(std::span<const double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Population standard deviation (divides by the sample count).
inline double stddev_of(std::span<const double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace gpgp
