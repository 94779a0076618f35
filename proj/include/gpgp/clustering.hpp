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

// Clusters of comparable items. If items split into L groups that are
// rankable within a group and incomparable across groups, the complete
// preference matrix is
//
//   G = sum_l (f_l 1_l^T - 1_l f_l^T),
//
// which has rank 2L. Items are clustered by k-means on the top 2L singular
// vectors of an estimate of G.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpgp/dataset.hpp"
#include "gpgp/error.hpp"
#include "gpgp/preference_models.hpp"

namespace gpgp {

struct PreferenceMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> ids;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }

  // Skew-symmetric to `tol` relative to the largest entry, zero diagonal.
  bool is_skew_symmetric(double tol = 1e-8) const {
    if (values.rows() != values.cols()) return false;
    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    return (values + values.transpose()).cwiseAbs().maxCoeff() <= tol * scale &&
           values.diagonal().cwiseAbs().maxCoeff() == 0.0;
  }
};

struct ClusterResult {
  std::vector<int> assignment;       // label in 1..L per item
  Eigen::MatrixXd embedding;         // n x 2L rows fed to k-means
  Eigen::VectorXd singular_values;   // top 2L
  std::string method;
  bool scaled = false;               // rows scaled by sqrt(singular value)
  double inertia = 0.0;
};

struct KMeansOptions {
  int restarts = 50;
  int max_iter = 300;
};

struct KMeansResult {
  std::vector<int> labels;  // 0-based
  double inertia = 0.0;
};

namespace detail {

inline double sq_dist(const Eigen::MatrixXd& pts, Eigen::Index r, const Eigen::MatrixXd& ctr,
                      Eigen::Index c) {
  return (pts.row(r) - ctr.row(c)).squaredNorm();
}

// Lloyd iterations from the given centres. Returns inertia; labels written
// in place. An emptied cluster is re-seeded at the point farthest from its
// current centre.
inline double lloyd(const Eigen::MatrixXd& pts, Eigen::MatrixXd& ctr, std::vector<int>& labels,
                    int max_iter) {
  const auto n = pts.rows();
  const auto k = ctr.rows();
  labels.assign(static_cast<std::size_t>(n), -1);
  double inertia = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    inertia = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      int best = 0;
      double bd = sq_dist(pts, r, ctr, 0);
      for (Eigen::Index c = 1; c < k; ++c) {
        const double d = sq_dist(pts, r, ctr, c);
        if (d < bd) {
          bd = d;
          best = static_cast<int>(c);
        }
      }
      inertia += bd;
      if (labels[static_cast<std::size_t>(r)] != best) {
        labels[static_cast<std::size_t>(r)] = best;
        changed = true;
      }
    }
    if (!changed && it > 0) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, pts.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index r = 0; r < n; ++r) {
      sums.row(labels[static_cast<std::size_t>(r)]) += pts.row(r);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(r)])];
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        ctr.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
      } else {
        Eigen::Index far = 0;
        double fd = -1.0;
        for (Eigen::Index r = 0; r < n; ++r) {
          const double d = sq_dist(pts, r, ctr, labels[static_cast<std::size_t>(r)]);
          if (d > fd) {
            fd = d;
            far = r;
          }
        }
        ctr.row(c) = pts.row(far);
      }
    }
  }
  return inertia;
}

// Hartigan refinement after Lloyd: moves single points between clusters
// while that strictly lowers the inertia, which escapes many Lloyd fixed
// points. Returns the final inertia.
inline double hartigan(const Eigen::MatrixXd& pts, Eigen::MatrixXd& ctr, std::vector<int>& labels,
                       int max_sweeps) {
  const auto n = pts.rows();
  const auto k = ctr.rows();
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  ctr.setZero();
  for (Eigen::Index r = 0; r < n; ++r) {
    ctr.row(labels[static_cast<std::size_t>(r)]) += pts.row(r);
    ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(r)])];
  }
  for (Eigen::Index c = 0; c < k; ++c)
    if (counts[static_cast<std::size_t>(c)] > 0) ctr.row(c) /= counts[static_cast<std::size_t>(c)];
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool moved = false;
    for (Eigen::Index r = 0; r < n; ++r) {
      const int from = labels[static_cast<std::size_t>(r)];
      const double nf = counts[static_cast<std::size_t>(from)];
      if (nf <= 1.0) continue;
      const double remove_gain = nf / (nf - 1.0) * sq_dist(pts, r, ctr, from);
      int to = from;
      double best_cost = remove_gain;
      for (Eigen::Index c = 0; c < k; ++c) {
        if (c == from) continue;
        const double nt = counts[static_cast<std::size_t>(c)];
        const double add_cost = nt / (nt + 1.0) * sq_dist(pts, r, ctr, c);
        if (add_cost < best_cost * (1.0 - 1e-12)) {
          best_cost = add_cost;
          to = static_cast<int>(c);
        }
      }
      if (to == from) continue;
      const double nt = counts[static_cast<std::size_t>(to)];
      ctr.row(from) = (ctr.row(from) * nf - pts.row(r)) / (nf - 1.0);
      ctr.row(to) = (ctr.row(to) * nt + pts.row(r)) / (nt + 1.0);
      --counts[static_cast<std::size_t>(from)];
      ++counts[static_cast<std::size_t>(to)];
      labels[static_cast<std::size_t>(r)] = to;
      moved = true;
    }
    if (!moved) break;
  }
  double inertia = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) inertia += sq_dist(pts, r, ctr, labels[static_cast<std::size_t>(r)]);
  return inertia;
}

}  // namespace detail

// Greedy k-means++ seeding, Lloyd then Hartigan refinement, best of `restarts`
// runs by inertia. Deterministic for a fixed seed.
inline KMeansResult kmeans(const Eigen::MatrixXd& pts, int k, std::uint64_t seed,
                           const KMeansOptions& opts = {}) {
  const auto n = pts.rows();
  if (k < 1 || k > n) throw InputError("kmeans: need 1 <= k <= number of points");
  std::mt19937_64 rng(seed);
  const int candidates = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int rs = 0; rs < std::max(1, opts.restarts); ++rs) {
    Eigen::MatrixXd ctr(k, pts.cols());
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    ctr.row(0) = pts.row(pick(rng));
    Eigen::VectorXd d2(n);
    for (Eigen::Index r = 0; r < n; ++r) d2(r) = detail::sq_dist(pts, r, ctr, 0);
    for (int c = 1; c < k; ++c) {
      const double total = d2.sum();
      Eigen::Index chosen = pick(rng);
      if (total > 0.0) {
        // Greedy seeding: sample several candidates by D^2 weight and keep
        // the one that leaves the smallest potential.
        double best_potential = std::numeric_limits<double>::infinity();
        for (int t = 0; t < candidates; ++t) {
          double u = std::uniform_real_distribution<double>(0.0, total)(rng);
          Eigen::Index cand = n - 1;
          for (Eigen::Index r = 0; r < n; ++r) {
            u -= d2(r);
            if (u < 0.0) {
              cand = r;
              break;
            }
          }
          double potential = 0.0;
          for (Eigen::Index r = 0; r < n; ++r)
            potential += std::min(d2(r), (pts.row(r) - pts.row(cand)).squaredNorm());
          if (potential < best_potential) {
            best_potential = potential;
            chosen = cand;
          }
        }
      }
      ctr.row(c) = pts.row(chosen);
      for (Eigen::Index r = 0; r < n; ++r) d2(r) = std::min(d2(r), detail::sq_dist(pts, r, ctr, c));
    }
    std::vector<int> labels;
    detail::lloyd(pts, ctr, labels, opts.max_iter);
    const double inertia = detail::hartigan(pts, ctr, labels, opts.max_iter);
    if (inertia < best.inertia) {
      best.inertia = inertia;
      best.labels = std::move(labels);
    }
  }
  return best;
}

// Relabels to 1..L in order of first appearance.
inline std::vector<int> canonical_labels(const std::vector<int>& raw) {
  std::map<int, int> remap;
  std::vector<int> out;
  out.reserve(raw.size());
  for (int r : raw) {
    auto [it, inserted] = remap.try_emplace(r, static_cast<int>(remap.size()) + 1);
    out.push_back(it->second);
  }
  return out;
}

// Comparison matrix: Y_ij = (#duels i won against j) - (#duels i lost to j).
inline Eigen::MatrixXd comparison_matrix(const PreferenceDataset& ds) {
  validate(ds);
  const auto n = static_cast<Eigen::Index>(ds.num_items());
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);
  for (const Duel& d : ds.duels) {
    const auto i = static_cast<Eigen::Index>(d.first), j = static_cast<Eigen::Index>(d.second);
    y(i, j) += d.y;
    y(j, i) -= d.y;
  }
  return y;
}

// Top-2L left singular vectors + k-means on the rows.
inline ClusterResult spectral_cluster(const Eigen::MatrixXd& g, int num_clusters, std::uint64_t seed,
                                      bool scale_rows = false, const KMeansOptions& km = {}) {
  const auto n = g.rows();
  if (g.cols() != n) throw InputError("spectral clustering needs a square matrix");
  if (num_clusters < 1 || 2 * num_clusters > n)
    throw InputError("need 1 <= 2L <= n (L=" + std::to_string(num_clusters) +
                     ", n=" + std::to_string(n) + ")");
  if (!g.allFinite()) throw InputError("preference matrix has non-finite entries");
  if (g.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateInputError("preference matrix is identically zero; nothing to cluster");

  const int r = 2 * num_clusters;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU);
  ClusterResult out;
  out.singular_values = svd.singularValues().head(r);
  out.embedding = svd.matrixU().leftCols(r);
  out.scaled = scale_rows;
  if (scale_rows) out.embedding = out.embedding * out.singular_values.cwiseSqrt().asDiagonal();
  const KMeansResult res = kmeans(out.embedding, num_clusters, seed, km);
  out.assignment = canonical_labels(res.labels);
  out.inertia = res.inertia;
  return out;
}

// GPGP-CLUS: clusters a fitted (or exact) preference matrix.
inline ClusterResult gpgp_clus(const PreferenceMatrix& g, int num_clusters, std::uint64_t seed,
                               bool scale_rows = false) {
  ClusterResult out = spectral_cluster(g.values, num_clusters, seed, scale_rows);
  out.method = "gpgp-clus";
  return out;
}

// SVD-CLUS: the raw comparison matrix, unobserved entries left at zero.
inline ClusterResult svd_clus(const PreferenceDataset& ds, int num_clusters, std::uint64_t seed,
                              bool scale_rows = false) {
  ClusterResult out = spectral_cluster(comparison_matrix(ds), num_clusters, seed, scale_rows);
  out.method = "svd-clus";
  return out;
}

// Removes observed comparisons whose fitted PGP win probability lies within
// `tau` of 1/2 (the pair is declared incomparable).
inline Eigen::MatrixXd abstention_trimmed_matrix(const PreferenceDataset& ds, double tau,
                                                 const FitOptions& fit_opts = {}) {
  if (!(tau >= 0.0 && tau < 0.5)) throw InputError("abstention threshold must lie in [0, 0.5)");
  Eigen::MatrixXd y = comparison_matrix(ds);
  if (tau == 0.0 || ds.duels.empty()) return y;
  const FittedPreferenceModel pgp = fit(ds, ModelKind::PGP, fit_opts);
  const auto n = y.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (y(i, j) == 0.0) continue;
      const double p = pgp.predict_pair(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      if (std::abs(p - 0.5) < tau) y(i, j) = y(j, i) = 0.0;
    }
  return y;
}

// PR-CLUS: SVD-CLUS on the abstention-trimmed comparison matrix.
inline ClusterResult pr_clus(const PreferenceDataset& ds, int num_clusters, double tau,
                             std::uint64_t seed, bool scale_rows = false,
                             const FitOptions& fit_opts = {}) {
  ClusterResult out =
      spectral_cluster(abstention_trimmed_matrix(ds, tau, fit_opts), num_clusters, seed, scale_rows);
  out.method = "pr-clus";
  return out;
}

// Maximum-weight perfect matching on a square matrix (Hungarian method).
// Returns col_of_row.
inline std::vector<int> hungarian_max(const Eigen::MatrixXd& weight) {
  const int n = static_cast<int>(weight.rows());
  const double big = weight.cwiseAbs().maxCoeff() + 1.0;
  // Minimize cost = big - weight, 1-based arrays.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = std::numeric_limits<double>::infinity();
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = (big - weight(i0 - 1, j - 1)) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> col_of_row(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) col_of_row[p[j] - 1] = j - 1;
  return col_of_row;
}

// Fraction of items clustered correctly under the best matching of result
// labels to true labels.
inline double proportion_correct(const std::vector<int>& result, const std::vector<int>& truth) {
  if (result.size() != truth.size())
    throw InputError("proportion_correct: labelings cover different numbers of items");
  if (result.empty()) throw InputError("proportion_correct: empty labeling");
  std::map<int, int> ri, ti;
  for (int r : result) ri.try_emplace(r, static_cast<int>(ri.size()));
  for (int t : truth) ti.try_emplace(t, static_cast<int>(ti.size()));
  const auto s = static_cast<Eigen::Index>(std::max(ri.size(), ti.size()));
  Eigen::MatrixXd confusion = Eigen::MatrixXd::Zero(s, s);
  for (std::size_t k = 0; k < result.size(); ++k) confusion(ri[result[k]], ti[truth[k]]) += 1.0;
  const auto match = hungarian_max(confusion);
  double hits = 0.0;
  for (Eigen::Index r = 0; r < s; ++r) hits += confusion(r, match[static_cast<std::size_t>(r)]);
  return hits / static_cast<double>(result.size());
}

inline double proportion_correct(const ClusterResult& result, const std::vector<int>& truth) {
  return proportion_correct(result.assignment, truth);
}

}  // namespace gpgp
