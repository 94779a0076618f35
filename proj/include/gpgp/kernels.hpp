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

// Base kernels on item covariates and the two kernels between edges
// (ordered item pairs):
//
//   k0((u,u'),(v,v')) = k(u,v) + k(u',v') - k(u,v') - k(u',v)
//   kE((u,u'),(v,v')) = k(u,v) k(u',v') - k(u,v') k(u',v)
//
// k0 is the covariance of utility differences f(u) - f(u') and only
// supports rankable preference functions. kE is skew-symmetric in each
// argument and supports general (possibly intransitive) preferences.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpgp/error.hpp"

namespace gpgp {

enum class KernelFamily { RBF, Linear };

struct KernelConfig {
  KernelFamily family = KernelFamily::RBF;
  double lengthscale = 1.0;  // RBF only

  static KernelConfig rbf(double lengthscale) { return {KernelFamily::RBF, lengthscale}; }
  static KernelConfig linear() { return {KernelFamily::Linear, 1.0}; }

  void validate() const {
    if (family == KernelFamily::RBF && !(lengthscale > 0.0 && std::isfinite(lengthscale)))
      throw InputError("RBF lengthscale must be positive and finite, got " +
                       std::to_string(lengthscale));
  }
};

// Ordered item pair (first, second).
struct EdgePair {
  std::size_t first = 0;
  std::size_t second = 0;

  EdgePair reversed() const { return {second, first}; }
  friend bool operator==(const EdgePair&, const EdgePair&) = default;
};

enum class EdgeKernel { K0, KE };

namespace detail {

template <typename A, typename B>
double base_kernel_unchecked(const A& x, const B& y, const KernelConfig& cfg) {
  if (cfg.family == KernelFamily::Linear) return x.dot(y);
  const double d2 = (x - y).squaredNorm();
  return std::exp(-d2 / (2.0 * cfg.lengthscale * cfg.lengthscale));
}

inline double combine(EdgeKernel kind, double uv, double upvp, double uvp, double upv) {
  return kind == EdgeKernel::K0 ? (uv + upvp) - (uvp + upv) : uv * upvp - uvp * upv;
}

}  // namespace detail

inline double base_kernel(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& y,
                          const KernelConfig& cfg) {
  cfg.validate();
  if (x.size() != y.size())
    throw InputError("base_kernel: dimension mismatch (" + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()) + ")");
  return detail::base_kernel_unchecked(x, y, cfg);
}

// Base Gram k(x_a, y_b) between the rows of two covariate matrices.
inline Eigen::MatrixXd base_gram(const Eigen::MatrixXd& xa, const Eigen::MatrixXd& xb,
                                 const KernelConfig& cfg) {
  cfg.validate();
  if (xa.cols() != xb.cols()) throw InputError("base_gram: dimension mismatch");
  Eigen::MatrixXd out(xa.rows(), xb.rows());
  for (Eigen::Index i = 0; i < xa.rows(); ++i)
    for (Eigen::Index j = 0; j < xb.rows(); ++j)
      out(i, j) = detail::base_kernel_unchecked(xa.row(i), xb.row(j), cfg);
  return out;
}

inline Eigen::MatrixXd base_gram(const Eigen::MatrixXd& x, const KernelConfig& cfg) {
  cfg.validate();
  const auto n = x.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = detail::base_kernel_unchecked(x.row(i), x.row(i), cfg);
    for (Eigen::Index j = i + 1; j < n; ++j)
      out(i, j) = out(j, i) = detail::base_kernel_unchecked(x.row(i), x.row(j), cfg);
  }
  return out;
}

inline void check_edge(const EdgePair& e, std::size_t n) {
  if (e.first >= n || e.second >= n)
    throw InputError("edge (" + std::to_string(e.first) + "," + std::to_string(e.second) +
                     ") out of range for " + std::to_string(n) + " items");
}

// Edge kernels evaluated from a precomputed n x n base Gram. All batch
// paths go through here so that every entry is computed by the same
// floating-point expression.
inline double edge_kernel(const Eigen::MatrixXd& item_gram, EdgePair e, EdgePair f,
                          EdgeKernel kind) {
  const auto n = static_cast<std::size_t>(item_gram.rows());
  check_edge(e, n);
  check_edge(f, n);
  return detail::combine(kind, item_gram(e.first, f.first), item_gram(e.second, f.second),
                         item_gram(e.first, f.second), item_gram(e.second, f.first));
}

inline double preference_kernel_k0(EdgePair e, EdgePair f, const Eigen::MatrixXd& x,
                                   const KernelConfig& cfg) {
  const auto n = static_cast<std::size_t>(x.rows());
  check_edge(e, n);
  check_edge(f, n);
  auto k = [&](std::size_t a, std::size_t b) {
    return base_kernel(x.row(a).transpose(), x.row(b).transpose(), cfg);
  };
  return detail::combine(EdgeKernel::K0, k(e.first, f.first), k(e.second, f.second),
                         k(e.first, f.second), k(e.second, f.first));
}

inline double gen_pref_kernel_kE(EdgePair e, EdgePair f, const Eigen::MatrixXd& x,
                                 const KernelConfig& cfg) {
  const auto n = static_cast<std::size_t>(x.rows());
  check_edge(e, n);
  check_edge(f, n);
  auto k = [&](std::size_t a, std::size_t b) {
    return base_kernel(x.row(a).transpose(), x.row(b).transpose(), cfg);
  };
  return detail::combine(EdgeKernel::KE, k(e.first, f.first), k(e.second, f.second),
                         k(e.first, f.second), k(e.second, f.first));
}

// m x m Gram over edges. Symmetric and PSD up to rounding; callers add a
// nugget before factorizing (see add_jitter).
inline Eigen::MatrixXd edge_gram_from_items(std::span<const EdgePair> edges,
                                            const Eigen::MatrixXd& item_gram,
                                            EdgeKernel kind) {
  if (edges.empty()) throw InputError("edge_gram: empty edge list");
  const auto n = static_cast<std::size_t>(item_gram.rows());
  for (const auto& e : edges) check_edge(e, n);
  const auto m = static_cast<Eigen::Index>(edges.size());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const EdgePair e = edges[static_cast<std::size_t>(a)];
    for (Eigen::Index b = a; b < m; ++b) {
      const EdgePair f = edges[static_cast<std::size_t>(b)];
      out(a, b) = out(b, a) =
          detail::combine(kind, item_gram(e.first, f.first), item_gram(e.second, f.second),
                          item_gram(e.first, f.second), item_gram(e.second, f.first));
    }
  }
  return out;
}

inline Eigen::MatrixXd edge_gram(std::span<const EdgePair> edges, const Eigen::MatrixXd& x,
                                 const KernelConfig& cfg, EdgeKernel kind) {
  return edge_gram_from_items(edges, base_gram(x, cfg), kind);
}

// Cross-covariance between `edges` (rows) and `targets` (columns).
inline Eigen::MatrixXd edge_cross_gram(std::span<const EdgePair> edges,
                                       std::span<const EdgePair> targets,
                                       const Eigen::MatrixXd& item_gram, EdgeKernel kind) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(edges.size()),
                      static_cast<Eigen::Index>(targets.size()));
  for (std::size_t a = 0; a < edges.size(); ++a)
    for (std::size_t b = 0; b < targets.size(); ++b)
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          edge_kernel(item_gram, edges[a], targets[b], kind);
  return out;
}

// Nugget applied before any Cholesky factorization of an edge Gram.
inline constexpr double kJitterFactor = 1e-6;

inline Eigen::MatrixXd add_jitter(Eigen::MatrixXd k) {
  if (k.rows() == 0) return k;
  const double nugget = kJitterFactor * k.diagonal().mean();
  if (nugget > 0.0) k.diagonal().array() += nugget;
  return k;
}

}  // namespace gpgp
