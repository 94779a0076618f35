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

// Simulated duelling data.
//
// Every item gets a latent state z in {1..L} and covariates
// x | z ~ N(z * 1_p, I_p). There is one utility function per ordered pair of
// states, r_{z,z'}(x) = sum_j alpha^{z,z'}_j k(x, x_j) with alpha ~ N(0, I_n).
// Item i (listed first) beats item j iff r_{z_i,z_j}(x_i) > r_{z_i,z_j}(x_j).
//
// CYCLIC mode applies that rule to every sampled pair; mixing utilities
// across states produces intransitive cycles. CLUSTERED mode applies it
// only within a state; pairs across states are decided by a fair coin.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpgp/dataset.hpp"
#include "gpgp/error.hpp"
#include "gpgp/kernels.hpp"

namespace gpgp {

enum class SyntheticMode { Cyclic, Clustered };

inline std::string to_string(SyntheticMode m) {
  return m == SyntheticMode::Cyclic ? "cyclic" : "clustered";
}

inline SyntheticMode parse_synthetic_mode(const std::string& s) {
  if (s == "cyclic") return SyntheticMode::Cyclic;
  if (s == "clustered") return SyntheticMode::Clustered;
  throw InputError("unknown simulation mode '" + s + "' (expected cyclic or clustered)");
}

struct SyntheticSpec {
  std::size_t n = 30;
  std::size_t p = 5;
  int num_states = 1;     // L
  double sparsity = 1.0;  // probability that an unordered pair duels
  SyntheticMode mode = SyntheticMode::Cyclic;
  KernelConfig kernel = KernelConfig::rbf(1.0);
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 2) throw InputError("simulation needs n >= 2");
    if (p < 1) throw InputError("simulation needs p >= 1");
    if (num_states < 1) throw InputError("simulation needs L >= 1");
    if (!(sparsity > 0.0 && sparsity <= 1.0))
      throw InputError("sparsity must lie in (0, 1], got " + std::to_string(sparsity));
    kernel.validate();
  }
};

struct SyntheticInstance {
  PreferenceDataset dataset;
  std::vector<int> states;                 // z_i in 1..L
  std::vector<Eigen::VectorXd> alpha;      // alpha^{z,z'} at [(z-1)*L + (z'-1)]
  Eigen::MatrixXd utility_gram;            // k(x_i, x_j) on standardized covariates
  SyntheticMode mode = SyntheticMode::Cyclic;
  int num_states = 1;
  std::size_t ties_dropped = 0;            // pairs skipped because |r(x_i) - r(x_j)| < 1e-12

  const Eigen::VectorXd& coefficients(int z, int zp) const {
    return alpha[static_cast<std::size_t>((z - 1) * num_states + (zp - 1))];
  }

  // r_{z,z'} evaluated at item i.
  double utility(int z, int zp, std::size_t i) const {
    return utility_gram.row(static_cast<Eigen::Index>(i)).dot(coefficients(z, zp));
  }
};

inline constexpr double kTieThreshold = 1e-12;

namespace detail {

inline SyntheticInstance generate(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> state_dist(1, spec.num_states);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto p = static_cast<Eigen::Index>(spec.p);
  const int big_l = spec.num_states;

  SyntheticInstance inst;
  inst.mode = spec.mode;
  inst.num_states = big_l;
  inst.states.resize(spec.n);
  for (auto& z : inst.states) z = state_dist(rng);

  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < p; ++c)
      x(i, c) = inst.states[static_cast<std::size_t>(i)] + normal(rng);

  inst.utility_gram = base_gram(standardize(x), spec.kernel);
  inst.alpha.resize(static_cast<std::size_t>(big_l * big_l));
  for (auto& a : inst.alpha) {
    a.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) a(j) = normal(rng);
  }
  std::vector<Eigen::VectorXd> r(inst.alpha.size());
  for (std::size_t s = 0; s < r.size(); ++s) r[s] = inst.utility_gram * inst.alpha[s];

  auto& ds = inst.dataset;
  ds.items.covariates = std::move(x);
  ds.items.ids.reserve(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) ds.items.ids.push_back("item" + std::to_string(i));

  for (std::size_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = i + 1; j < spec.n; ++j) {
      if (!(unit(rng) < spec.sparsity)) continue;
      const int zi = inst.states[i], zj = inst.states[j];
      if (spec.mode == SyntheticMode::Clustered && zi != zj) {
        ds.duels.push_back({i, j, unit(rng) < 0.5 ? 1 : -1});
        continue;
      }
      const auto& ru = r[static_cast<std::size_t>((zi - 1) * big_l + (zj - 1))];
      const double delta = ru(static_cast<Eigen::Index>(i)) - ru(static_cast<Eigen::Index>(j));
      if (std::abs(delta) < kTieThreshold) {
        ++inst.ties_dropped;
        continue;
      }
      ds.duels.push_back({i, j, delta > 0.0 ? 1 : -1});
    }
  }
  return inst;
}

}  // namespace detail

inline SyntheticInstance generate_cyclic(SyntheticSpec spec) {
  spec.mode = SyntheticMode::Cyclic;
  return detail::generate(spec);
}

inline SyntheticInstance generate_clustered(SyntheticSpec spec) {
  spec.mode = SyntheticMode::Clustered;
  return detail::generate(spec);
}

inline SyntheticInstance generate(const SyntheticSpec& spec) { return detail::generate(spec); }

inline double expected_edge_count(const SyntheticSpec& spec) {
  spec.validate();
  const auto n = static_cast<double>(spec.n);
  return spec.sparsity * n * (n - 1.0) / 2.0;
}

// FNV-1a over the raw bytes of every alpha vector, as 16 hex digits.
inline std::string alpha_digest(const SyntheticInstance& inst) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& a : inst.alpha) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(a.data());
    for (std::size_t b = 0; b < static_cast<std::size_t>(a.size()) * sizeof(double); ++b) {
      h ^= bytes[b];
      h *= 0x100000001b3ULL;
    }
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int k = 15; k >= 0; --k, h >>= 4) out[static_cast<std::size_t>(k)] = kHex[h & 0xf];
  return out;
}

}  // namespace gpgp
