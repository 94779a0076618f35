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

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gpgp/clustering.hpp"
#include "gpgp/synthetic.hpp"
#include "oracles.hpp"

namespace gpgp {
namespace {

struct BlockInstance {
  std::vector<int> labels;
  Eigen::MatrixXd g;
};

BlockInstance block_instance(int num_clusters, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  BlockInstance b;
  b.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) b.labels[static_cast<std::size_t>(i)] = 1 + i % num_clusters;
  std::shuffle(b.labels.begin(), b.labels.end(), rng);
  std::normal_distribution<double> nd;
  Eigen::VectorXd f(n);
  for (int i = 0; i < n; ++i) f(i) = nd(rng);
  b.g = oracle::block_preference_matrix(b.labels, f);
  return b;
}

TEST(GpgpClus, RecoversExactBlockPartition) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto b = block_instance(2, 20, seed);
    const auto r = gpgp_clus(PreferenceMatrix{b.g, {}}, 2, seed);
    EXPECT_EQ(proportion_correct(r, b.labels), 1.0);
    EXPECT_EQ(r.embedding.cols(), 4);
    EXPECT_EQ(r.singular_values.size(), 4);
    EXPECT_EQ(r.method, "gpgp-clus");
  }
}

TEST(GpgpClus, BlockMatrixHasRankTwoL) {
  for (int l : {1, 2, 3, 4}) {
    const auto b = block_instance(l, 20, 7);
    EXPECT_LE(oracle::numerical_rank(b.g), static_cast<std::size_t>(2 * l));
    EXPECT_TRUE((PreferenceMatrix{b.g, {}}).is_skew_symmetric());
  }
}

TEST(GpgpClus, SingleClusterAssignsEveryone) {
  const auto b = block_instance(1, 10, 3);
  const auto r = gpgp_clus(PreferenceMatrix{b.g, {}}, 1, 0);
  for (int a : r.assignment) EXPECT_EQ(a, 1);
}

TEST(GpgpClus, SingleClusterSingularVectorOrdersUtility) {
  // With one cluster, G = f 1^T - 1 f^T; the component of the top singular
  // pair orthogonal to the constant vector orders the items as f does.
  const int n = 12;
  Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(n, -1.0, 2.0).array().cube();
  const Eigen::MatrixXd g = oracle::block_preference_matrix(std::vector<int>(n, 1), f);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU);
  Eigen::MatrixXd u = svd.matrixU().leftCols(2);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  const Eigen::VectorXd coef = u.transpose() * ones;
  Eigen::Vector2d perp(-coef(1), coef(0));
  Eigen::VectorXd score = u * perp;
  if (score(n - 1) < score(0)) score = -score;
  for (int i = 1; i < n; ++i) EXPECT_GT(score(i), score(i - 1));
}

TEST(GpgpClus, EquivariantUnderPermutation) {
  const auto b = block_instance(2, 16, 4);
  std::vector<int> perm(16);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd gp(16, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) gp(i, j) = b.g(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  const auto r1 = gpgp_clus(PreferenceMatrix{b.g, {}}, 2, 5);
  const auto r2 = gpgp_clus(PreferenceMatrix{gp, {}}, 2, 5);
  std::vector<int> mapped(16);
  for (int i = 0; i < 16; ++i) mapped[static_cast<std::size_t>(i)] = r1.assignment[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
  EXPECT_EQ(proportion_correct(r2.assignment, mapped), 1.0);
}

TEST(GpgpClus, DeterministicForSeed) {
  const auto b = block_instance(3, 20, 9);
  Eigen::MatrixXd noisy = b.g;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd(0.0, 0.5);
  for (int i = 0; i < 20; ++i)
    for (int j = i + 1; j < 20; ++j) {
      const double e = nd(rng);
      noisy(i, j) += e;
      noisy(j, i) -= e;
    }
  const auto a = gpgp_clus(PreferenceMatrix{noisy, {}}, 3, 11);
  const auto c = gpgp_clus(PreferenceMatrix{noisy, {}}, 3, 11);
  EXPECT_EQ(a.assignment, c.assignment);
}

TEST(GpgpClus, ValidatesClusterCount) {
  const auto b = block_instance(2, 6, 1);
  EXPECT_THROW(gpgp_clus(PreferenceMatrix{b.g, {}}, 4, 0), InputError);
  EXPECT_THROW(gpgp_clus(PreferenceMatrix{b.g, {}}, 0, 0), InputError);
  EXPECT_THROW(gpgp_clus(PreferenceMatrix{Eigen::MatrixXd::Zero(6, 6), {}}, 2, 0),
               DegenerateInputError);
}

TEST(GpgpClus, ScaledEmbeddingIsRecorded) {
  const auto b = block_instance(2, 12, 2);
  const auto r = gpgp_clus(PreferenceMatrix{b.g, {}}, 2, 0, true);
  EXPECT_TRUE(r.scaled);
  for (Eigen::Index c = 0; c < r.embedding.cols(); ++c)
    EXPECT_NEAR(r.embedding.col(c).norm(), std::sqrt(r.singular_values(c)), 1e-9);
}

TEST(SvdClus, ComparisonMatrixConstruction) {
  PreferenceDataset ds;
  ds.items.covariates = Eigen::MatrixXd::Zero(3, 1);
  ds.duels = {{0, 2, 1}};
  Eigen::MatrixXd y = comparison_matrix(ds);
  EXPECT_EQ(y(0, 2), 1.0);
  EXPECT_EQ(y(2, 0), -1.0);
  EXPECT_EQ(y.cwiseAbs().sum(), 2.0);
  ds.duels.push_back({2, 0, 1});
  EXPECT_EQ(comparison_matrix(ds).cwiseAbs().sum(), 0.0);
}

TEST(SvdClus, EmptyDuelsAreDegenerate) {
  PreferenceDataset ds;
  ds.items.covariates = Eigen::MatrixXd::Zero(6, 1);
  EXPECT_THROW(svd_clus(ds, 2, 0), DegenerateInputError);
}

// Rows at the two ends of each cluster's ranking sit equidistant from both
// centroids in the sign-matrix embedding, so a few items can swap sides.
TEST(SvdClus, MostlyRecoversFullTournamentFromBlockSigns) {
  const auto b = block_instance(2, 20, 12);
  PreferenceDataset ds;
  ds.items.covariates = Eigen::MatrixXd::Zero(20, 1);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = i + 1; j < 20; ++j) {
      const double v = b.g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v != 0.0) ds.duels.push_back({i, j, v > 0 ? 1 : -1});
    }
  EXPECT_GE(proportion_correct(svd_clus(ds, 2, 0), b.labels), 0.8);
}

TEST(PrClus, ZeroThresholdEqualsSvdClus) {
  SyntheticSpec spec;
  spec.num_states = 2;
  spec.sparsity = 0.5;
  spec.seed = 3;
  const auto inst = generate_clustered(spec);
  const auto a = pr_clus(inst.dataset, 2, 0.0, 17);
  const auto b = svd_clus(inst.dataset, 2, 17);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.method, "pr-clus");
  EXPECT_THROW(pr_clus(inst.dataset, 2, 0.5, 0), InputError);
}

TEST(PrClus, TotalAbstentionIsDegenerate) {
  // Two identical pairs of contradicting duels: PGP predicts 1/2 everywhere.
  PreferenceDataset ds;
  ds.items.covariates = Eigen::MatrixXd::Zero(4, 1);
  ds.items.covariates << 0.0, 1.0, 2.0, 3.0;
  ds.duels = {{0, 1, 1}, {0, 1, -1}, {2, 3, 1}, {2, 3, -1}, {0, 3, 1}};
  EXPECT_THROW(pr_clus(ds, 2, 0.49, 0), DegenerateInputError);
}

TEST(ProportionCorrect, Cases) {
  EXPECT_EQ(proportion_correct({1, 1, 2, 2}, {1, 1, 2, 2}), 1.0);
  EXPECT_EQ(proportion_correct({2, 2, 1, 1}, {1, 1, 2, 2}), 1.0);
  EXPECT_EQ(proportion_correct({1, 1, 2, 2}, {1, 2, 1, 2}), 0.5);
  EXPECT_NEAR(proportion_correct({1, 1, 1, 2, 2, 3}, {3, 3, 3, 1, 1, 1}), 5.0 / 6.0, 1e-15);
  EXPECT_THROW(proportion_correct({1, 2}, {1}), InputError);
}

TEST(ProportionCorrect, InvariantToRelabeling) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> lab(1, 3);
  std::vector<int> a(30), t(30);
  for (auto& v : a) v = lab(rng);
  for (auto& v : t) v = lab(rng);
  const double base = proportion_correct(a, t);
  std::vector<int> relabeled = a;
  for (auto& v : relabeled) v = 4 - v;
  EXPECT_EQ(proportion_correct(relabeled, t), base);
  EXPECT_EQ(proportion_correct(t, a), base);
}

TEST(Hungarian, MatchesBruteForce) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 5;
    Eigen::MatrixXd w(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w(i, j) = u(rng);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = -1.0;
    do {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += w(i, perm[static_cast<std::size_t>(i)]);
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const auto m = hungarian_max(w);
    double got = 0.0;
    for (int i = 0; i < n; ++i) got += w(i, m[static_cast<std::size_t>(i)]);
    EXPECT_NEAR(got, best, 1e-9);
  }
}

}  // namespace
}  // namespace gpgp
