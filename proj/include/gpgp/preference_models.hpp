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

// GPGP, PGP, PAIR-GP and PAIR-LOGREG behind one fit / predict interface.
//
//   GPGP         GP classifier on edges with the generalised preferential
//                kernel kE.
//   PGP          GP classifier on edges with the preference kernel k0
//                (equivalent to a GP utility on items).
//   PAIR-GP      RBF GP classifier on concatenated covariates [x_i, x_j],
//                trained on both orientations of every duel.
//   PAIR-LOGREG  L2-regularized logistic regression on the same doubled
//                data, no intercept.
//
// Both PAIR kinds are made skew-symmetric at prediction time by averaging
//   p(i beats j) = 1/2 p_cat(+1 | [x_i, x_j]) + 1/2 p_cat(-1 | [x_j, x_i]).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gpgp/dataset.hpp"
#include "gpgp/error.hpp"
#include "gpgp/gp_classifier.hpp"
#include "gpgp/kernels.hpp"

namespace gpgp {

enum class ModelKind { GPGP, PGP, PairGP, PairLogReg };

inline constexpr ModelKind kAllModels[] = {ModelKind::GPGP, ModelKind::PGP, ModelKind::PairGP,
                                           ModelKind::PairLogReg};

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::GPGP: return "gpgp";
    case ModelKind::PGP: return "pgp";
    case ModelKind::PairGP: return "pair-gp";
    case ModelKind::PairLogReg: return "pair-logreg";
  }
  return "?";
}

inline ModelKind parse_model_kind(std::string_view s) {
  for (ModelKind k : kAllModels)
    if (to_string(k) == s) return k;
  if (s == "pairgp") return ModelKind::PairGP;
  if (s == "pairlogreg") return ModelKind::PairLogReg;
  throw InputError("unknown model '" + std::string(s) +
                   "' (expected gpgp, pgp, pair-gp or pair-logreg)");
}

inline bool is_gp_kind(ModelKind k) { return k != ModelKind::PairLogReg; }

struct FitOptions {
  LaplaceOptions laplace;
  // Lengthscale grid, as multiples of the median pairwise input distance.
  double grid_lo = 0.1;
  double grid_hi = 10.0;
  int grid_points = 10;
  // Skips grid selection when set (absolute lengthscale).
  std::optional<double> lengthscale;
  double logreg_lambda = 1e-4;
  int logreg_max_iter = 200;
  double logreg_tol = 1e-8;
};

struct ProbPrediction {
  double prob = 0.5;
  bool variance_clamped = false;
};

class FittedPreferenceModel {
 public:
  ModelKind kind() const { return kind_; }
  std::size_t num_items() const { return static_cast<std::size_t>(x_.rows()); }
  // Standardized covariates the model was fitted on.
  const Eigen::MatrixXd& covariates() const { return x_; }
  double lengthscale() const { return lengthscale_; }
  const std::vector<double>& lengthscale_grid() const { return grid_; }
  const std::vector<std::optional<double>>& grid_scores() const { return grid_scores_; }
  // Unique training edges (GPGP/PGP: unordered, smaller index first;
  // PAIR-GP: ordered, both orientations).
  const std::vector<EdgePair>& training_edges() const { return edges_; }
  const std::optional<PosteriorState>& posterior() const { return posterior_; }
  const Eigen::VectorXd& logreg_weights() const { return weights_; }
  int logreg_iterations() const { return logreg_iterations_; }

  // Log likelihood of the training duels at the fitted latent values.
  double training_log_likelihood() const {
    if (posterior_) return posterior_->log_lik();
    return logreg_loglik_;
  }

  ProbPrediction predict_pair_detailed(std::size_t i, std::size_t j) const {
    check_pair(i, j);
    switch (kind_) {
      case ModelKind::GPGP:
      case ModelKind::PGP: {
        const std::size_t a = std::min(i, j), b = std::max(i, j);
        const LatentPrediction lp = edge_latent(a, b);
        const double p = predict_prob(lp.mean, lp.variance);
        return {i == a ? p : 1.0 - p, lp.clamped};
      }
      case ModelKind::PairGP: {
        const LatentPrediction fwd = concat_latent(i, j);
        const LatentPrediction bwd = concat_latent(j, i);
        const double p_fwd = predict_prob(fwd.mean, fwd.variance);
        const double p_bwd = predict_prob(bwd.mean, bwd.variance);
        return {symmetrized(p_fwd, p_bwd), fwd.clamped || bwd.clamped};
      }
      case ModelKind::PairLogReg: {
        const double p_fwd = logistic(weights_.dot(concat(i, j)));
        const double p_bwd = logistic(weights_.dot(concat(j, i)));
        return {symmetrized(p_fwd, p_bwd), false};
      }
    }
    return {};
  }

  // P(item i beats item j).
  double predict_pair(std::size_t i, std::size_t j) const {
    return predict_pair_detailed(i, j).prob;
  }

  // Averages a concatenation classifier's outputs on both orderings.
  static double symmetrized(double p_cat_fwd_win, double p_cat_bwd_win) {
    return 0.5 * p_cat_fwd_win + 0.5 * (1.0 - p_cat_bwd_win);
  }

  // Predictive latent mean of g on all ordered pairs. Skew-symmetric with a
  // zero diagonal by construction.
  Eigen::MatrixXd predict_matrix() const {
    if (kind_ == ModelKind::PairLogReg)
      throw UnsupportedOperationError("predict_matrix: pair-logreg defines no latent preference");
    const auto n = x_.rows();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const auto a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(j);
        double v = 0.0;
        if (kind_ == ModelKind::PairGP)
          v = 0.5 * (concat_latent(a, b).mean - concat_latent(b, a).mean);
        else
          v = edge_latent(a, b).mean;
        g(i, j) = v;
        g(j, i) = -v;
      }
    return g;
  }

 private:
  friend FittedPreferenceModel fit(const PreferenceDataset&, ModelKind, const FitOptions&);

  void check_pair(std::size_t i, std::size_t j) const {
    const auto n = num_items();
    if (i >= n || j >= n) throw InputError("predict_pair: item index out of range");
    if (i == j) throw InputError("predict_pair: an item cannot duel itself");
  }

  EdgeKernel edge_kind() const { return kind_ == ModelKind::GPGP ? EdgeKernel::KE : EdgeKernel::K0; }

  LatentPrediction edge_latent(std::size_t a, std::size_t b) const {
    const EdgePair target{a, b};
    const auto m = static_cast<Eigen::Index>(edges_.size());
    Eigen::VectorXd k_star(m);
    for (Eigen::Index t = 0; t < m; ++t)
      k_star(t) = edge_kernel(item_gram_, edges_[static_cast<std::size_t>(t)], target, edge_kind());
    const double k_ss = std::max(0.0, edge_kernel(item_gram_, target, target, edge_kind()));
    return posterior_->predict(k_star, k_ss);
  }

  Eigen::VectorXd concat(std::size_t i, std::size_t j) const {
    Eigen::VectorXd z(2 * x_.cols());
    z << x_.row(static_cast<Eigen::Index>(i)).transpose(),
        x_.row(static_cast<Eigen::Index>(j)).transpose();
    return z;
  }

  LatentPrediction concat_latent(std::size_t i, std::size_t j) const {
    const Eigen::VectorXd z = concat(i, j);
    const auto m = concat_inputs_.rows();
    const double inv = 1.0 / (2.0 * lengthscale_ * lengthscale_);
    Eigen::VectorXd k_star(m);
    for (Eigen::Index t = 0; t < m; ++t)
      k_star(t) = std::exp(-(concat_inputs_.row(t).transpose() - z).squaredNorm() * inv);
    return posterior_->predict(k_star, 1.0);
  }

  ModelKind kind_ = ModelKind::GPGP;
  Eigen::MatrixXd x_;
  double lengthscale_ = 0.0;
  std::vector<double> grid_;
  std::vector<std::optional<double>> grid_scores_;
  std::vector<EdgePair> edges_;
  Eigen::MatrixXd item_gram_;
  Eigen::MatrixXd concat_inputs_;
  std::optional<PosteriorState> posterior_;
  Eigen::VectorXd weights_;
  int logreg_iterations_ = 0;
  double logreg_loglik_ = 0.0;
};

namespace detail {

// Unique training points with win/loss counts.
struct EdgeRegistry {
  std::vector<EdgePair> edges;
  std::vector<double> wins, losses;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;

  void add(EdgePair e, int y) {
    auto [it, inserted] = index.try_emplace({e.first, e.second}, edges.size());
    if (inserted) {
      edges.push_back(e);
      wins.push_back(0.0);
      losses.push_back(0.0);
    }
    (y > 0 ? wins : losses)[it->second] += 1.0;
  }

  TrainingSet training_set(Eigen::MatrixXd gram) const {
    TrainingSet ts;
    ts.gram = std::move(gram);
    ts.wins = Eigen::Map<const Eigen::VectorXd>(wins.data(), static_cast<Eigen::Index>(wins.size()));
    ts.losses =
        Eigen::Map<const Eigen::VectorXd>(losses.data(), static_cast<Eigen::Index>(losses.size()));
    return ts;
  }
};

struct LogRegFit {
  Eigen::VectorXd w;
  int iterations = 0;
  double loglik = 0.0;
};

// Maximizes sum_r log sigma(y_r w^T z_r) - lambda/2 |w|^2 by Newton's method
// with step halving. Strictly concave for lambda > 0.
inline LogRegFit fit_logreg(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double lambda,
                            int max_iter, double tol) {
  const auto d = z.cols();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  auto objective = [&](const Eigen::VectorXd& v) {
    const Eigen::VectorXd s = z * v;
    double o = -0.5 * lambda * v.squaredNorm();
    for (Eigen::Index r = 0; r < s.size(); ++r) o += log_logistic(y(r) * s(r));
    return o;
  };
  double obj = objective(w);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd s = z * w;
    Eigen::VectorXd resid(s.size()), curv(s.size());
    for (Eigen::Index r = 0; r < s.size(); ++r) {
      resid(r) = y(r) * logistic(-y(r) * s(r));
      curv(r) = logistic(s(r)) * logistic(-s(r));
    }
    const Eigen::VectorXd grad = z.transpose() * resid - lambda * w;
    if (grad.cwiseAbs().maxCoeff() <= tol) return {w, it, objective(w) + 0.5 * lambda * w.squaredNorm()};
    Eigen::MatrixXd h = z.transpose() * curv.asDiagonal() * z;
    h.diagonal().array() += lambda;
    const Eigen::VectorXd step = h.llt().solve(grad);
    double t = 1.0;
    Eigen::VectorXd next = w + step;
    double next_obj = objective(next);
    for (int k = 0; k < 30 && !(next_obj >= obj); ++k) {
      t *= 0.5;
      next = w + t * step;
      next_obj = objective(next);
    }
    if (!(next_obj >= obj)) break;
    const bool stalled = next_obj - obj <= 1e-15 * std::max(1.0, std::abs(obj));
    w = std::move(next);
    obj = next_obj;
    if (stalled) return {w, it + 1, obj + 0.5 * lambda * w.squaredNorm()};
  }
  const Eigen::VectorXd s = z * w;
  Eigen::VectorXd resid(s.size());
  for (Eigen::Index r = 0; r < s.size(); ++r) resid(r) = y(r) * logistic(-y(r) * s(r));
  const double gnorm = (z.transpose() * resid - lambda * w).cwiseAbs().maxCoeff();
  if (gnorm > std::sqrt(tol))
    throw ConvergenceError("logistic regression did not converge", w, gnorm);
  return {w, max_iter, obj + 0.5 * lambda * w.squaredNorm()};
}

}  // namespace detail

inline FittedPreferenceModel fit(const PreferenceDataset& ds, ModelKind kind,
                                 const FitOptions& opts = {}) {
  validate(ds);
  if (ds.duels.empty()) throw InputError("fit: dataset has no duels");

  FittedPreferenceModel model;
  model.kind_ = kind;
  model.x_ = standardize(ds.items.covariates);
  const Eigen::MatrixXd& x = model.x_;
  const auto p = x.cols();

  auto grid_for = [&](const Eigen::MatrixXd& inputs) {
    if (opts.lengthscale) return std::vector<double>{*opts.lengthscale};
    return log_spaced_grid(median_pairwise_distance(inputs), opts.grid_lo, opts.grid_hi,
                           opts.grid_points);
  };

  switch (kind) {
    case ModelKind::GPGP:
    case ModelKind::PGP: {
      detail::EdgeRegistry reg;
      for (const Duel& d : ds.duels) {
        const auto [a, b] = unordered_key(d.first, d.second);
        reg.add({a, b}, d.first == a ? d.y : -d.y);
      }
      const EdgeKernel ek = kind == ModelKind::GPGP ? EdgeKernel::KE : EdgeKernel::K0;
      model.grid_ = grid_for(x);
      auto sel = select_lengthscale(
          [&](double ls) {
            return reg.training_set(edge_gram_from_items(reg.edges, base_gram(x, KernelConfig::rbf(ls)), ek));
          },
          model.grid_, opts.laplace);
      model.lengthscale_ = sel.lengthscale;
      model.grid_scores_ = std::move(sel.scores);
      model.posterior_ = std::move(sel.posterior);
      model.edges_ = std::move(reg.edges);
      model.item_gram_ = base_gram(x, KernelConfig::rbf(model.lengthscale_));
      break;
    }
    case ModelKind::PairGP: {
      detail::EdgeRegistry reg;
      for (const Duel& d : ds.duels) {
        reg.add({d.first, d.second}, d.y);
        reg.add({d.second, d.first}, -d.y);
      }
      Eigen::MatrixXd z(static_cast<Eigen::Index>(reg.edges.size()), 2 * p);
      for (std::size_t r = 0; r < reg.edges.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        z.row(row).head(p) = x.row(static_cast<Eigen::Index>(reg.edges[r].first));
        z.row(row).tail(p) = x.row(static_cast<Eigen::Index>(reg.edges[r].second));
      }
      model.grid_ = grid_for(z);
      auto sel = select_lengthscale(
          [&](double ls) { return reg.training_set(base_gram(z, KernelConfig::rbf(ls))); },
          model.grid_, opts.laplace);
      model.lengthscale_ = sel.lengthscale;
      model.grid_scores_ = std::move(sel.scores);
      model.posterior_ = std::move(sel.posterior);
      model.edges_ = std::move(reg.edges);
      model.concat_inputs_ = std::move(z);
      break;
    }
    case ModelKind::PairLogReg: {
      const auto m = static_cast<Eigen::Index>(ds.duels.size());
      Eigen::MatrixXd z(2 * m, 2 * p);
      Eigen::VectorXd y(2 * m);
      for (Eigen::Index r = 0; r < m; ++r) {
        const Duel& d = ds.duels[static_cast<std::size_t>(r)];
        const auto i = static_cast<Eigen::Index>(d.first), j = static_cast<Eigen::Index>(d.second);
        z.row(2 * r) << x.row(i), x.row(j);
        z.row(2 * r + 1) << x.row(j), x.row(i);
        y(2 * r) = d.y;
        y(2 * r + 1) = -d.y;
      }
      auto lr = detail::fit_logreg(z, y, opts.logreg_lambda, opts.logreg_max_iter, opts.logreg_tol);
      model.weights_ = std::move(lr.w);
      model.logreg_iterations_ = lr.iterations;
      model.logreg_loglik_ = lr.loglik;
      break;
    }
  }
  return model;
}

// Fraction of duels whose predicted winner matches the observed winner.
// A prediction of exactly 1/2 picks the lower item index as the winner, so
// the score does not depend on how a duel is oriented.
inline bool predicts_first_wins(const FittedPreferenceModel& model, std::size_t i, std::size_t j) {
  const double p = model.predict_pair(i, j);
  if (p > 0.5) return true;
  if (p < 0.5) return false;
  return i < j;
}

}  // namespace gpgp
