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

// Binary GP classification with the logistic link, p(y | g) = sigma(y g),
// fitted by the Laplace approximation.
//
// Training points carry win/loss counts instead of a single label so that
// repeated observations of the same input add likelihood terms without
// adding Gram columns. A point with w wins and l losses contributes
//   w log sigma(f) + l log sigma(-f)
// to the log likelihood.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gpgp/error.hpp"
#include "gpgp/kernels.hpp"

namespace gpgp {

inline double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// log sigma(t) without overflow.
inline double log_logistic(double t) {
  if (t >= 0.0) return -std::log1p(std::exp(-t));
  return t - std::log1p(std::exp(t));
}

struct TrainingSet {
  Eigen::MatrixXd gram;    // m x m prior covariance of the latent values
  Eigen::VectorXd wins;    // count of y = +1 observations per point
  Eigen::VectorXd losses;  // count of y = -1 observations per point

  std::size_t size() const { return static_cast<std::size_t>(gram.rows()); }

  // One observation per point.
  static TrainingSet from_labels(Eigen::MatrixXd gram, std::span<const int> labels) {
    TrainingSet ts;
    ts.gram = std::move(gram);
    const auto m = static_cast<Eigen::Index>(labels.size());
    ts.wins = Eigen::VectorXd::Zero(m);
    ts.losses = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const int y = labels[static_cast<std::size_t>(i)];
      if (y == 1)
        ts.wins(i) = 1.0;
      else if (y == -1)
        ts.losses(i) = 1.0;
      else
        throw InputError("label must be +1 or -1, got " + std::to_string(y));
    }
    ts.validate();
    return ts;
  }

  void validate() const {
    if (gram.rows() != gram.cols()) throw InputError("training Gram must be square");
    if (wins.size() != gram.rows() || losses.size() != gram.rows())
      throw InputError("training counts do not match Gram size");
    if (gram.rows() == 0) throw InputError("empty training set");
    if ((wins.array() < 0.0).any() || (losses.array() < 0.0).any())
      throw InputError("observation counts must be non-negative");
    if (!gram.allFinite()) throw InputError("training Gram has non-finite entries");
  }
};

inline double log_likelihood(const TrainingSet& ts, const Eigen::VectorXd& f) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (ts.wins(i) > 0.0) s += ts.wins(i) * log_logistic(f(i));
    if (ts.losses(i) > 0.0) s += ts.losses(i) * log_logistic(-f(i));
  }
  return s;
}

inline Eigen::VectorXd log_likelihood_gradient(const TrainingSet& ts, const Eigen::VectorXd& f) {
  Eigen::VectorXd g(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i)
    g(i) = ts.wins(i) * logistic(-f(i)) - ts.losses(i) * logistic(f(i));
  return g;
}

// Diagonal of the negative Hessian of the log likelihood.
inline Eigen::VectorXd likelihood_curvature(const TrainingSet& ts, const Eigen::VectorXd& f) {
  Eigen::VectorXd w(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i)
    w(i) = (ts.wins(i) + ts.losses(i)) * logistic(f(i)) * logistic(-f(i));
  return w;
}

struct LaplaceOptions {
  int max_iter = 100;
  double tol = 1e-6;  // sup-norm of the log-posterior gradient
  int max_halvings = 20;
};

struct LatentPrediction {
  double mean = 0.0;
  double variance = 0.0;
  bool clamped = false;  // variance came out negative and was set to 0
};

// Laplace posterior. Immutable after laplace_fit returns; safe to share
// across threads for prediction.
class PosteriorState {
 public:
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::VectorXd& mode() const { return mode_; }
  // K^{-1} f at the mode, maintained alongside f during Newton.
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::VectorXd& grad_loglik() const { return grad_loglik_; }
  const Eigen::VectorXd& sqrt_w() const { return sqrt_w_; }
  const Eigen::VectorXd& wins() const { return wins_; }
  const Eigen::VectorXd& losses() const { return losses_; }
  int iterations() const { return iterations_; }
  double grad_norm() const { return grad_norm_; }
  double log_lik() const { return log_lik_; }
  // Penalized log posterior after each accepted Newton step (index 0 is the
  // starting point f = 0).
  const std::vector<double>& objective_trace() const { return objective_trace_; }
  std::size_t size() const { return static_cast<std::size_t>(mode_.size()); }

  // Solves (I + W^{1/2} K W^{1/2}) x = rhs.
  Eigen::VectorXd solve_b(const Eigen::VectorXd& rhs) const { return b_chol_.solve(rhs); }

  // sum log diag(L_B) = 1/2 log det(I + W^{1/2} K W^{1/2})
  double half_log_det_b() const {
    return b_chol_.matrixLLT().diagonal().array().log().sum();
  }

  LatentPrediction predict(const Eigen::Ref<const Eigen::VectorXd>& k_star, double k_ss) const {
    if (k_star.size() != mode_.size())
      throw InputError("predict_latent: cross-covariance has length " +
                       std::to_string(k_star.size()) + ", expected " +
                       std::to_string(mode_.size()));
    if (!(k_ss >= 0.0)) throw InputError("predict_latent: prior variance must be >= 0");
    LatentPrediction out;
    out.mean = k_star.dot(grad_loglik_);
    const Eigen::VectorXd v =
        b_chol_.matrixL().solve(sqrt_w_.cwiseProduct(k_star));
    out.variance = k_ss - v.squaredNorm();
    if (out.variance < 0.0) {
      out.variance = 0.0;
      out.clamped = true;
    }
    return out;
  }

 private:
  friend PosteriorState laplace_fit(const TrainingSet&, const LaplaceOptions&);

  Eigen::MatrixXd gram_;
  Eigen::VectorXd mode_, alpha_, grad_loglik_, sqrt_w_, wins_, losses_;
  Eigen::LLT<Eigen::MatrixXd> b_chol_;
  int iterations_ = 0;
  double grad_norm_ = 0.0;
  double log_lik_ = 0.0;
  std::vector<double> objective_trace_;
};

namespace detail {

inline Eigen::LLT<Eigen::MatrixXd> factor_b(const Eigen::MatrixXd& k, const Eigen::VectorXd& sw) {
  Eigen::MatrixXd b = sw.asDiagonal() * k * sw.asDiagonal();
  b.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success)
    throw NumericalError("Cholesky of I + W^1/2 K W^1/2 failed");
  return llt;
}

inline double penalized_objective(const TrainingSet& ts, const Eigen::VectorXd& f,
                                  const Eigen::VectorXd& a) {
  return log_likelihood(ts, f) - 0.5 * a.dot(f);
}

}  // namespace detail

// Checks the jittered Gram is PSD to within rounding.
inline void check_psd(const Eigen::MatrixXd& k) {
  const auto m = static_cast<double>(k.rows());
  const double scale = std::max(k.diagonal().cwiseAbs().sum() / m, 1e-300);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(k);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < -1e-8 * scale)
    throw NumericalError("training Gram is not positive semi-definite after jitter");
}

// Newton iteration on  log p(y|f) - 1/2 f^T K^{-1} f  in the parametrization
// f = K a, with B = I + W^{1/2} K W^{1/2} factorized at every step.
// The objective is concave so the mode is unique; step halving keeps it
// non-decreasing.
inline PosteriorState laplace_fit(const TrainingSet& ts, const LaplaceOptions& opts = {}) {
  ts.validate();
  if (!(opts.tol > 0.0)) throw InputError("laplace_fit: tol must be positive");
  if (opts.max_iter < 1) throw InputError("laplace_fit: max_iter must be >= 1");

  const Eigen::MatrixXd k = add_jitter(ts.gram);
  check_psd(k);
  const auto m = k.rows();

  Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
  double psi = detail::penalized_objective(ts, f, a);

  PosteriorState ps;
  ps.objective_trace_.push_back(psi);
  int iter = 0;
  double gnorm = 0.0;
  for (;; ++iter) {
    const Eigen::VectorXd g = log_likelihood_gradient(ts, f);
    gnorm = (g - a).cwiseAbs().maxCoeff();
    if (gnorm <= opts.tol) break;
    if (iter >= opts.max_iter)
      throw ConvergenceError("Laplace Newton iteration did not converge in " +
                                 std::to_string(opts.max_iter) + " iterations (gradient " +
                                 std::to_string(gnorm) + ")",
                             f, gnorm);

    const Eigen::VectorXd w = likelihood_curvature(ts, f);
    const Eigen::VectorXd sw = w.cwiseSqrt();
    const auto llt = detail::factor_b(k, sw);
    const Eigen::VectorXd b = w.cwiseProduct(f) + g;
    const Eigen::VectorXd a_newton = b - sw.cwiseProduct(llt.solve(sw.cwiseProduct(k * b)));
    const Eigen::VectorXd dir = a_newton - a;

    double t = 1.0;
    Eigen::VectorXd a_next = a + dir;
    Eigen::VectorXd f_next = k * a_next;
    double psi_next = detail::penalized_objective(ts, f_next, a_next);
    for (int h = 0; h < opts.max_halvings && !(psi_next >= psi); ++h) {
      t *= 0.5;
      a_next = a + t * dir;
      f_next = k * a_next;
      psi_next = detail::penalized_objective(ts, f_next, a_next);
    }
    if (!(psi_next >= psi)) {
      // No ascent available at this precision; the iterate is the mode up to
      // rounding unless the gradient says otherwise.
      if (gnorm <= std::sqrt(opts.tol)) break;
      throw ConvergenceError("Laplace line search failed to make progress", f, gnorm);
    }
    a = std::move(a_next);
    f = std::move(f_next);
    psi = psi_next;
    ps.objective_trace_.push_back(psi);
  }

  const Eigen::VectorXd w = likelihood_curvature(ts, f);
  ps.sqrt_w_ = w.cwiseSqrt();
  ps.b_chol_ = detail::factor_b(k, ps.sqrt_w_);
  ps.grad_loglik_ = log_likelihood_gradient(ts, f);
  ps.log_lik_ = log_likelihood(ts, f);
  ps.gram_ = k;
  ps.mode_ = std::move(f);
  ps.alpha_ = std::move(a);
  ps.wins_ = ts.wins;
  ps.losses_ = ts.losses;
  ps.iterations_ = iter;
  ps.grad_norm_ = gnorm;
  return ps;
}

inline LatentPrediction predict_latent(const PosteriorState& ps,
                                       const Eigen::Ref<const Eigen::VectorXd>& k_star,
                                       double k_ss) {
  return ps.predict(k_star, k_ss);
}

// 20-point Gauss-Hermite rule for weight exp(-x^2), from the Golub-Welsch
// eigenproblem. Nodes and weights are symmetrized so that the rule is
// exactly odd-symmetric.
struct GaussHermite {
  static constexpr int kNodes = 20;
  std::array<double, kNodes> nodes{};
  std::array<double, kNodes> weights{};

  static const GaussHermite& instance() {
    static const GaussHermite rule = [] {
      Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(kNodes, kNodes);
      for (int i = 1; i < kNodes; ++i) jac(i, i - 1) = jac(i - 1, i) = std::sqrt(i / 2.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
      GaussHermite r;
      const double sqrt_pi = std::sqrt(std::numbers::pi);
      for (int i = 0; i < kNodes; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        r.nodes[i] = es.eigenvalues()(i);
        r.weights[i] = sqrt_pi * v0 * v0;
      }
      for (int i = 0; i < kNodes / 2; ++i) {
        const int j = kNodes - 1 - i;
        const double x = 0.5 * (r.nodes[j] - r.nodes[i]);
        const double w = 0.5 * (r.weights[i] + r.weights[j]);
        r.nodes[i] = -x;
        r.nodes[j] = x;
        r.weights[i] = r.weights[j] = w;
      }
      return r;
    }();
    return rule;
  }
};

// E[sigma(t)] for t ~ N(mean, variance), with sigma(t) = (1 + tanh(t/2))/2.
// Nodes are summed in +-x pairs so that the odd part cancels exactly:
// predict_prob(0, v) is exactly 1/2.
inline double predict_prob(double mean, double variance) {
  if (!(variance >= 0.0)) throw InputError("predict_prob: variance must be >= 0");
  if (variance == 0.0) return logistic(mean);
  const auto& gh = GaussHermite::instance();
  const double scale = std::sqrt(2.0 * variance);
  double odd = 0.0, wsum = 0.0;
  for (int i = 0; i < GaussHermite::kNodes / 2; ++i) {
    const int j = GaussHermite::kNodes - 1 - i;
    const double a = scale * gh.nodes[j];
    odd += gh.weights[j] * (std::tanh(0.5 * (mean + a)) + std::tanh(0.5 * (mean - a)));
    wsum += 2.0 * gh.weights[j];
  }
  return 0.5 + 0.5 * odd / wsum;
}

// Laplace approximation to log p(y | K):
//   log p(y|f) - 1/2 f^T K^{-1} f - 1/2 log det(I + W^{1/2} K W^{1/2})
inline double log_marginal_laplace(const PosteriorState& ps, const TrainingSet& ts) {
  if (ts.size() != ps.size())
    throw InputError("log_marginal_laplace: training set does not match posterior");
  return log_likelihood(ts, ps.mode()) - 0.5 * ps.alpha().dot(ps.mode()) - ps.half_log_det_b();
}

// Median Euclidean distance over all row pairs. Returns 1 when there are
// fewer than two distinct rows.
inline double median_pairwise_distance(const Eigen::MatrixXd& x) {
  std::vector<double> d;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = i + 1; j < x.rows(); ++j) d.push_back((x.row(i) - x.row(j)).norm());
  if (d.empty()) return 1.0;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double med = *mid;
  if (d.size() % 2 == 0) med = 0.5 * (med + *std::max_element(d.begin(), mid));
  return med > 0.0 ? med : 1.0;
}

// `points` log-spaced values from lo*scale to hi*scale.
inline std::vector<double> log_spaced_grid(double scale, double lo = 0.1, double hi = 10.0,
                                           int points = 10) {
  if (!(scale > 0.0) || !(lo > 0.0) || !(hi >= lo) || points < 1)
    throw InputError("invalid lengthscale grid bounds");
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(points));
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    g.push_back(scale * std::pow(10.0, llo + t * (lhi - llo)));
  }
  return g;
}

struct LengthscaleSelection {
  double lengthscale = 0.0;
  std::size_t index = 0;
  std::vector<std::optional<double>> scores;  // nullopt where the fit failed
  std::vector<std::string> failures;
  PosteriorState posterior;
  TrainingSet training;
};

// Fits the Laplace posterior for every lengthscale in the grid and keeps
// the one with the largest approximate evidence. Ties go to the larger
// lengthscale, and among equal lengthscales to the later index.
inline LengthscaleSelection select_lengthscale(
    const std::function<TrainingSet(double)>& make_training_set, std::span<const double> grid,
    const LaplaceOptions& opts = {}) {
  if (grid.empty()) throw InputError("select_lengthscale: empty grid");
  for (double g : grid)
    if (!(g > 0.0)) throw InputError("select_lengthscale: grid values must be positive");

  LengthscaleSelection out;
  std::optional<std::size_t> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      TrainingSet ts = make_training_set(grid[i]);
      PosteriorState ps = laplace_fit(ts, opts);
      const double score = log_marginal_laplace(ps, ts);
      out.scores.emplace_back(score);
      const bool better = !best || score > best_score ||
                          (score == best_score && grid[i] >= grid[*best]);
      if (better) {
        best = i;
        best_score = score;
        out.posterior = std::move(ps);
        out.training = std::move(ts);
      }
    } catch (const Error& e) {
      out.scores.emplace_back(std::nullopt);
      out.failures.push_back("lengthscale " + std::to_string(grid[i]) + ": " + e.what());
    }
  }
  if (!best) {
    std::string msg = "select_lengthscale: every grid fit failed";
    for (const auto& f : out.failures) msg += "; " + f;
    throw NumericalError(msg);
  }
  out.index = *best;
  out.lengthscale = grid[*best];
  return out;
}

}  // namespace gpgp
