#pragma once

// Mutual information between f and noisy observations, in nats.
//
//   I(f; y_A)       = 1/2 log det(I + K(A, A) / noise)
//   I(f; y_A | y_S) = 1/2 log det(I + K_post(A, A) / noise)
//
// where K_post is the posterior covariance of f at A after observing y_S.
// gamma_T, the best information T observations can give, is approximated by
// greedy uncertainty sampling; greedy is within a factor (1 - 1/e) of optimal
// for this submodular objective, so [G, G e / (e - 1)] brackets gamma_T.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "gpbucb/errors.hpp"
#include "gpbucb/gp_posterior.hpp"
#include "gpbucb/kernel.hpp"
#include "gpbucb/uncertainty_sampling.hpp"

namespace gpbucb {

/// e / (e - 1): the submodular greedy guarantee turned into an upper bracket.
inline constexpr double kGreedyBracket = std::numbers::e / (std::numbers::e - 1.0);

namespace detail {

inline double half_log_det_identity_plus(Eigen::MatrixXd scaled) {
  scaled.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(scaled);
  if (llt.info() != Eigen::Success) throw NumericalError("information gain: factorization of I + K/noise failed");
  return llt.matrixLLT().diagonal().array().log().sum();
}

inline void check_points(const KernelSpec& kernel, const Eigen::MatrixXd& points) {
  if (points.cols() > 0) detail::check_dimension(kernel, points.rows());
}

}  // namespace detail

/// I(f; y_A) for the points stored one per column of `a`.
inline double mutual_information(const KernelSpec& kernel, double noise_variance, const Eigen::MatrixXd& a) {
  if (!(noise_variance > 0.0)) throw InputError("noise variance must be positive");
  detail::check_points(kernel, a);
  if (a.cols() == 0) return 0.0;
  return std::max(0.0, detail::half_log_det_identity_plus(eval_matrix(kernel, a) / noise_variance));
}

/// I(f; y_A | y_S).
inline double conditional_mutual_information(const KernelSpec& kernel, double noise_variance,
                                             const Eigen::MatrixXd& a, const Eigen::MatrixXd& s) {
  if (!(noise_variance > 0.0)) throw InputError("noise variance must be positive");
  detail::check_points(kernel, a);
  detail::check_points(kernel, s);
  if (a.cols() == 0) return 0.0;
  if (s.cols() == 0) return mutual_information(kernel, noise_variance, a);

  Eigen::MatrixXd kss = eval_matrix(kernel, s);
  kss.diagonal().array() += noise_variance;
  Eigen::LLT<Eigen::MatrixXd> llt(kss);
  if (llt.info() != Eigen::Success) throw NumericalError("conditional information: factorization of K_SS failed");

  Eigen::MatrixXd ksa(s.cols(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) ksa.col(j) = eval_vector(kernel, a.col(j), s);
  const Eigen::MatrixXd w = llt.matrixL().solve(ksa);
  Eigen::MatrixXd post = eval_matrix(kernel, a) - w.transpose() * w;
  post = 0.5 * (post + post.transpose()).eval();
  return std::max(0.0, detail::half_log_det_identity_plus(post / noise_variance));
}

struct InfoGainReport {
  /// Greedy picks, as decision indices.
  std::vector<std::size_t> selected;
  /// Decision indices conditioned on before the greedy run.
  std::vector<std::size_t> conditional_on;
  /// Marginal gain of each greedy pick; non-increasing.
  std::vector<double> greedy_curve;
  /// Sum of the curve, a lower bound on gamma.
  double gain = 0.0;

  double upper_bracket() const { return gain * kGreedyBracket; }

  /// Cumulative gains: element t - 1 is the greedy value after t picks.
  std::vector<double> cumulative() const {
    std::vector<double> out(greedy_curve.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < greedy_curve.size(); ++i) out[i] = acc += greedy_curve[i];
    return out;
  }
};

/// Greedy surrogate for gamma_T (or gamma_T^init when `conditioned_on` holds the
/// initialization set).
inline InfoGainReport greedy_gamma(const KernelSpec& kernel, double noise_variance, const DecisionSet& decisions,
                                   std::size_t steps, std::vector<std::size_t> conditioned_on = {}) {
  GpPosterior posterior(kernel, noise_variance);
  for (std::size_t idx : conditioned_on) posterior.hallucinate(decisions.point(idx));
  const auto picks = uncertainty_sampling(posterior, decisions, steps);
  InfoGainReport report;
  report.selected = picks.indices;
  report.conditional_on = std::move(conditioned_on);
  report.greedy_curve.reserve(steps);
  for (double v : picks.variances) {
    report.greedy_curve.push_back(0.5 * std::log1p(v / noise_variance));
    report.gain += report.greedy_curve.back();
  }
  return report;
}

struct Lemma1Check {
  double ratio = 1.0;
  double bound = 1.0;
  bool holds = true;
  /// sigma_{t-1}(x) fell below the floor; ratio is not meaningful.
  bool degenerate = false;
};

/// Compares sigma_fb(x) / sigma_{t-1}(x) with exp(I(f; y_pending | y_real)),
/// where the real points are rounds 1..fb[t] and the pending points rounds
/// fb[t]+1..t-1.
inline Lemma1Check check_lemma1(const KernelSpec& kernel, double noise_variance, const Eigen::MatrixXd& real,
                                const Eigen::MatrixXd& pending, PointRef x) {
  detail::check_points(kernel, real);
  detail::check_points(kernel, pending);
  GpPosterior posterior(kernel, noise_variance);
  for (Eigen::Index i = 0; i < real.cols(); ++i) posterior.hallucinate(real.col(i));
  const double var_fb = posterior.variance(x);
  for (Eigen::Index i = 0; i < pending.cols(); ++i) posterior.hallucinate(pending.col(i));
  const double var_now = posterior.variance(x);

  Lemma1Check out;
  out.bound = std::exp(conditional_mutual_information(kernel, noise_variance, pending, real));
  if (var_now <= 1e-14 * kernel.signal_variance) {
    out.degenerate = true;
    out.ratio = std::numeric_limits<double>::quiet_NaN();
    out.holds = false;
    return out;
  }
  out.ratio = std::sqrt(var_fb / var_now);
  out.holds = out.ratio <= out.bound + 1e-9;
  return out;
}

struct Lemma2Check {
  /// Greedy value of gamma^init_{B-1} after uncertainty-sampling initialization.
  double lhs = 0.0;
  /// Upper bound on the true gamma^init_{B-1}: the smaller of the greedy bracket
  /// and (B - 1) times the best single-point gain (submodularity).
  double lhs_upper = 0.0;
  /// (B - 1) / T^init times the greedy gamma_{T^init}; a lower bound on the
  /// right-hand side since greedy never exceeds the optimum.
  double rhs = 0.0;
  bool holds = false;
};

/// Checks gamma^init_{B-1} <= (B - 1) / T^init * gamma_{T^init} with the
/// conservative bracket directions.
inline Lemma2Check check_lemma2(const KernelSpec& kernel, double noise_variance, const DecisionSet& decisions,
                                std::size_t batch_size, std::size_t init_size) {
  if (init_size == 0) throw InputError("initialized information check needs T^init >= 1");
  if (batch_size < 2) throw InputError("initialized information check needs B >= 2");
  const auto full = greedy_gamma(kernel, noise_variance, decisions, init_size);
  const auto residual = greedy_gamma(kernel, noise_variance, decisions, batch_size - 1, full.selected);
  Lemma2Check out;
  out.lhs = residual.gain;
  const double per_point = static_cast<double>(batch_size - 1) * residual.greedy_curve.front();
  out.lhs_upper = std::min(residual.upper_bracket(), per_point);
  out.rhs = static_cast<double>(batch_size - 1) / static_cast<double>(init_size) * full.gain;
  out.holds = out.lhs_upper <= out.rhs * (1.0 + 1e-12) + 1e-15;
  return out;
}

enum class CBoundMode { raw, initialized };

/// Upper bound C on the conditional information any B - 1 pending observations
/// can add. Raw: greedy gamma_{B-1} upper bracket. Initialized: the post-initialization bound
/// (B - 1) / T^init * gamma_{T^init}, using the upper bracket of gamma_{T^init}.
inline double bound_C(const KernelSpec& kernel, double noise_variance, const DecisionSet& decisions,
                      std::size_t batch_size, CBoundMode mode, std::size_t init_size = 0) {
  if (batch_size == 0) throw InputError("batch size must be at least 1");
  if (batch_size == 1) return 0.0;
  if (mode == CBoundMode::raw) {
    return greedy_gamma(kernel, noise_variance, decisions, batch_size - 1).upper_bracket();
  }
  if (init_size == 0) throw InputError("initialized C bound needs T^init >= 1");
  const auto full = greedy_gamma(kernel, noise_variance, decisions, init_size);
  return static_cast<double>(batch_size - 1) / static_cast<double>(init_size) * full.upper_bracket();
}

}  // namespace gpbucb
