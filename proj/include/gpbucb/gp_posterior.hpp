#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gpbucb/cholesky.hpp"
#include "gpbucb/errors.hpp"
#include "gpbucb/kernel.hpp"

namespace gpbucb {

/// GP posterior over the payoff function with zero prior mean and known noise.
///
/// Two conditioning paths are kept:
///  - the mean path holds real observations (inputs with outcomes) only;
///  - the variance path holds real observations plus hallucinated inputs, i.e.
///    pending decisions whose outcomes have not arrived yet.
/// Both are extended one row at a time. The variance depends only on where
/// observations were made, so hallucinating a point shrinks the variance exactly
/// as a real observation would while leaving the mean untouched.
class GpPosterior {
 public:
  GpPosterior(KernelSpec kernel, double noise_variance)
      : kernel_(std::move(kernel)), noise_variance_(noise_variance) {
    kernel_.validate();
    if (!(noise_variance_ > 0.0) || !std::isfinite(noise_variance_)) {
      throw InputError("noise variance must be positive");
    }
  }

  const KernelSpec& kernel() const { return kernel_; }
  double noise_variance() const { return noise_variance_; }
  std::size_t dimension() const { return kernel_.dimension(); }

  std::size_t observation_count() const { return observed_.size(); }
  std::size_t hallucination_count() const { return hallucinated_.size(); }
  /// Number of points the variance path conditions on.
  std::size_t conditioning_count() const { return variance_inputs_.size(); }

  const std::vector<Eigen::VectorXd>& observed_inputs() const { return observed_; }
  const std::vector<double>& observed_outcomes() const { return outcomes_; }
  const std::vector<Eigen::VectorXd>& hallucinated_inputs() const { return hallucinated_; }

  /// Incremented whenever the mean path changes.
  std::uint64_t mean_revision() const { return mean_revision_; }

  /// Posterior mean given the real observations only.
  double mean(PointRef x) const {
    detail::check_dimension(kernel_, x.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < observed_.size(); ++i) acc += eval(kernel_, x, observed_[i]) * weights_[i];
    return acc;
  }

  /// Posterior variance given real and hallucinated inputs, before clamping.
  double raw_variance(PointRef x) const {
    std::vector<double> column;
    double sq_sum = 0.0;
    extend_variance_column(x, column, sq_sum);
    return eval(kernel_, x, x) - sq_sum;
  }

  /// Posterior variance clamped at zero. A raw value below
  /// -1e-8 * signal_variance raises NumericalError instead of being clamped.
  double variance(PointRef x) const {
    std::vector<double> column;
    double sq_sum = 0.0;
    extend_variance_column(x, column, sq_sum);
    return clamp_variance(eval(kernel_, x, x), sq_sum);
  }

  double stddev(PointRef x) const { return std::sqrt(variance(x)); }

  /// Extends `column` (the forward-substitution solution L^{-1} k(X, x) for a
  /// prefix of the variance path) to the full path and accumulates the squared
  /// entries into `sq_sum`. `variance` uses exactly this routine, so cached and
  /// direct evaluations agree bit-for-bit.
  void extend_variance_column(PointRef x, std::vector<double>& column, double& sq_sum) const {
    detail::check_dimension(kernel_, x.size());
    variance_factor_.extend_forward([&](std::size_t j) { return eval(kernel_, variance_inputs_[j], x); },
                                    column, sq_sum);
  }

  double clamp_variance(double prior, double sq_sum) const {
    const double raw = prior - sq_sum;
    if (raw < -1e-8 * kernel_.signal_variance) {
      std::ostringstream msg;
      msg << "posterior variance " << raw << " is negative beyond roundoff";
      throw NumericalError(msg.str());
    }
    return std::max(raw, 0.0);
  }

  /// Adds a real observation to both paths.
  void condition_on_observation(PointRef x, double y) {
    detail::check_dimension(kernel_, x.size());
    if (!std::isfinite(y)) throw InputError("observation outcome must be finite");
    append_variance(x);
    append_mean(x, y);
    refresh_weights();
  }

  /// Adds x to the variance path only.
  void hallucinate(PointRef x) {
    detail::check_dimension(kernel_, x.size());
    append_variance(x);
    hallucinated_.emplace_back(x);
  }

  /// Turns every hallucinated input into a real observation, in hallucination order.
  void promote_hallucinations(std::span<const double> outcomes) {
    if (outcomes.size() != hallucinated_.size()) {
      throw InputError("promote_hallucinations: got " + std::to_string(outcomes.size()) +
                       " outcomes for " + std::to_string(hallucinated_.size()) + " hallucinated inputs");
    }
    promote_leading_hallucinations(outcomes);
  }

  /// Promotes the oldest `outcomes.size()` hallucinated inputs. The variance
  /// path is unchanged since the conditioning locations stay the same.
  void promote_leading_hallucinations(std::span<const double> outcomes) {
    if (outcomes.size() > hallucinated_.size()) {
      throw InputError("promote: more outcomes than hallucinated inputs");
    }
    if (outcomes.empty()) return;
    for (double y : outcomes) {
      if (!std::isfinite(y)) throw InputError("observation outcome must be finite");
    }
    for (std::size_t i = 0; i < outcomes.size(); ++i) append_mean(hallucinated_[i], outcomes[i]);
    hallucinated_.erase(hallucinated_.begin(), hallucinated_.begin() + static_cast<std::ptrdiff_t>(outcomes.size()));
    refresh_weights();
  }

 private:
  void append_variance(PointRef x) {
    std::vector<double> cross(variance_inputs_.size());
    for (std::size_t j = 0; j < variance_inputs_.size(); ++j) cross[j] = eval(kernel_, variance_inputs_[j], x);
    variance_factor_.append(cross, eval(kernel_, x, x) + noise_variance_, kernel_.signal_variance);
    variance_inputs_.emplace_back(x);
  }

  void append_mean(PointRef x, double y) {
    std::vector<double> cross(observed_.size());
    for (std::size_t j = 0; j < observed_.size(); ++j) cross[j] = eval(kernel_, observed_[j], x);
    mean_factor_.append(cross, eval(kernel_, x, x) + noise_variance_, kernel_.signal_variance);
    observed_.emplace_back(x);
    outcomes_.push_back(y);
  }

  void refresh_weights() {
    weights_ = mean_factor_.solve(outcomes_);
    ++mean_revision_;
  }

  KernelSpec kernel_;
  double noise_variance_;

  std::vector<Eigen::VectorXd> observed_;
  std::vector<double> outcomes_;
  std::vector<Eigen::VectorXd> hallucinated_;
  std::vector<Eigen::VectorXd> variance_inputs_;

  GrowingCholesky mean_factor_;
  GrowingCholesky variance_factor_;
  std::vector<double> weights_;
  std::uint64_t mean_revision_ = 0;
};

/// Per-decision cache of variance-path forward solves. Each column is extended
/// only by the rows added since it was last touched, so refreshing a candidate
/// costs O(t * new rows) rather than O(t^2).
///
/// The cache follows one posterior whose variance path only ever grows.
class VarianceCache {
 public:
  explicit VarianceCache(const DecisionSet& decisions)
      : decisions_(&decisions), columns_(decisions.size()), sq_sums_(decisions.size(), 0.0),
        prior_(decisions.size(), std::numeric_limits<double>::quiet_NaN()) {}

  /// Brings candidate i up to date with `posterior` and returns its clamped variance.
  double variance(const GpPosterior& posterior, std::size_t i) {
    if (std::isnan(prior_[i])) prior_[i] = eval(posterior.kernel(), decisions_->point(i), decisions_->point(i));
    posterior.extend_variance_column(decisions_->point(i), columns_[i], sq_sums_[i]);
    return posterior.clamp_variance(prior_[i], sq_sums_[i]);
  }

  std::size_t size() const { return columns_.size(); }

 private:
  const DecisionSet* decisions_;
  std::vector<std::vector<double>> columns_;
  std::vector<double> sq_sums_;
  std::vector<double> prior_;  // k(x_i, x_i), NaN until first use
};

}  // namespace gpbucb
