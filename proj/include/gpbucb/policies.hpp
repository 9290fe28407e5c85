#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gpbucb/confidence.hpp"
#include "gpbucb/errors.hpp"
#include "gpbucb/feedback_schedule.hpp"
#include "gpbucb/gp_posterior.hpp"
#include "gpbucb/kernel.hpp"
#include "gpbucb/uncertainty_sampling.hpp"

namespace gpbucb {

enum class PolicyKind { gp_ucb, gp_bucb, gp_bucb_lazy, nrb_ucb, ntb_ucb, gp_bucb_init };

inline constexpr std::string_view kPolicyNames[] = {"gp-ucb", "gp-bucb", "gp-bucb-lazy",
                                                    "nrb-ucb", "ntb-ucb", "gp-bucb-init"};

inline std::string_view policy_name(PolicyKind kind) { return kPolicyNames[static_cast<std::size_t>(kind)]; }

inline std::optional<PolicyKind> policy_from_name(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kPolicyNames); ++i) {
    if (kPolicyNames[i] == name) return static_cast<PolicyKind>(i);
  }
  return std::nullopt;
}

/// Whether a policy conditions the variance on its pending decisions.
inline bool hallucinates(PolicyKind kind) {
  return kind == PolicyKind::gp_bucb || kind == PolicyKind::gp_bucb_lazy || kind == PolicyKind::gp_bucb_init;
}

struct PendingDecision {
  std::size_t round;
  std::size_t index;
  bool hallucinated;
};

/// Selection state for one trial.
///
/// Every `select_*` call chooses the decision for the current round and then
/// advances the round by one. The chosen decision joins the pending list until
/// `deliver` hands over its outcome. Rules that hallucinate (GP-BUCB and its lazy
/// form) condition the variance on pending decisions right away; the others only
/// see a decision once its outcome has been delivered.
///
/// Mean and variance of every candidate are cached: means are recomputed when
/// the posterior mean changes, variances by extending per-candidate forward
/// solves. The lazy rule keeps upper bounds sigma_hat on the standard deviation
/// and only refreshes the candidates it pops from a max-priority queue.
class PolicyState {
 public:
  PolicyState(const DecisionSet& decisions, GpPosterior posterior, FeedbackSchedule schedule,
              ConfidenceParams confidence)
      : decisions_(&decisions),
        posterior_(std::move(posterior)),
        schedule_(std::move(schedule)),
        confidence_(std::move(confidence)),
        cache_(decisions),
        means_(decisions.size(), 0.0),
        sigma_hat_(decisions.size(), std::numeric_limits<double>::infinity()),
        sigma_stamp_(decisions.size(), kNever) {
    if (decisions.dimension() != posterior_.dimension()) {
      throw InputError("decision set dimension does not match the kernel");
    }
    confidence_.validate();
  }

  /// The round whose decision the next `select_*` call chooses (1-based).
  std::size_t round() const { return round_; }
  const GpPosterior& posterior() const { return posterior_; }
  const FeedbackSchedule& schedule() const { return schedule_; }
  const ConfidenceParams& confidence() const { return confidence_; }
  const DecisionSet& decisions() const { return *decisions_; }
  const std::deque<PendingDecision>& pending() const { return pending_; }

  /// Variance evaluations performed by the most recent selection.
  std::size_t last_recompute_count() const { return last_recomputes_; }
  std::uint64_t total_recompute_count() const { return total_recomputes_; }
  /// Upper bounds on the posterior standard deviation kept by the lazy rule.
  std::span<const double> sigma_upper_bounds() const { return sigma_hat_; }

  /// GP-UCB: argmax mu_{t-1}(x) + alpha_t^{1/2} sigma_{t-1}(x). Needs all
  /// outcomes through round t - 1.
  std::size_t select_gp_ucb() {
    if (!pending_.empty()) throw InputError("gp-ucb needs feedback through round t - 1 (sequential schedule)");
    const double width = std::sqrt(alpha(confidence_, round_));
    return commit(eager_argmax(width), false);
  }

  /// GP-BUCB: argmax mu_{fb[t]}(x) + beta_t^{1/2} sigma_{t-1}(x), then hallucinate.
  std::size_t select_gp_bucb() {
    check_bookkeeping();
    const double width = std::sqrt(beta(confidence_, schedule_, round_));
    return commit(eager_argmax(width), true);
  }

  /// Same choice as select_gp_bucb, computed lazily from sigma upper bounds.
  std::size_t select_gp_bucb_lazy() {
    check_bookkeeping();
    refresh_means();
    const double width = std::sqrt(beta(confidence_, schedule_, round_));
    if (width != heap_width_ || posterior_.mean_revision() != heap_mean_revision_) rebuild_heap(width);

    const std::size_t stamp = posterior_.conditioning_count();
    std::size_t recomputes = 0;
    std::size_t chosen = 0;
    while (true) {
      const HeapEntry top = heap_.top();
      if (sigma_stamp_[top.index] == stamp) {
        chosen = top.index;
        heap_.pop();
        break;
      }
      heap_.pop();
      const double sigma = std::sqrt(cache_.variance(posterior_, top.index));
      ++recomputes;
      if (sigma > sigma_hat_[top.index]) {
        throw InternalError("lazy sigma bound violated at decision " + std::to_string(top.index));
      }
      sigma_hat_[top.index] = sigma;
      sigma_stamp_[top.index] = stamp;
      heap_.push({score(top.index, sigma, width), top.index});
    }
    // The chosen entry goes back with its (soon stale) bound.
    heap_.push({score(chosen, sigma_hat_[chosen], width), chosen});
    last_recomputes_ = recomputes;
    total_recomputes_ += recomputes;
    return commit(chosen, true);
  }

  /// NRB-UCB: maximizer of the GP-UCB score built from feedback through fb[t]
  /// only, with no hallucination, so it repeats within a batch.
  std::size_t select_nrb() { return select_ntb(1); }

  /// NTB-UCB: the `position`-th best decision (1-based) by the GP-UCB score
  /// built from feedback through fb[t]. Ties go to the lower index.
  std::size_t select_ntb(std::size_t position) {
    if (position == 0 || position > decisions_->size()) {
      throw InputError("ntb position " + std::to_string(position) + " outside 1.." +
                       std::to_string(decisions_->size()));
    }
    // The GP-UCB weight of the round right after the last feedback, so the score
    // stays fixed until new outcomes arrive.
    const double width = std::sqrt(alpha(confidence_, schedule_.fb(round_) + 1));
    std::size_t recomputes = 0;
    if (width != ranking_width_ || posterior_.mean_revision() != ranking_mean_revision_ ||
        posterior_.conditioning_count() != ranking_stamp_ || ranking_.empty()) {
      refresh_means();
      std::vector<double> scores(decisions_->size());
      for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = score(i, std::sqrt(cache_.variance(posterior_, i)), width);
      }
      recomputes = scores.size();
      ranking_.resize(scores.size());
      std::iota(ranking_.begin(), ranking_.end(), std::size_t{0});
      std::stable_sort(ranking_.begin(), ranking_.end(),
                       [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
      ranking_width_ = width;
      ranking_mean_revision_ = posterior_.mean_revision();
      ranking_stamp_ = posterior_.conditioning_count();
    }
    last_recomputes_ = recomputes;
    total_recomputes_ += recomputes;
    return commit(ranking_[position - 1], false);
  }

  /// Uncertainty sampling step: argmax sigma^2_{t-1}(x), then hallucinate.
  std::size_t select_most_uncertain() {
    check_bookkeeping();
    std::size_t best = 0;
    double best_var = cache_.variance(posterior_, 0);
    for (std::size_t i = 1; i < decisions_->size(); ++i) {
      const double v = cache_.variance(posterior_, i);
      if (v > best_var) {
        best_var = v;
        best = i;
      }
    }
    last_recomputes_ = decisions_->size();
    total_recomputes_ += decisions_->size();
    return commit(best, true);
  }

  /// Hands over outcomes for the oldest pending decisions, in round order.
  void deliver(std::span<const double> outcomes) {
    if (outcomes.size() > pending_.size()) throw InputError("more outcomes delivered than decisions pending");
    std::size_t i = 0;
    while (i < outcomes.size()) {
      if (pending_.front().hallucinated) {
        std::size_t run = 0;
        while (i + run < outcomes.size() && pending_[run].hallucinated) ++run;
        posterior_.promote_leading_hallucinations(outcomes.subspan(i, run));
        pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(run));
        i += run;
      } else {
        posterior_.condition_on_observation(decisions_->point(pending_.front().index), outcomes[i]);
        pending_.pop_front();
        ++i;
      }
    }
  }

  /// Score mu(x_i) + width * sigma, with the cached mean.
  double score(std::size_t i, double sigma, double width) const { return means_[i] + width * sigma; }

  /// Cached posterior mean of every candidate.
  std::span<const double> means() {
    refresh_means();
    return means_;
  }

 private:
  static constexpr std::size_t kNever = static_cast<std::size_t>(-1);

  struct HeapEntry {
    double bound;
    std::size_t index;
    // Max-heap on bound; among equal bounds the lower index comes first.
    bool operator<(const HeapEntry& other) const {
      return bound < other.bound || (bound == other.bound && index > other.index);
    }
  };

  void refresh_means() {
    if (means_revision_ == posterior_.mean_revision()) return;
    for (std::size_t i = 0; i < means_.size(); ++i) means_[i] = posterior_.mean(decisions_->point(i));
    means_revision_ = posterior_.mean_revision();
  }

  std::size_t eager_argmax(double width) {
    refresh_means();
    const std::size_t stamp = posterior_.conditioning_count();
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < decisions_->size(); ++i) {
      const double sigma = std::sqrt(cache_.variance(posterior_, i));
      sigma_hat_[i] = sigma;
      sigma_stamp_[i] = stamp;
      const double s = score(i, sigma, width);
      if (s > best_score) {
        best_score = s;
        best = i;
      }
    }
    last_recomputes_ = decisions_->size();
    total_recomputes_ += decisions_->size();
    return best;
  }

  void rebuild_heap(double width) {
    std::vector<HeapEntry> entries(decisions_->size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const double bound = std::isinf(sigma_hat_[i]) ? std::numeric_limits<double>::infinity()
                                                     : score(i, sigma_hat_[i], width);
      entries[i] = {bound, i};
    }
    heap_ = std::priority_queue<HeapEntry>(std::less<HeapEntry>{}, std::move(entries));
    heap_width_ = width;
    heap_mean_revision_ = posterior_.mean_revision();
  }

  void check_bookkeeping() const {
    // Pending rounds are exactly fb[t]+1 .. t-1.
    const std::size_t fb = schedule_.fb(round_);
    if (pending_.size() != round_ - 1 - fb) {
      throw InternalError("round " + std::to_string(round_) + ": " + std::to_string(pending_.size()) +
                          " decisions pending, expected " + std::to_string(round_ - 1 - fb));
    }
  }

  std::size_t commit(std::size_t index, bool hallucinate) {
    if (hallucinate) posterior_.hallucinate(decisions_->point(index));
    pending_.push_back({round_, index, hallucinate});
    ++round_;
    return index;
  }

  const DecisionSet* decisions_;
  GpPosterior posterior_;
  FeedbackSchedule schedule_;
  ConfidenceParams confidence_;
  VarianceCache cache_;

  std::size_t round_ = 1;
  std::deque<PendingDecision> pending_;

  std::vector<double> means_;
  std::uint64_t means_revision_ = static_cast<std::uint64_t>(-1);

  std::vector<double> sigma_hat_;
  std::vector<std::size_t> sigma_stamp_;
  std::priority_queue<HeapEntry> heap_;
  double heap_width_ = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t heap_mean_revision_ = static_cast<std::uint64_t>(-1);

  std::vector<std::size_t> ranking_;
  double ranking_width_ = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t ranking_mean_revision_ = 0;
  std::size_t ranking_stamp_ = 0;

  std::size_t last_recomputes_ = 0;
  std::uint64_t total_recomputes_ = 0;
};

// Initialization set sizes for the two-stage algorithm, given an analytic bound
// on how gamma_t grows for the kernel.

/// gamma_t <= eta * d * log(t + 1)
struct LinearGammaBound {
  double eta = 1.0;
  double dimension = 1.0;
};

/// gamma_t <= nu * t^epsilon, epsilon in (0, 1)
struct MaternGammaBound {
  double nu = 1.0;
  double epsilon = 0.5;
};

/// gamma_t <= eta * (log(t + 1))^d
struct RbfGammaBound {
  double eta = 1.0;
  double dimension = 1.0;
};

using GammaGrowthBound = std::variant<LinearGammaBound, MaternGammaBound, RbfGammaBound>;

struct InitSize {
  std::size_t size = 0;
  /// Regret multiplier C' relative to the sequential bound.
  double multiplier = 1.0;
};

/// T^init and C' for batch size B.
inline InitSize t_init_size(const GammaGrowthBound& growth, std::size_t batch_size) {
  if (batch_size == 0) throw ConfigError("batch size must be at least 1");
  const double b = static_cast<double>(batch_size);
  const double log_b = std::log(b);
  const double e = std::numbers::e;
  double raw = 0.0;
  double multiplier = 1.0;
  if (const auto* lin = std::get_if<LinearGammaBound>(&growth)) {
    if (!(lin->eta > 0 && lin->dimension > 0)) throw ConfigError("linear bound needs positive eta and d");
    // max[log B, e * (log eta + log d + 2 log B) / (2 log B - 1) * eta d (B - 1) log B]
    const double ratio = (std::log(lin->eta) + std::log(lin->dimension) + 2.0 * log_b) / (2.0 * log_b - 1.0);
    raw = std::max(log_b, e * ratio * lin->eta * lin->dimension * (b - 1.0) * log_b);
    multiplier = std::exp(2.0 / e);
  } else if (const auto* mat = std::get_if<MaternGammaBound>(&growth)) {
    if (!(mat->nu > 0)) throw ConfigError("matern bound needs positive nu");
    if (!(mat->epsilon > 0 && mat->epsilon < 1)) throw ConfigError("matern bound needs epsilon in (0, 1)");
    raw = std::pow(mat->nu * (b - 1.0), 1.0 / (1.0 - mat->epsilon));
    multiplier = e;
  } else {
    const auto& rbf = std::get<RbfGammaBound>(growth);
    if (!(rbf.eta > 0 && rbf.dimension > 0)) throw ConfigError("rbf bound needs positive eta and d");
    const double d = rbf.dimension;
    // max[(log B)^d, ((e log eta + (d + 1) log B) / (2 d log B - 1))^d * eta (B - 1) (log B)^d]
    const double ratio = (e * std::log(rbf.eta) + (d + 1.0) * log_b) / (d * 2.0 * log_b - 1.0);
    raw = std::max(std::pow(log_b, d), std::pow(ratio, d) * rbf.eta * (b - 1.0) * std::pow(log_b, d));
    multiplier = std::exp(std::pow(2.0 * d / e, d));
  }
  if (!std::isfinite(raw)) throw ConfigError("initialization size is not finite for these constants");
  InitSize out;
  out.size = raw > 0.0 ? static_cast<std::size_t>(std::ceil(raw)) : 0;
  out.multiplier = multiplier;
  return out;
}

}  // namespace gpbucb
