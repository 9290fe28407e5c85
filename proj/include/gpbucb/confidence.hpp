#pragma once

// Exploration weights: alpha_t for the three payoff assumptions, and the batch
// weight beta_t = exp(2C) * alpha_{fb[t]}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "gpbucb/errors.hpp"
#include "gpbucb/feedback_schedule.hpp"

namespace gpbucb {

/// Finite decision set, f drawn from the known GP prior.
struct FiniteDomain {
  std::size_t decision_count = 0;
};

/// D inside [0, l]^d, compact and convex; sample-path derivatives satisfy
/// Pr{sup |df/dx_j| > L} <= a exp(-(L/b)^2).
struct CompactDomain {
  double dimension = 0.0;
  double side_length = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// f has RKHS norm at most `norm_bound`; `information_gain[t - 1]` is gamma_t.
struct RkhsBound {
  double norm_bound = 0.0;
  std::vector<double> information_gain;
};

using Regime = std::variant<FiniteDomain, CompactDomain, RkhsBound>;

struct ConfidenceParams {
  Regime regime = FiniteDomain{};
  double delta = 0.1;
  /// Bound on the conditional mutual information accrued within a batch (nats).
  double C = 0.0;

  void validate() const;
};

inline std::string regime_name(const Regime& regime) {
  switch (regime.index()) {
    case 0: return "finite";
    case 1: return "compact";
    default: return "rkhs";
  }
}

namespace detail {

inline double alpha_unchecked(const ConfidenceParams& p, std::size_t t) {
  const double tt = static_cast<double>(t);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  if (const auto* finite = std::get_if<FiniteDomain>(&p.regime)) {
    return 2.0 * std::log(static_cast<double>(finite->decision_count) * tt * tt * pi2 / (6.0 * p.delta));
  }
  if (const auto* compact = std::get_if<CompactDomain>(&p.regime)) {
    const double d = compact->dimension;
    // First term grouped as t^2 * 2 pi^2 / (3 delta).
    const double first = 2.0 * std::log(tt * tt * 2.0 * pi2 / (3.0 * p.delta));
    const double inner = std::sqrt(std::log(4.0 * d * compact->a / p.delta));
    const double second = 2.0 * d * std::log(tt * tt * d * compact->b * compact->side_length * inner);
    return first + second;
  }
  const auto& rkhs = std::get<RkhsBound>(p.regime);
  if (t > rkhs.information_gain.size()) {
    throw ConfigError("rkhs regime: no information gain supplied for round " + std::to_string(t));
  }
  const double gamma = rkhs.information_gain[t - 1];
  const double lg = std::log(tt / p.delta);
  return 2.0 * rkhs.norm_bound * rkhs.norm_bound + 300.0 * gamma * lg * lg * lg;
}

}  // namespace detail

inline void ConfidenceParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1), got " + std::to_string(delta));
  if (!(C >= 0.0) || !std::isfinite(C)) throw ConfigError("C must be a finite nonnegative number");
  if (const auto* finite = std::get_if<FiniteDomain>(&regime)) {
    if (finite->decision_count == 0) throw ConfigError("finite regime needs the decision count |D|");
  } else if (const auto* compact = std::get_if<CompactDomain>(&regime)) {
    if (!(compact->dimension > 0 && compact->side_length > 0 && compact->a > 0 && compact->b > 0)) {
      throw ConfigError("compact regime needs positive dimension, side_length, a and b");
    }
    if (!(std::log(4.0 * compact->dimension * compact->a / delta) > 0.0)) {
      throw ConfigError("compact regime: log(4 d a / delta) must be positive");
    }
    if (!(detail::alpha_unchecked(*this, 1) > 0.0)) {
      throw ConfigError("compact regime: constants give a non-positive alpha_1");
    }
  } else {
    const auto& rkhs = std::get<RkhsBound>(regime);
    if (!(rkhs.norm_bound > 0.0)) throw ConfigError("rkhs regime needs a positive norm bound M");
    for (std::size_t i = 0; i < rkhs.information_gain.size(); ++i) {
      if (!(rkhs.information_gain[i] >= 0.0)) throw ConfigError("rkhs regime: information gain must be >= 0");
      if (i > 0 && rkhs.information_gain[i] < rkhs.information_gain[i - 1]) {
        throw ConfigError("rkhs regime: information gain sequence must be non-decreasing");
      }
    }
  }
}

/// alpha_t for round t >= 1.
inline double alpha(const ConfidenceParams& params, std::size_t t) {
  if (t == 0) throw InputError("alpha is defined for rounds t >= 1");
  params.validate();
  return detail::alpha_unchecked(params, t);
}

/// beta_t = exp(2C) * alpha_{fb[t]}; rounds with no feedback yet use alpha_1.
inline double beta(const ConfidenceParams& params, const FeedbackSchedule& schedule, std::size_t t) {
  return std::exp(2.0 * params.C) * alpha(params, std::max<std::size_t>(schedule.fb(t), 1));
}

/// C_1 = 8 / log(1 + 1 / noise_variance).
inline double regret_constant(double noise_variance) {
  if (!(noise_variance > 0.0)) throw InputError("noise variance must be positive");
  return 8.0 / std::log1p(1.0 / noise_variance);
}

/// sqrt(C_1 T exp(2C) alpha_T gamma_T) + 2, the high-probability cumulative
/// regret bound. A diagnostic; it is not enforced on individual trials.
inline double regret_bound(const ConfidenceParams& params, std::size_t horizon, double gamma, double noise_variance) {
  if (horizon == 0) throw InputError("horizon must be at least 1");
  if (!(gamma >= 0.0)) throw InputError("information gain must be nonnegative");
  const double c1 = regret_constant(noise_variance);
  return std::sqrt(c1 * static_cast<double>(horizon) * std::exp(2.0 * params.C) * alpha(params, horizon) * gamma) +
         2.0;
}

}  // namespace gpbucb
