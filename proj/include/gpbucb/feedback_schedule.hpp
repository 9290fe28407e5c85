#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "gpbucb/errors.hpp"

namespace gpbucb {

/// The mapping fb[t]: the latest round whose outcome is usable when choosing
/// the decision of round t (rounds are 1-based, fb[t] = 0 means no feedback).
///
/// After round t is chosen, outcomes for rounds fb[t] + 1 .. fb[t + 1] are
/// delivered. For batches that is a whole batch at once; for a fixed delay it is
/// one outcome per round.
class FeedbackSchedule {
 public:
  enum class Kind { sequential, batch, delay, custom };

  static FeedbackSchedule sequential() { return FeedbackSchedule(Kind::sequential, 1, {}); }

  static FeedbackSchedule batch(std::size_t batch_size) {
    if (batch_size == 0) throw InputError("batch size must be at least 1");
    return FeedbackSchedule(Kind::batch, batch_size, {});
  }

  static FeedbackSchedule delay(std::size_t max_delay) {
    if (max_delay == 0) throw InputError("delay bound must be at least 1");
    return FeedbackSchedule(Kind::delay, max_delay, {});
  }

  /// Explicit schedule; `fb_values[t - 1]` is fb[t]. Validated eagerly: each value
  /// must satisfy fb[t] <= t - 1 and the sequence must be non-decreasing. The
  /// bound B is the largest t - fb[t] observed.
  static FeedbackSchedule custom(std::vector<std::size_t> fb_values) {
    if (fb_values.empty()) throw InputError("custom schedule must list at least one round");
    std::size_t bound = 1;
    for (std::size_t i = 0; i < fb_values.size(); ++i) {
      const std::size_t t = i + 1;
      if (fb_values[i] > t - 1) {
        throw InputError("custom schedule: fb[" + std::to_string(t) + "] = " + std::to_string(fb_values[i]) +
                         " exceeds t - 1");
      }
      if (i > 0 && fb_values[i] < fb_values[i - 1]) {
        throw InputError("custom schedule: fb decreases at round " + std::to_string(t));
      }
      bound = std::max(bound, t - fb_values[i]);
    }
    return FeedbackSchedule(Kind::custom, bound, std::move(fb_values));
  }

  Kind kind() const { return kind_; }
  /// B, the bound on t - fb[t].
  std::size_t bound() const { return bound_; }
  /// Last round with a defined fb value, or SIZE_MAX for the closed-form kinds.
  std::size_t horizon_limit() const { return kind_ == Kind::custom ? custom_.size() : static_cast<std::size_t>(-1); }

  std::size_t fb(std::size_t t) const {
    if (t == 0) throw InputError("rounds are numbered from 1");
    switch (kind_) {
      case Kind::sequential: return t - 1;
      case Kind::batch: return (t - 1) / bound_ * bound_;
      case Kind::delay: return t > bound_ ? t - bound_ : 0;
      case Kind::custom:
        if (t > custom_.size()) {
          throw InputError("custom schedule defines rounds 1.." + std::to_string(custom_.size()) +
                           ", asked for " + std::to_string(t));
        }
        return custom_[t - 1];
    }
    return 0;
  }

  /// True iff every outcome up to round t is available once round t is chosen.
  bool is_feedback_round(std::size_t t) const { return fb(t + 1) == t; }

  /// Two-stage schedule: no feedback during the first `init_rounds` rounds, all of
  /// their outcomes delivered together after round `init_rounds`, then this
  /// schedule applied to the remaining rounds with its clock restarted.
  FeedbackSchedule with_initialization(std::size_t init_rounds, std::size_t horizon) const {
    if (init_rounds == 0) return *this;
    std::vector<std::size_t> values(horizon + 1);
    for (std::size_t t = 1; t <= horizon + 1; ++t) {
      values[t - 1] = t <= init_rounds ? 0 : init_rounds + fb(t - init_rounds);
    }
    return custom(std::move(values));
  }

  static std::string to_string(Kind kind) {
    switch (kind) {
      case Kind::sequential: return "sequential";
      case Kind::batch: return "batch";
      case Kind::delay: return "delay";
      case Kind::custom: return "custom";
    }
    return "unknown";
  }

 private:
  FeedbackSchedule(Kind kind, std::size_t bound, std::vector<std::size_t> custom)
      : kind_(kind), bound_(bound), custom_(std::move(custom)) {}

  Kind kind_;
  std::size_t bound_;
  std::vector<std::size_t> custom_;
};

}  // namespace gpbucb
