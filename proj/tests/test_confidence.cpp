#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gpbucb/confidence.hpp"

using namespace gpbucb;

namespace {

ConfidenceParams finite_domain(std::size_t n, double delta = 0.1, double c = 0.0) {
  ConfidenceParams p;
  p.regime = FiniteDomain{n};
  p.delta = delta;
  p.C = c;
  return p;
}

}  // namespace

TEST(Alpha, FiniteDomainValue) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(alpha(finite_domain(1000), 1), 2.0 * std::log(1000.0 * pi2 / 0.6), 1e-12);
  EXPECT_NEAR(alpha(finite_domain(1000), 1), 19.4161, 1e-4);
  EXPECT_NEAR(alpha(finite_domain(50, 0.05), 7), 2.0 * std::log(50.0 * 49.0 * pi2 / 0.3), 1e-12);
}

TEST(Alpha, CompactDomainGrouping) {
  ConfidenceParams p;
  p.regime = CompactDomain{2.0, 1.0, 1.0, 1.0};
  p.delta = 0.1;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (std::size_t t : {1u, 5u, 40u}) {
    const double tt = static_cast<double>(t);
    const double want = 2.0 * std::log(tt * tt * 2.0 * pi2 / 0.3) +
                        4.0 * std::log(tt * tt * 2.0 * 1.0 * 1.0 * std::sqrt(std::log(80.0)));
    EXPECT_NEAR(alpha(p, t), want, 1e-12);
  }
}

TEST(Alpha, RkhsValue) {
  ConfidenceParams p;
  p.delta = 1.0 / std::numbers::e;
  p.regime = RkhsBound{1.0, {0.0}};
  EXPECT_NEAR(alpha(p, 1), 2.0, 1e-12);
  p.regime = RkhsBound{2.0, {0.5, 0.9}};
  const double l = std::log(2.0 * std::numbers::e);
  EXPECT_NEAR(alpha(p, 2), 8.0 + 300.0 * 0.9 * l * l * l, 1e-9);
  EXPECT_THROW(alpha(p, 3), ConfigError);
}

TEST(Alpha, MonotoneInRoundForEveryRegime) {
  ConfidenceParams compact;
  compact.regime = CompactDomain{3.0, 2.0, 1.5, 0.7};
  ConfidenceParams rkhs;
  std::vector<double> gamma;
  for (int t = 1; t <= 200; ++t) gamma.push_back(std::log1p(t));
  rkhs.regime = RkhsBound{1.0, gamma};
  for (const auto& p : {finite_domain(10), compact, rkhs}) {
    for (std::size_t t = 1; t < 200; ++t) {
      EXPECT_GT(alpha(p, t), 0.0);
      EXPECT_LE(alpha(p, t), alpha(p, t + 1));
    }
  }
  EXPECT_LT(alpha(finite_domain(10), 3), alpha(finite_domain(10), 4));
}

TEST(Alpha, ValidationErrors) {
  EXPECT_THROW(alpha(finite_domain(10, 1.5), 1), ConfigError);
  EXPECT_THROW(alpha(finite_domain(10, 0.0), 1), ConfigError);
  EXPECT_THROW(alpha(finite_domain(0), 1), ConfigError);
  EXPECT_THROW(alpha(finite_domain(10, 0.1, -1.0), 1), ConfigError);
  EXPECT_THROW(alpha(finite_domain(10), 0), InputError);
  ConfidenceParams p;
  p.regime = CompactDomain{};
  EXPECT_THROW(alpha(p, 1), ConfigError);
  p.regime = RkhsBound{0.0, {1.0}};
  EXPECT_THROW(alpha(p, 1), ConfigError);
  p.regime = RkhsBound{1.0, {1.0, 0.5}};
  EXPECT_THROW(alpha(p, 1), ConfigError);
}

TEST(Beta, UsesAlphaAtLastFeedback) {
  const auto seq = FeedbackSchedule::sequential();
  const auto p0 = finite_domain(100);
  for (std::size_t t = 2; t < 30; ++t) EXPECT_EQ(beta(p0, seq, t), alpha(p0, t - 1));
  EXPECT_EQ(beta(p0, seq, 1), alpha(p0, 1));

  const auto half = finite_domain(100, 0.1, 0.5);
  const auto batch = FeedbackSchedule::batch(10);
  EXPECT_NEAR(beta(half, batch, 15), std::numbers::e * alpha(half, 10), 1e-12);
  for (std::size_t t = 2; t <= 10; ++t) EXPECT_EQ(beta(half, batch, t), beta(half, batch, 1));
  for (std::size_t t = 1; t < 60; ++t) EXPECT_GE(beta(half, batch, t), alpha(half, std::max<std::size_t>(batch.fb(t), 1)));
}

TEST(RegretBound, ConstantsAndMonotonicity) {
  EXPECT_NEAR(regret_constant(1.0), 8.0 / std::log(2.0), 1e-12);
  EXPECT_NEAR(regret_constant(1.0), 11.5416, 1e-4);
  EXPECT_EQ(regret_bound(finite_domain(10), 50, 0.0, 0.1), 2.0);
  double prev = 0.0;
  for (std::size_t t : {1u, 5u, 50u, 500u}) {
    for (double c : {0.0, 0.5, 1.0}) {
      for (double g : {0.0, 1.0, 10.0}) {
        const double v = regret_bound(finite_domain(10, 0.1, c), t, g, 0.5);
        EXPECT_LE(regret_bound(finite_domain(10, 0.1, c), t, g, 0.5), regret_bound(finite_domain(10, 0.1, c), t, g + 1.0, 0.5));
        EXPECT_LE(v, regret_bound(finite_domain(10, 0.1, c + 0.25), t, g, 0.5));
        EXPECT_LE(v, regret_bound(finite_domain(10, 0.1, c), t + 1, g, 0.5));
        prev = v;
      }
    }
  }
  EXPECT_GT(prev, 2.0);
  EXPECT_THROW(regret_bound(finite_domain(10), 0, 1.0, 1.0), InputError);
  EXPECT_THROW(regret_constant(0.0), InputError);
}
