#include <gtest/gtest.h>

#include "gpbucb/feedback_schedule.hpp"

using gpbucb::FeedbackSchedule;
using gpbucb::InputError;

TEST(FeedbackSchedule, BatchValues) {
  const auto s = FeedbackSchedule::batch(10);
  for (std::size_t t = 1; t <= 10; ++t) EXPECT_EQ(s.fb(t), 0u);
  for (std::size_t t = 11; t <= 20; ++t) EXPECT_EQ(s.fb(t), 10u);
  EXPECT_EQ(s.fb(21), 20u);
  EXPECT_TRUE(s.is_feedback_round(10));
  EXPECT_FALSE(s.is_feedback_round(9));
}

TEST(FeedbackSchedule, SequentialAndDelayValues) {
  const auto seq = FeedbackSchedule::sequential();
  EXPECT_EQ(seq.fb(7), 6u);
  for (std::size_t t = 1; t < 50; ++t) EXPECT_TRUE(seq.is_feedback_round(t));
  const auto d = FeedbackSchedule::delay(3);
  EXPECT_EQ(d.fb(2), 0u);
  EXPECT_EQ(d.fb(5), 2u);
  // One new outcome per round once the delay has elapsed; never a full catch-up.
  for (std::size_t t = 3; t < 50; ++t) {
    EXPECT_EQ(d.fb(t + 1), t - 2);
    EXPECT_FALSE(d.is_feedback_round(t));
  }
}

TEST(FeedbackSchedule, InvariantsHoldExhaustively) {
  const std::vector<FeedbackSchedule> schedules{
      FeedbackSchedule::sequential(), FeedbackSchedule::batch(1), FeedbackSchedule::batch(7),
      FeedbackSchedule::batch(10),    FeedbackSchedule::delay(1), FeedbackSchedule::delay(4)};
  for (const auto& s : schedules) {
    for (std::size_t t = 1; t <= 10000; ++t) {
      ASSERT_LE(s.fb(t), t - 1);
      ASSERT_LE(t - s.fb(t), s.bound());
      ASSERT_GE(s.fb(t + 1), s.fb(t));
    }
  }
}

TEST(FeedbackSchedule, UnitBoundKindsCoincide) {
  const auto a = FeedbackSchedule::sequential();
  const auto b = FeedbackSchedule::batch(1);
  const auto c = FeedbackSchedule::delay(1);
  for (std::size_t t = 1; t <= 10000; ++t) {
    ASSERT_EQ(a.fb(t), b.fb(t));
    ASSERT_EQ(a.fb(t), c.fb(t));
  }
}

TEST(FeedbackSchedule, CustomValidation) {
  const auto s = FeedbackSchedule::custom({0, 0, 2, 2, 3});
  EXPECT_EQ(s.bound(), 2u);
  EXPECT_EQ(s.fb(3), 2u);
  EXPECT_EQ(s.horizon_limit(), 5u);
  EXPECT_THROW(s.fb(6), InputError);
  EXPECT_THROW(s.fb(0), InputError);
  EXPECT_THROW(FeedbackSchedule::custom({1}), InputError);
  EXPECT_THROW(FeedbackSchedule::custom({0, 1, 0}), InputError);
  EXPECT_THROW(FeedbackSchedule::custom({}), InputError);
  EXPECT_THROW(FeedbackSchedule::batch(0), InputError);
  EXPECT_THROW(FeedbackSchedule::delay(0), InputError);
}

TEST(FeedbackSchedule, InitializationPrefix) {
  const auto s = FeedbackSchedule::batch(3).with_initialization(4, 12);
  const std::vector<std::size_t> want{0, 0, 0, 0, 4, 4, 4, 7, 7, 7, 10, 10, 10};
  ASSERT_EQ(s.horizon_limit(), want.size());
  for (std::size_t t = 1; t <= want.size(); ++t) EXPECT_EQ(s.fb(t), want[t - 1]) << "t=" << t;
  EXPECT_TRUE(s.is_feedback_round(4));
  const auto same = FeedbackSchedule::batch(3).with_initialization(0, 12);
  EXPECT_EQ(same.kind(), FeedbackSchedule::Kind::batch);
}
