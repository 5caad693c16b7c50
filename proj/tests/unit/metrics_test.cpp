#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "driftbench/metrics.hpp"

namespace driftbench {
namespace {

const DriftSchedule kAbrupt = DriftSchedule::abrupt_preset();

double round1(double v) { return std::round(v * 10.0) / 10.0; }

TEST(ClassifyAlarmTest, Examples) {
  const auto hit = classify_alarm(10050, kAbrupt, 0);
  EXPECT_EQ(hit.kind, AlarmKind::true_alarm);
  EXPECT_EQ(hit.drift_index, 10000u);
  EXPECT_NEAR(*hit.closeness, 0.995, 1e-12);

  const auto early = classify_alarm(9800, kAbrupt, 0);
  EXPECT_EQ(early.kind, AlarmKind::false_alarm);
  EXPECT_FALSE(early.closeness);

  const auto missed = classify_alarm(std::nullopt, kAbrupt, 0);
  EXPECT_EQ(missed.kind, AlarmKind::missed);
  EXPECT_FALSE(missed.detected_index);
  EXPECT_FALSE(missed.closeness);
}

TEST(ClassifyAlarmTest, WindowBoundaries) {
  EXPECT_EQ(classify_alarm(10000, kAbrupt, 0).kind, AlarmKind::true_alarm);
  EXPECT_EQ(classify_alarm(19999, kAbrupt, 0).kind, AlarmKind::true_alarm);
  EXPECT_EQ(classify_alarm(20000, kAbrupt, 0).kind, AlarmKind::false_alarm);
  EXPECT_EQ(classify_alarm(39999, kAbrupt, 2).kind, AlarmKind::true_alarm);
  const auto gradual = DriftSchedule::gradual_preset();
  EXPECT_EQ(classify_alarm(9500, gradual, 0).kind, AlarmKind::true_alarm);
  EXPECT_EQ(classify_alarm(9499, gradual, 0).kind, AlarmKind::false_alarm);
  EXPECT_EQ(classify_alarm(20000, gradual, 0).kind, AlarmKind::false_alarm);
}

TEST(ClassifyAlarmTest, RejectsBadInputs) {
  EXPECT_THROW(classify_alarm(100, kAbrupt, 3), std::out_of_range);
  EXPECT_THROW(classify_alarm(40000, kAbrupt, 0), std::out_of_range);
}

TEST(ClassifyAlarmTest, InvariantsHoldForEveryIndex) {
  for (std::size_t d = 0; d < kAbrupt.total_length; d += 37) {
    for (std::size_t k = 0; k < 3; ++k) {
      const auto o = classify_alarm(d, kAbrupt, k);
      ASSERT_EQ(o.kind == AlarmKind::true_alarm, o.closeness.has_value());
      if (o.kind == AlarmKind::true_alarm) {
        ASSERT_LE(o.drift_index, d);
        ASSERT_LT(d, kAbrupt.concept_end(k));
        ASSERT_GT(*o.closeness, 0.0);
        ASSERT_LE(*o.closeness, 1.0);
      }
    }
  }
}

TEST(ClosenessTest, Examples) {
  EXPECT_EQ(closeness(10000, 10000, 20000), 1.0);
  EXPECT_NEAR(closeness(10050, 10000, 20000), 0.995, 1e-12);
  EXPECT_DOUBLE_EQ(closeness(19999, 10000, 20000), 1.0 / 10000.0);
  EXPECT_THROW(closeness(9999, 10000, 20000), std::invalid_argument);
  EXPECT_THROW(closeness(20000, 10000, 20000), std::invalid_argument);
}

TEST(ClosenessTest, StrictlyDecreasing) {
  double prev = 2.0;
  for (std::size_t d = 10000; d < 20000; ++d) {
    const double c = closeness(d, 10000, 20000);
    ASSERT_LT(c, prev) << d;
    prev = c;
  }
}

std::vector<AlarmOutcome> outcomes_with_counts(std::size_t t, std::size_t f, std::size_t m) {
  std::vector<AlarmOutcome> out;
  for (std::size_t i = 0; i < t; ++i) out.push_back(classify_alarm(10000 + i, kAbrupt, 0));
  for (std::size_t i = 0; i < f; ++i) out.push_back(classify_alarm(9000 + i, kAbrupt, 0));
  for (std::size_t i = 0; i < m; ++i) out.push_back(classify_alarm(std::nullopt, kAbrupt, 0));
  return out;
}

TEST(AggregateTest, PublishedRows) {
  const auto kswin = aggregate_alarms(outcomes_with_counts(279, 21, 0));
  EXPECT_EQ(kswin.true_count, 279u);
  EXPECT_EQ(round1(kswin.true_alarm_pct), 93.0);
  const auto eddm = aggregate_alarms(outcomes_with_counts(2, 242, 56));
  EXPECT_EQ(eddm.total(), 300u);
  EXPECT_EQ(round1(eddm.true_alarm_pct), 0.7);
}

TEST(AggregateTest, AllMissed) {
  const auto a = aggregate_alarms(outcomes_with_counts(0, 0, 5));
  EXPECT_EQ(a.true_alarm_pct, 0.0);
  EXPECT_FALSE(a.mean_closeness);
  EXPECT_THROW(aggregate_alarms({}), std::invalid_argument);
}

TEST(AggregateTest, MeanClosenessOverTrueAlarmsOnly) {
  std::vector<AlarmOutcome> o = {classify_alarm(10000, kAbrupt, 0), classify_alarm(15000, kAbrupt, 0),
                                 classify_alarm(5, kAbrupt, 0), classify_alarm(std::nullopt, kAbrupt, 0)};
  const auto a = aggregate_alarms(o);
  EXPECT_DOUBLE_EQ(*a.mean_closeness, 0.75);
  EXPECT_DOUBLE_EQ(a.true_alarm_pct, 50.0);
}

TEST(AggregateTest, MatchesBruteForceRecount) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<AlarmOutcome> o;
    const std::size_t n = 1 + rng() % 60;
    for (std::size_t i = 0; i < n; ++i) {
      if (rng() % 4 == 0) {
        o.push_back(classify_alarm(std::nullopt, kAbrupt, 0));
      } else {
        o.push_back(classify_alarm(rng() % kAbrupt.total_length, kAbrupt, 0));
      }
    }
    std::size_t t = 0, f = 0, m = 0;
    double cs = 0;
    for (const auto& x : o) {
      if (x.kind == AlarmKind::true_alarm) {
        ++t;
        cs += *x.closeness;
      } else if (x.kind == AlarmKind::false_alarm) {
        ++f;
      } else {
        ++m;
      }
    }
    const auto a = aggregate_alarms(o);
    ASSERT_EQ(a.true_count, t);
    ASSERT_EQ(a.false_count, f);
    ASSERT_EQ(a.missed_count, m);
    ASSERT_EQ(a.total(), n);
    ASSERT_DOUBLE_EQ(a.true_alarm_pct, 100.0 * t / n);
    if (t) {
      ASSERT_DOUBLE_EQ(*a.mean_closeness, cs / t);
    }
  }
}

TEST(AlarmKindTest, NamesRoundTrip) {
  for (auto k : {AlarmKind::true_alarm, AlarmKind::false_alarm, AlarmKind::missed})
    EXPECT_EQ(parse_alarm_kind(to_string(k)), k);
  EXPECT_THROW(parse_alarm_kind("maybe"), std::invalid_argument);
}

}  // namespace
}  // namespace driftbench
