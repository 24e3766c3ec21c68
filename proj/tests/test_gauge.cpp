#include <gtest/gtest.h>

#include <cmath>

#include "cantor/gauge.hpp"

using namespace cantor;

namespace {

const double kLn2 = std::log(2.0);

bool overlap(const LogReal& a, const LogReal& b) { return compare(a, b) == Cmp3::indeterminate; }

}  // namespace

TEST(LogReal, EnclosesItsInputs) {
  LogReal x = LogReal::exact(1.5, 128);
  EXPECT_TRUE(x.contains(1.5));
  EXPECT_EQ(x.error_bound(), 0.0);
  LogReal l = LogReal::log_of(mpz_class(8), 256);
  EXPECT_NEAR(l.value(), 3 * kLn2, 1e-15);
  EXPECT_TRUE(l.radius_below_pow2(-200));
  EXPECT_TRUE(certainly_greater(LogReal::exact(2, 64), LogReal::exact(1, 64)));
  EXPECT_EQ(compare(l, l), Cmp3::indeterminate);
}

TEST(LogReal, LogPlusClampsBelowOne) {
  EXPECT_EQ(LogReal::exact(0.5, 64).log_plus().value(), 0.0);
  EXPECT_NEAR(LogReal::exact(std::exp(2.0), 128).log_plus().value(), 2.0, 1e-15);
}

TEST(LogReal, DecideGreaterFallsBackOnTies) {
  auto tie = [](unsigned p) { return std::pair{LogReal::ln2(p), LogReal::ln2(p)}; };
  EXPECT_EQ(decide_greater(tie, 64, 256), Decision::not_greater_fallback);
  auto gt = [](unsigned p) { return std::pair{LogReal::exact(1, p), LogReal::exact(0, p)}; };
  EXPECT_EQ(decide_greater(gt, 64), Decision::greater);
}

TEST(PowerGauge, Examples) {
  EXPECT_NEAR(eval_log_at_level(make_power_gauge(1), 3).value(), -3 * kLn2, 1e-15);
  EXPECT_NEAR(eval_log_at_level(make_power_gauge(0.5), 4).value(), -2 * kLn2, 1e-15);
  EXPECT_NEAR(eval_log_at_level(Gauge::power(1), 10).value(), -10 * kLn2, 1e-14);
  EXPECT_NEAR(eval_log_at_level(Gauge::power(1), 0).value(), 0.0, 1e-300);
}

TEST(PowerGauge, RejectsNonPositiveAlpha) {
  EXPECT_THROW(make_power_gauge(0), InvalidParameter);
  EXPECT_THROW(make_power_gauge(-1), InvalidParameter);
}

TEST(IteratedGauge, Examples) {
  EXPECT_NEAR(eval_log_at_level(make_iterated_gauge(2, 1, 1), 3).value(), -8.0, 1e-14);
  EXPECT_NEAR(eval_log_at_level(Gauge::iterated(2, 1, 1), 5).value(), -32.0, 1e-13);
  // ln(8 ln 2) = 1.712929...
  EXPECT_NEAR(eval_log_at_level(make_iterated_gauge(1, 2, 1), 8).value(), -std::log(8 * kLn2), 1e-14);
  EXPECT_NEAR(eval_log_at_level(make_iterated_gauge(1, 2, 1), 8).value(), -1.71293, 1e-5);
}

TEST(IteratedGauge, P1Q1IsThePowerGauge) {
  for (double a : {0.3, 1.0, 2.5})
    for (DyadicLevel k = 0; k <= 60; ++k)
      EXPECT_TRUE(overlap(eval_log_at_level(Gauge::iterated(1, 1, a), k), eval_log_at_level(Gauge::power(a), k)))
          << a << " " << k;
}

TEST(IteratedGauge, DepthLimitNamesLastSafeLevel) {
  try {
    eval_log_at_level(Gauge::iterated(2, 1, 1), 400, 256);
    FAIL() << "expected a depth-limit error";
  } catch (const DepthLimitError& e) {
    EXPECT_GT(e.last_safe_level(), 0u);
    EXPECT_LT(e.last_safe_level(), 400u);
    EXPECT_NO_THROW(eval_log_at_level(Gauge::iterated(2, 1, 1), e.last_safe_level(), 256));
  }
  EXPECT_THROW(make_iterated_gauge(0, 1, 1), InvalidParameter);
}

TEST(ScaledGauge, ShiftsTheLog) {
  LogReal v = eval_log_at_level(Gauge::scaled(Gauge::power(1), 3), 2);
  EXPECT_NEAR(v.value(), std::log(3.0) - 2 * kLn2, 1e-15);
}

TEST(GaugeLaws, ScalarHalfMonotoneNested) {
  const Gauge gs[] = {Gauge::power(0.7), Gauge::iterated(2, 1, 1), Gauge::iterated(1, 2, 2), Gauge::iterated(3, 2, 1)};
  for (const Gauge& g : gs) {
    for (DyadicLevel k = 1; k < 12; ++k) {
      const LogReal x = eval_log_at_level(g, k);
      EXPECT_TRUE(overlap(eval_log_at_level(Gauge::scaled(g, 5), k), LogReal::log_of(5.0, 256) + x));
      EXPECT_TRUE(identical(eval_log_at_level(Gauge::half(g), k), eval_log_at_level(g, k + 1)));
      EXPECT_FALSE(certainly_greater(eval_log_at_level(g, k + 1), x));
      EXPECT_TRUE(x.contains(eval_log_at_level(g, k, 1024)));
    }
  }
}

TEST(Domination, Examples) {
  auto c2 = check_domination(Gauge::power(2), Gauge::power(2), 50);
  EXPECT_EQ(c2.status, DominationStatus::holds);
  EXPECT_NEAR(c2.C, 4.0, 1e-12);

  auto c1 = check_domination(Gauge::power(1), Gauge::power(1), 50);
  EXPECT_EQ(c1.status, DominationStatus::holds);
  EXPECT_NEAR(c1.C, 2.0, 1e-12);
  EXPECT_GE(c1.C, 2.0);

  for (const Gauge& phi : {Gauge::power(1), Gauge::iterated(2, 1, 1), Gauge::iterated(1, 2, 3)}) {
    auto h = check_domination(phi, Gauge::half(phi), 50);
    EXPECT_EQ(h.status, DominationStatus::holds) << phi.to_string();
    EXPECT_NEAR(h.C, 1.0, 1e-12);
  }

  EXPECT_EQ(check_domination(Gauge::power(1), Gauge::power(0.5), 50).status, DominationStatus::fails);
  EXPECT_EQ(check_domination(Gauge::iterated(2, 1, 1), Gauge::iterated(2, 1, 1), 16).status, DominationStatus::fails);
  EXPECT_THROW(check_domination(Gauge::power(1), Gauge::power(1), 1), InvalidParameter);
}

TEST(ScalingFamily, Members) {
  EXPECT_EQ(scaling_member(ScalingFamily::power(), 1), Gauge::power(1));
  EXPECT_EQ(scaling_member(ScalingFamily::iterated(2, 1), 2), Gauge::iterated(2, 1, 2));
  EXPECT_THROW(scaling_member(ScalingFamily::power(), 0), InvalidParameter);
}

TEST(ScalingFamily, SeparationTrend) {
  EXPECT_TRUE(scaling_separation_trend(ScalingFamily::power(), 1, 2, 1.5, 40).separated());
  EXPECT_TRUE(scaling_separation_trend(ScalingFamily::iterated(2, 1), 1, 2, 1.5, 20).separated());
  auto same = scaling_separation_trend(ScalingFamily::power(), 1, 1, 1.5, 40);
  EXPECT_FALSE(same.separated());
  EXPECT_FALSE(same.composed_decreasing);
}

TEST(GaugeJson, RoundTripAndErrors) {
  const Gauge g = Gauge::scaled(Gauge::half(Gauge::iterated(2, 1, 1.5)), 2);
  EXPECT_EQ(gauge_from_json(gauge_to_json(g)), g);
  EXPECT_EQ(gauge_from_json(nlohmann::json::parse(R"({"kind":"power","alpha":0.5})")), Gauge::power(0.5));
  EXPECT_THROW(gauge_from_json(nlohmann::json::parse(R"({"kind":"power"})")), InvalidParameter);
  EXPECT_THROW(gauge_from_json(nlohmann::json::parse(R"({"kind":"cosine","alpha":1})")), InvalidParameter);
  EXPECT_THROW(gauge_from_json(nlohmann::json::parse(R"({"kind":"iterated","p":1.5,"q":1,"alpha":1})")),
               InvalidParameter);
  EXPECT_EQ(family_from_json(family_to_json(ScalingFamily::iterated(2, 1))).to_string(), "iterated(2,1)");
}
