#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cantor/seqbuild.hpp"

using namespace cantor;

namespace {

TargetSequences integer_targets(std::function<unsigned long(std::size_t)> a, std::function<unsigned long(std::size_t)> b,
                                std::size_t depth) {
  return targets_from_integers([a](std::size_t k) { return mpz_class(a(k)); },
                               [b](std::size_t k) { return mpz_class(b(k)); }, depth);
}

// Brute-force scan of T_{l+1} = min{k > T_l + 1 : a_k > b_{T_l + 1}} on integers.
std::vector<std::size_t> scan_times(const std::vector<unsigned long>& a, const std::vector<unsigned long>& b) {
  std::vector<std::size_t> t;
  std::size_t prev = 0;
  for (;;) {
    std::size_t next = 0;
    for (std::size_t k = prev + 2; k <= a.size(); ++k)
      if (a[k - 1] > b[prev]) {
        next = k;
        break;
      }
    if (!next) return t;
    t.push_back(next);
    prev = next;
  }
}

// Integer recursion for the chain, from exact integer envelope values.
std::vector<unsigned long> trace_chain(const std::vector<unsigned long>& u) {
  std::vector<unsigned long> v{1};
  for (std::size_t k = 1; k < u.size(); ++k) {
    const unsigned long vk = v.back();
    v.push_back(2 * vk > u[k] ? vk : (u[k] / vk) * vk);
  }
  return v;
}

std::vector<unsigned long> chain_values(const DivisibilityChain& c) {
  std::vector<unsigned long> out;
  for (const auto& x : c.v) out.push_back(x.get_ui());
  return out;
}

}  // namespace

TEST(Targets, FromGauges) {
  auto t = targets_from_gauges(Gauge::power(1), Gauge::power(1), 2, 20);
  for (std::size_t k = 1; k <= 20; ++k) {
    EXPECT_NEAR(t.a(k).value(), (k + 1) * std::log(2.0), 1e-12);
    EXPECT_NEAR(t.b(k).value(), (k + 1) * std::log(2.0), 1e-12);
  }
  auto t2 = targets_from_gauges(Gauge::power(0.5), Gauge::power(1.5), std::pow(2, 1.5), 20);
  EXPECT_NEAR(t2.a(7).value(), 0.5 * 8 * std::log(2.0), 1e-12);
  EXPECT_NEAR(t2.b(7).value(), 1.5 * 8 * std::log(2.0), 1e-12);
  auto t3 = targets_from_gauges(Gauge::power(2), Gauge::power(2), 4, 20);
  EXPECT_NEAR(t3.a(9).value(), 20 * std::log(2.0), 1e-12);
  EXPECT_NEAR(t3.b(9).value(), 20 * std::log(2.0), 1e-12);
}

TEST(Targets, InconsistentConstantIsRejected) {
  EXPECT_THROW(targets_from_gauges(Gauge::power(1), Gauge::power(1), 1, 10), DominationViolated);
  EXPECT_THROW(targets_from_gauges(Gauge::power(1), Gauge::power(1), 0, 10), InvalidParameter);
}

TEST(OscillationTimes, Examples) {
  auto t = integer_targets([](std::size_t k) { return k; }, [](std::size_t k) { return k * k; }, 150);
  EXPECT_EQ(oscillation_times(t).times, (std::vector<std::size_t>{2, 10, 122}));

  std::vector<std::size_t> even;
  for (std::size_t k = 2; k <= 20; k += 2) even.push_back(k);
  auto p = integer_targets([](std::size_t k) { return 1ul << k; }, [](std::size_t k) { return 1ul << k; }, 20);
  EXPECT_EQ(oscillation_times(p).times, even);
  auto id = integer_targets([](std::size_t k) { return k; }, [](std::size_t k) { return k; }, 20);
  EXPECT_EQ(oscillation_times(id).times, even);
}

TEST(OscillationTimes, PrefixWhenDepthRunsOut) {
  auto t = integer_targets([](std::size_t k) { return k; }, [](std::size_t k) { return k * k; }, 100);
  auto s = oscillation_times(t);
  EXPECT_EQ(s.times, (std::vector<std::size_t>{2, 10}));
  EXPECT_EQ(s.complete_to, 100u);
}

TEST(OscillationTimes, MatchesBruteForceOnRandomIntegerTargets) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<unsigned long> a{1 + rng() % 3}, b;
    for (std::size_t k = 1; k < 40; ++k) a.push_back(a.back() + rng() % 4);
    for (std::size_t k = 0; k < 40; ++k) b.push_back(a[k] + (rng() % 3 == 0 ? 0 : rng() % 50));
    for (std::size_t k = 1; k < 40; ++k) b[k] = std::max(b[k], b[k - 1]);
    auto t = integer_targets([&](std::size_t k) { return a[k - 1]; }, [&](std::size_t k) { return b[k - 1]; }, 40);
    EXPECT_EQ(oscillation_times(t).times, scan_times(a, b)) << trial;
  }
}

TEST(Envelope, HandTrace) {
  auto t = integer_targets([](std::size_t k) { return k; }, [](std::size_t k) { return k * k; }, 150);
  auto u = build_envelope(t, oscillation_times(t));
  const double expected[] = {1, 2, 9, 9, 9, 9, 9, 9, 9, 10, 121, 121};
  for (std::size_t k = 1; k <= 12; ++k) EXPECT_NEAR(std::exp(u.value(k).value()), expected[k - 1], 1e-9) << k;
  EXPECT_EQ(u.entry(10).side, Target::a);
  EXPECT_EQ(u.entry(11).side, Target::b);
  EXPECT_EQ(u.entry(11).index, 11u);
}

TEST(Envelope, EqualTargetsGiveTheTarget) {
  auto t = integer_targets([](std::size_t k) { return 1ul << k; }, [](std::size_t k) { return 1ul << k; }, 20);
  auto u = build_envelope(t, oscillation_times(t));
  for (std::size_t k = 1; k <= 20; ++k) EXPECT_TRUE(identical(u.value(k), t.a(k)));
}

TEST(Chain, HandTrace) {
  auto t = integer_targets([](std::size_t k) { return k; }, [](std::size_t k) { return k * k; }, 150);
  auto c = build_chain(build_envelope(t, oscillation_times(t)));
  const auto v = chain_values(c);
  EXPECT_EQ(std::vector<unsigned long>(v.begin(), v.begin() + 11),
            (std::vector<unsigned long>{1, 2, 8, 8, 8, 8, 8, 8, 8, 8, 120}));
  EXPECT_EQ(c.k0, 2u);
}

TEST(Chain, PowersAndIdentity) {
  auto p = integer_targets([](std::size_t k) { return 1ul << k; }, [](std::size_t k) { return 1ul << k; }, 20);
  auto cp = build_chain(build_envelope(p, oscillation_times(p)));
  EXPECT_EQ(cp.v[0], 1);
  for (std::size_t k = 2; k <= 20; ++k) EXPECT_EQ(cp.v[k - 1], mpz_class(1ul << k));

  auto id = integer_targets([](std::size_t k) { return k; }, [](std::size_t k) { return k; }, 20);
  auto ci = build_chain(build_envelope(id, oscillation_times(id)));
  const auto vi = chain_values(ci);
  EXPECT_EQ(std::vector<unsigned long>(vi.begin(), vi.begin() + 8), (std::vector<unsigned long>{1, 2, 2, 4, 4, 4, 4, 8}));
  for (std::size_t k = 1; k <= 20; ++k) {
    EXPECT_LE(ci.v[k - 1], k);
    EXPECT_GE(2 * ci.v[k - 1], k);
  }
}

TEST(Chain, MatchesIntegerTraceOnRandomTargets) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<unsigned long> a{1}, b;
    for (std::size_t k = 1; k < 30; ++k) a.push_back(a.back() + rng() % 20);
    for (std::size_t k = 0; k < 30; ++k) b.push_back(a[k] + rng() % 200);
    for (std::size_t k = 1; k < 30; ++k) b[k] = std::max(b[k], b[k - 1]);
    auto t = integer_targets([&](std::size_t k) { return a[k - 1]; }, [&](std::size_t k) { return b[k - 1]; }, 30);
    auto u = build_envelope(t, oscillation_times(t));
    std::vector<unsigned long> ui;
    for (std::size_t k = 1; k <= 30; ++k) ui.push_back(u.entry(k).side == Target::a ? a[u.entry(k).index - 1]
                                                                                     : b[u.entry(k).index - 1]);
    EXPECT_EQ(chain_values(build_chain(u)), trace_chain(ui)) << trial;
  }
}

TEST(Chain, ApproximateModeTracksExactLogs) {
  auto t = targets_from_gauges(Gauge::power(0.5), Gauge::power(1.5), std::pow(2, 1.5), 200);
  auto u = build_envelope(t, oscillation_times(t));
  auto exact = build_chain(u, 256, ChainMode::exact);
  auto approx = build_chain(u, 256, ChainMode::approx);
  ASSERT_EQ(approx.v_log2.size(), 200u);
  EXPECT_TRUE(approx.v.empty());
  EXPECT_EQ(approx.k0, exact.k0);
  for (std::size_t k = 1; k <= 200; ++k) EXPECT_NEAR(approx.v_log2[k - 1], exact.v_log2[k - 1], 1e-6 * (1 + k));
  EXPECT_THROW(branching_from_chain(approx), InvalidParameter);
}

TEST(Chain, Deterministic) {
  auto t = targets_from_gauges(Gauge::power(0.7), Gauge::half(Gauge::power(0.7)), 1, 300);
  auto u = build_envelope(t, oscillation_times(t));
  EXPECT_EQ(build_chain(u).v, build_chain(u).v);
}

TEST(Branching, Examples) {
  DivisibilityChain c;
  c.v = {1, 2, 8, 8};
  EXPECT_EQ(branching_from_chain(c), (std::vector<mpz_class>{1, 2, 4, 1}));
  c.v = {1, 4, 8, 16};
  EXPECT_EQ(branching_from_chain(c), (std::vector<mpz_class>{1, 4, 2, 2}));
  c.v = {1, 1, 1};
  EXPECT_EQ(branching_from_chain(c), (std::vector<mpz_class>{1, 1, 1}));
  c.v = {1, 2, 3};
  EXPECT_THROW(branching_from_chain(c), InternalError);
}
