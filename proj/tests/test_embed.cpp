#include <gtest/gtest.h>

#include <cmath>

#include "cantor/embed.hpp"

using namespace cantor;

TEST(EmbedPrefix, Examples) {
  auto p = embed_prefix(make_prefix({1}), 3);
  EXPECT_EQ(p.coords.size(), 1u);
  EXPECT_EQ(p.coords[mpz_class(1)], mpq_class(2, 3));

  auto q = embed_prefix(make_prefix({2, 1}), 2);
  EXPECT_EQ(q.coords[mpz_class(2)], mpq_class(1, 2));
  EXPECT_EQ(q.coords[mpz_class(1)], mpq_class(1, 8));

  EXPECT_THROW(embed_prefix(make_prefix({1}), 0), InvalidParameter);
  EXPECT_NO_THROW(embed_prefix(PointPrefix{}, 0));
}

TEST(EmbeddedDistance, Examples) {
  auto a = embed_prefix(make_prefix({1, 2}), 4);
  EXPECT_EQ(embedded_distance(a, a), 0);
  EXPECT_EQ(embedded_distance(embed_prefix(make_prefix({1}), 1), embed_prefix(make_prefix({2}), 1)), mpq_class(1, 2));
  EXPECT_EQ(embedded_distance(embed_prefix(make_prefix({1, 1}), 2), embed_prefix(make_prefix({1, 2}), 2)),
            mpq_class(1, 8));
  EXPECT_THROW(embedded_distance(embed_prefix(make_prefix({1}), 1), embed_prefix(make_prefix({1}), 2)),
               InvalidParameter);
}

TEST(EmbeddedDistance, UnitSequencesAreEquilateral) {
  for (unsigned long i = 1; i <= 6; ++i)
    for (unsigned long j = i + 1; j <= 6; ++j) {
      EmbeddedPoint p, q;
      p.coords[mpz_class(i)] = 1;
      q.coords[mpz_class(j)] = 1;
      EXPECT_EQ(embedded_distance(p, q), 1);
    }
}

TEST(DistortionRatio, Examples) {
  auto r1 = distortion_ratio(make_prefix({1}), make_prefix({2}), 1);
  EXPECT_EQ(r1.k0, 1u);
  EXPECT_EQ(r1.dist, mpq_class(1, 2));
  EXPECT_DOUBLE_EQ(r1.ratio, 1.0);
  EXPECT_EQ(distortion_lower_bound(1), mpq_class(1, 8));

  auto r2 = distortion_ratio(make_prefix({1, 1}), make_prefix({1, 2}), 2);
  EXPECT_EQ(r2.dist, mpq_class(1, 8));
  EXPECT_NEAR(r2.ratio, 1.5, 1e-15);
  EXPECT_EQ(distortion_lower_bound(2), mpq_class(1, 64));
  EXPECT_TRUE(r2.upper_ok && r2.lower_ok);

  EXPECT_THROW(distortion_ratio(make_prefix({1, 2}), make_prefix({1, 2, 1}), 3), UndefinedRatio);
}

TEST(DistortionRatio, EnvelopeAndBoundsOnRandomPairs) {
  auto K = CompactProduct::constant(3, 30);
  auto pairs = random_pairs(K, 300, 7, 30, 30);
  auto rep = verify_distortion_bounds(pairs, 30);
  EXPECT_EQ(rep.violations, 0u);
  EXPECT_EQ(rep.pairs, 300u);
  for (const auto& r : rep.records) {
    const double k0 = static_cast<double>(r.k0);
    EXPECT_GE(r.ratio, (k0 - 1) / k0 - 1e-12);
    EXPECT_LE(r.ratio, (k0 + 2 + 2 * std::log2(k0)) / k0 + 1e-12);
    EXPECT_GT(r.dist, 0);
  }
}

TEST(RandomPairs, DeterministicAndValid) {
  auto K = CompactProduct::from_factors({2, 1, 3, 4, 1, 2, 5, 2});
  auto a = random_pairs(K, 50, 99, 8, 8);
  auto b = random_pairs(K, 50, 99, 8, 8);
  ASSERT_EQ(a.size(), 50u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].first.coords, b[i].first.coords);
    EXPECT_EQ(a[i].second.coords, b[i].second.coords);
    validate_prefix(K, a[i].first);
    validate_prefix(K, a[i].second);
    const std::size_t k0 = first_difference(a[i].first, a[i].second);
    EXPECT_GE(K.n(k0), 2);
  }
  EXPECT_THROW(random_pairs(CompactProduct::constant(1, 5), 3, 1, 5, 5), InvalidParameter);
  EXPECT_THROW(random_pairs(K, 3, 1, 9, 9), OutOfDepth);
}

TEST(DistortionReport, JsonShape) {
  auto K = CompactProduct::constant(4, 20);
  auto rep = verify_distortion_bounds(random_pairs(K, 40, 3, 20, 20), 20);
  auto j = distortion_report_to_json(rep);
  EXPECT_EQ(j["pairs"], 40);
  EXPECT_EQ(j["violations"], 0);
  EXPECT_FALSE(j["by_k0"].empty());
  EXPECT_TRUE(j["by_k0"][0].contains("ratio_lo"));
}
