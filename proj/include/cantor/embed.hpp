#pragma once

// Embedding of the sequence space into bounded sequences with the sup norm:
// f(x) = sum_k e_{x_k} / (k 2^k), with e_i the standard unit sequences (an
// equilateral set at mutual distance 1). Distances are exact rationals.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/log_real.hpp"
#include "cantor/product.hpp"
#include "json.hpp"

namespace cantor {

struct EmbeddedPoint {
  std::map<mpz_class, mpq_class> coords;  // index i -> coefficient of e_i
  std::size_t m = 0;
};

inline EmbeddedPoint embed_prefix(const PointPrefix& x, std::size_t m) {
  if (m < x.size()) throw InvalidParameter("embed: truncation shorter than the prefix");
  if (m == 0 && x.size() > 0) throw InvalidParameter("embed: m must be positive");
  EmbeddedPoint p;
  p.m = m;
  for (std::size_t k = 1; k <= m; ++k) {
    mpq_class term(1, k);
    mpq_div_2exp(term.get_mpq_t(), term.get_mpq_t(), k);
    p.coords[x.at(k)] += term;
  }
  return p;
}

/// Sup-norm distance between two embedded points of equal truncation.
inline mpq_class embedded_distance(const EmbeddedPoint& p, const EmbeddedPoint& q) {
  if (p.m != q.m) throw InvalidParameter("embed: truncation mismatch");
  mpq_class best(0);
  auto consider = [&](const mpq_class& d) {
    mpq_class a = abs(d);
    if (a > best) best = a;
  };
  for (const auto& [i, c] : p.coords) {
    auto it = q.coords.find(i);
    consider(it == q.coords.end() ? c : c - it->second);
  }
  for (const auto& [i, c] : q.coords)
    if (!p.coords.count(i)) consider(c);
  return best;
}

struct DistortionRecord {
  std::size_t k0 = 0;
  mpq_class delta;
  mpq_class dist;
  double ratio = 1;
  bool upper_ok = true;  // dist <= 2 delta
  bool lower_ok = true;  // dist >= 2^-(k0+2) / k0^2
};

inline mpq_class distortion_lower_bound(std::size_t k0) {
  mpq_class b(1, mpz_class(static_cast<unsigned long>(k0)) * static_cast<unsigned long>(k0));
  mpq_div_2exp(b.get_mpq_t(), b.get_mpq_t(), k0 + 2);
  return b;
}

inline DistortionRecord distortion_ratio(const PointPrefix& x, const PointPrefix& y, std::size_t m) {
  DistortionRecord r;
  r.k0 = first_difference(x, y);
  if (r.k0 == 0) throw UndefinedRatio("distortion ratio of identical points");
  if (m < std::max(x.size(), y.size())) throw InvalidParameter("embed: truncation shorter than the prefixes");
  r.delta = ultrametric_distance(x, y);
  r.dist = embedded_distance(embed_prefix(x, m), embed_prefix(y, m));
  r.upper_ok = r.dist <= 2 * r.delta;
  r.lower_ok = r.dist >= distortion_lower_bound(r.k0);
  if (sgn(r.dist) > 0) {
    const LogReal ld = LogReal::log_of(r.dist, 128);
    const LogReal ldelta = LogReal::log_of(r.delta, 128);
    r.ratio = ld.value() / ldelta.value();
  } else {
    r.ratio = std::numeric_limits<double>::infinity();
  }
  return r;
}

struct DistortionBucket {
  std::size_t k0 = 0;
  std::size_t count = 0;
  double ratio_lo = 0;
  double ratio_hi = 0;
};

struct DistortionReport {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double ratio_min = 0;
  double ratio_max = 0;
  std::vector<DistortionBucket> by_k0;
  std::vector<DistortionRecord> records;

  /// max |ratio - 1| over pairs with k0 >= from.
  double max_deviation_from(std::size_t from) const {
    double d = 0;
    for (const auto& r : records)
      if (r.k0 >= from) d = std::max(d, std::fabs(r.ratio - 1));
    return d;
  }
};

/// Checks both distortion bounds for every pair with exact rationals.
inline DistortionReport verify_distortion_bounds(const std::vector<std::pair<PointPrefix, PointPrefix>>& pairs,
                                                 std::size_t m) {
  DistortionReport rep;
  std::map<std::size_t, DistortionBucket> buckets;
  for (const auto& [x, y] : pairs) {
    DistortionRecord r = distortion_ratio(x, y, m);
    if (!r.upper_ok || !r.lower_ok) ++rep.violations;
    if (rep.pairs == 0) {
      rep.ratio_min = rep.ratio_max = r.ratio;
    } else {
      rep.ratio_min = std::min(rep.ratio_min, r.ratio);
      rep.ratio_max = std::max(rep.ratio_max, r.ratio);
    }
    ++rep.pairs;
    auto [it, fresh] = buckets.try_emplace(r.k0, DistortionBucket{r.k0, 0, r.ratio, r.ratio});
    it->second.count++;
    it->second.ratio_lo = std::min(it->second.ratio_lo, r.ratio);
    it->second.ratio_hi = std::max(it->second.ratio_hi, r.ratio);
    rep.records.push_back(std::move(r));
  }
  for (auto& [k, b] : buckets) rep.by_k0.push_back(b);
  return rep;
}

/// Pairs (x, x') of prefixes of length m: x is sampled, k0 is uniform among
/// levels <= max_k0 with n_k >= 2, x' agrees with x before k0, differs at
/// k0 and is resampled after it.
inline std::vector<std::pair<PointPrefix, PointPrefix>> random_pairs(const CompactProduct& K, std::size_t count,
                                                                     std::uint64_t seed, std::size_t m,
                                                                     std::size_t max_k0) {
  if (m > K.depth()) throw OutOfDepth("random_pairs: m exceeds depth");
  std::vector<std::size_t> branching;
  for (std::size_t k = 1; k <= std::min(m, max_k0); ++k)
    if (K.n(k) >= 2) branching.push_back(k);
  if (branching.empty()) throw InvalidParameter("random_pairs: no level with n_k >= 2 inside the range");

  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(mpz_class(std::to_string(seed)));
  auto uniform = [&](const mpz_class& n) -> mpz_class { return rng.get_z_range(n); };

  std::vector<std::pair<PointPrefix, PointPrefix>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    PointPrefix x;
    for (std::size_t j = 1; j <= m; ++j) x.coords.push_back(uniform(K.n(j)) + 1);
    const std::size_t k0 =
        branching[uniform(mpz_class(static_cast<unsigned long>(branching.size()))).get_ui()];
    PointPrefix y;
    y.coords.assign(x.coords.begin(), x.coords.begin() + static_cast<std::ptrdiff_t>(k0 - 1));
    mpz_class other = uniform(K.n(k0) - 1) + 1;  // 1..n-1, skipping x_k0
    if (other >= x.coords[k0 - 1]) other += 1;
    y.coords.push_back(other);
    for (std::size_t j = k0 + 1; j <= m; ++j) y.coords.push_back(uniform(K.n(j)) + 1);
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

inline nlohmann::json distortion_report_to_json(const DistortionReport& r) {
  nlohmann::json by = nlohmann::json::array();
  for (const auto& b : r.by_k0)
    by.push_back({{"k0", b.k0}, {"count", b.count}, {"ratio_lo", b.ratio_lo}, {"ratio_hi", b.ratio_hi}});
  return {{"pairs", r.pairs}, {"violations", r.violations}, {"ratio_min", r.ratio_min}, {"ratio_max", r.ratio_max},
          {"by_k0", by}};
}

}  // namespace cantor
