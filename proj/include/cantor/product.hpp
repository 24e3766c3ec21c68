#pragma once

// Depth-truncated compact products K = prod_k {1, ..., n_k} with the
// ultrametric 2^-chi, the uniform product measure, and its density streams.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/gauge.hpp"
#include "cantor/log_real.hpp"
#include "cantor/seqbuild.hpp"
#include "json.hpp"

namespace cantor {

class CompactProduct {
 public:
  CompactProduct() : v_{mpz_class(1)}, log_v_{LogReal(kDefaultPrecision)} {}

  explicit CompactProduct(std::vector<mpz_class> n) : n_(std::move(n)) {
    v_.reserve(n_.size() + 1);
    v_.emplace_back(1);
    for (const auto& f : n_) {
      if (sgn(f) <= 0) throw InvalidParameter("product: branching factors must be positive");
      v_.push_back(v_.back() * f);
    }
    log_v_.reserve(v_.size());
    for (const auto& x : v_) log_v_.push_back(LogReal::log_of(x, kDefaultPrecision));
  }

  static CompactProduct from_factors(const std::vector<unsigned long>& n) {
    std::vector<mpz_class> z;
    z.reserve(n.size());
    for (auto f : n) z.emplace_back(f);
    return CompactProduct(std::move(z));
  }

  static CompactProduct constant(unsigned long factor, std::size_t depth) {
    return from_factors(std::vector<unsigned long>(depth, factor));
  }

  static CompactProduct from_chain(const DivisibilityChain& c) { return CompactProduct(branching_from_chain(c)); }

  std::size_t depth() const noexcept { return n_.size(); }

  /// n_k, 1-based.
  const mpz_class& n(std::size_t k) const {
    if (k < 1 || k > depth()) throw OutOfDepth("product: factor index " + std::to_string(k) + " out of range");
    return n_[k - 1];
  }
  /// v_k = n_1 ... n_k with v_0 = 1.
  const mpz_class& v(std::size_t k) const {
    if (k > depth()) throw OutOfDepth("product: level " + std::to_string(k) + " beyond depth " + std::to_string(depth()));
    return v_[k];
  }
  /// ln v_k at the default precision.
  const LogReal& log_v(std::size_t k) const {
    if (k > depth()) throw OutOfDepth("product: level " + std::to_string(k) + " beyond depth " + std::to_string(depth()));
    return log_v_[k];
  }
  const std::vector<mpz_class>& factors() const noexcept { return n_; }

 private:
  std::vector<mpz_class> n_;
  std::vector<mpz_class> v_;
  std::vector<LogReal> log_v_;
};

/// Finite prefix x_1..x_m of a point of K; coordinates past m are 1.
struct PointPrefix {
  std::vector<mpz_class> coords;

  std::size_t size() const noexcept { return coords.size(); }
  mpz_class at(std::size_t j) const { return j >= 1 && j <= coords.size() ? coords[j - 1] : mpz_class(1); }
};

inline PointPrefix make_prefix(std::initializer_list<unsigned long> xs) {
  PointPrefix p;
  for (auto x : xs) p.coords.emplace_back(x);
  return p;
}

inline void validate_prefix(const CompactProduct& K, const PointPrefix& x) {
  if (x.size() > K.depth()) throw OutOfDepth("prefix longer than the product depth");
  for (std::size_t j = 1; j <= x.size(); ++j)
    if (x.coords[j - 1] < 1 || x.coords[j - 1] > K.n(j))
      throw InvalidParameter("prefix coordinate " + std::to_string(j) + " outside {1, ..., n_j}");
}

/// chi(x, y): first differing index under the tail convention, 0 if equal.
inline std::size_t first_difference(const PointPrefix& x, const PointPrefix& y) {
  const std::size_t m = std::max(x.size(), y.size());
  for (std::size_t j = 1; j <= m; ++j)
    if (x.at(j) != y.at(j)) return j;
  return 0;
}

inline mpq_class ultrametric_distance(const PointPrefix& x, const PointPrefix& y) {
  const std::size_t chi = first_difference(x, y);
  if (chi == 0) return 0;
  mpq_class d(1);
  mpz_mul_2exp(d.get_den_mpz_t(), d.get_den_mpz_t(), chi);
  return d;
}

/// mu(B) for any ball of radius in (2^-(k+1), 2^-k].
inline mpq_class ball_mass(const CompactProduct& K, std::size_t k) {
  if (k > K.depth()) throw OutOfDepth("ball_mass: level beyond depth");
  return mpq_class(mpz_class(1), K.v(k));
}

/// The k with eps in (2^-(k+1), 2^-k].
inline std::size_t dyadic_bracket(const mpq_class& eps) {
  if (sgn(eps) <= 0) throw InvalidParameter("eps must be positive");
  if (eps > 1) throw InvalidParameter("eps must be at most 1");
  std::size_t k = 0;
  mpq_class lower(1, 2);
  while (!(eps > lower)) {
    ++k;
    lower /= 2;
  }
  return k;
}

inline mpz_class cover_number(const CompactProduct& K, const mpq_class& eps) {
  const std::size_t k = dyadic_bracket(eps);
  if (k > K.depth()) throw OutOfDepth("cover_number: eps below 2^-(depth+1)");
  return K.v(k);
}

// ---------------------------------------------------------------------------
// Density streams

enum class StreamSide { lower, upper };

inline const char* to_string(StreamSide s) { return s == StreamSide::lower ? "lower" : "upper"; }

/// ratio_k = 1 / (v_k g(2^-k)) (lower) or 1 / (v_k g(2^-(k+1))) (upper), k = 1..
struct DensityStream {
  StreamSide side = StreamSide::lower;
  Gauge gauge = Gauge::power(1);
  std::vector<LogReal> ratios;  // ratios[k-1] = ln ratio_k
  bool truncated = false;

  std::size_t size() const noexcept { return ratios.size(); }
  const LogReal& at(std::size_t k) const {
    if (k < 1 || k > ratios.size()) throw OutOfDepth("density stream index out of range");
    return ratios[k - 1];
  }
};

inline DensityStream density_ratio_stream(const CompactProduct& K, const Gauge& g, StreamSide side,
                                          unsigned prec = kDefaultPrecision) {
  if (K.depth() < 1) throw InvalidParameter("density stream needs depth >= 1");
  DensityStream s{side, g, {}, false};
  s.ratios.reserve(K.depth());
  for (std::size_t k = 1; k <= K.depth(); ++k) {
    const DyadicLevel level = side == StreamSide::lower ? k : k + 1;
    try {
      LogReal lv = prec == kDefaultPrecision ? K.log_v(k) : LogReal::log_of(K.v(k), prec);
      s.ratios.push_back(-(lv + eval_log_at_level(g, level, prec)));
    } catch (const DepthLimitError&) {
      s.truncated = true;
      break;
    }
  }
  return s;
}

inline LogReal window_limsup(const DensityStream& s, std::size_t first, std::size_t last) {
  if (first < 1 || first > last) throw InvalidParameter("empty window");
  if (last > s.size()) throw OutOfDepth("window extends past the stream");
  LogReal r = s.at(first);
  for (std::size_t k = first + 1; k <= last; ++k) r = max(r, s.at(k));
  return r;
}

inline LogReal window_liminf(const DensityStream& s, std::size_t first, std::size_t last) {
  if (first < 1 || first > last) throw InvalidParameter("empty window");
  if (last > s.size()) throw OutOfDepth("window extends past the stream");
  LogReal r = s.at(first);
  for (std::size_t k = first + 1; k <= last; ++k) r = min(r, s.at(k));
  return r;
}

inline std::string density_stream_csv(const DensityStream& s) {
  std::ostringstream os;
  os.precision(17);
  os << "k,log_ratio,error_bound\n";
  for (std::size_t k = 1; k <= s.size(); ++k) os << k << ',' << s.at(k).value() << ',' << s.at(k).error_bound() << '\n';
  return os.str();
}

enum class Extremum { minima, maxima };

/// Least-squares slope (per level) through the interior local extrema of `y`
/// when there are at least two of them, otherwise through every point.
inline double extremum_trend_slope(const std::vector<double>& y, Extremum which) {
  if (y.size() < 2) throw InvalidParameter("trend needs at least two points");
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const bool hit = which == Extremum::minima ? (y[i] <= y[i - 1] && y[i] <= y[i + 1])
                                               : (y[i] >= y[i - 1] && y[i] >= y[i + 1]);
    if (hit) idx.push_back(i);
  }
  if (idx.size() < 2) {
    idx.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) idx[i] = i;
  }
  double mx = 0, my = 0;
  for (auto i : idx) {
    mx += static_cast<double>(i);
    my += y[i];
  }
  mx /= static_cast<double>(idx.size());
  my /= static_cast<double>(idx.size());
  double sxy = 0, sxx = 0;
  for (auto i : idx) {
    sxy += (static_cast<double>(i) - mx) * (y[i] - my);
    sxx += (static_cast<double>(i) - mx) * (static_cast<double>(i) - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

// ---------------------------------------------------------------------------
// Sampling

/// Coordinates 1..m drawn independently and uniformly (Mersenne Twister).
inline PointPrefix sample_point(const CompactProduct& K, std::uint64_t seed, std::size_t m) {
  if (m > K.depth()) throw OutOfDepth("sample_point: m exceeds depth");
  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(mpz_class(std::to_string(seed)));
  PointPrefix p;
  p.coords.reserve(m);
  for (std::size_t j = 1; j <= m; ++j) p.coords.push_back(rng.get_z_range(K.n(j)) + 1);
  return p;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline nlohmann::json integer_json(const mpz_class& z) {
  if (mpz_sizeinbase(z.get_mpz_t(), 2) <= 53) return nlohmann::json(z.get_ui());
  return nlohmann::json(z.get_str());
}

inline mpz_class integer_from_json(const nlohmann::json& j) {
  mpz_class z;
  if (j.is_number_unsigned() || (j.is_number_integer() && j.get<long long>() >= 0)) {
    z = std::to_string(j.get<unsigned long long>());
  } else if (j.is_string()) {
    if (z.set_str(j.get<std::string>(), 10) != 0) throw InvalidParameter("malformed integer string");
  } else {
    throw InvalidParameter("expected a non-negative integer or decimal string");
  }
  return z;
}

}  // namespace detail

inline nlohmann::json product_to_json(const CompactProduct& K) {
  nlohmann::json n = nlohmann::json::array();
  for (const auto& f : K.factors()) n.push_back(detail::integer_json(f));
  return {{"n", n}, {"depth", K.depth()}};
}

/// Accepts a product file or a construction report (both carry "n").
inline CompactProduct product_from_json(const nlohmann::json& j) {
  const auto& n = detail::require(j, "n");
  if (!n.is_array()) throw InvalidParameter("field 'n' must be an array");
  std::vector<mpz_class> f;
  f.reserve(n.size());
  for (const auto& x : n) {
    if (x.is_null()) throw InvalidParameter("branching factor too large to serialize (approximate report)");
    f.push_back(detail::integer_from_json(x));
  }
  if (j.contains("depth") && (!j["depth"].is_number_integer() || j["depth"].get<long long>() != static_cast<long long>(f.size())))
    throw InvalidParameter("field 'depth' does not match the length of 'n'");
  return CompactProduct(std::move(f));
}

}  // namespace cantor
