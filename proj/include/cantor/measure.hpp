#pragma once

// Restricted Hausdorff and packing premeasures of compact products, computed
// by a level recursion and cross-checked against exhaustive enumerators.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/gauge.hpp"
#include "cantor/log_real.hpp"
#include "cantor/product.hpp"
#include "cantor/surd.hpp"
#include "json.hpp"

namespace cantor {

/// Ball levels e..D; the scale is eps = 2^-e.
struct TruncationWindow {
  std::size_t e = 0;
  std::size_t D = 0;
};

enum class PremeasureKind { hausdorff, packing };

inline const char* to_string(PremeasureKind k) { return k == PremeasureKind::hausdorff ? "hausdorff" : "packing"; }

struct PremeasureRow {
  std::size_t j = 0;
  double v_log2 = 0;
  LogReal cost_log;     // ln cost_j
  LogReal running_log;  // ln (v_j opt_j)
};

struct PremeasureValue {
  PremeasureKind kind = PremeasureKind::hausdorff;
  std::optional<DyadicSurd> exact;  // set when every cost is exact
  LogReal log_value;
  std::size_t level = 0;  // argmin (hausdorff) or argmax (packing) level
  std::vector<PremeasureRow> rows;

  bool is_rational() const { return exact && exact->is_rational(); }
};

namespace detail {

inline void check_window(const CompactProduct& K, const TruncationWindow& w) {
  if (w.e > w.D) throw InvalidParameter("window needs e <= D");
  if (w.D > K.depth()) throw OutOfDepth("window level D beyond the product depth");
}

// Hausdorff balls of level j are costed at g(2^-(j+1)), packing balls at g(2^-j).
inline DyadicLevel cost_level(PremeasureKind kind, std::size_t j) { return kind == PremeasureKind::hausdorff ? j + 1 : j; }

inline PremeasureValue premeasure_dp(const CompactProduct& K, const Gauge& g, const TruncationWindow& w,
                                     PremeasureKind kind, unsigned prec) {
  check_window(K, w);
  const bool hausdorff = kind == PremeasureKind::hausdorff;
  const std::size_t levels = w.D - w.e + 1;

  std::vector<std::optional<DyadicSurd>> cost_exact(levels);
  std::vector<LogReal> cost_log;
  cost_log.reserve(levels);
  bool all_exact = true;
  for (std::size_t j = w.e; j <= w.D; ++j) {
    cost_exact[j - w.e] = exact_gauge_value(g, cost_level(kind, j));
    all_exact = all_exact && cost_exact[j - w.e].has_value();
    cost_log.push_back(eval_log_at_level(g, cost_level(kind, j), prec));
  }

  // opt_D = cost_D; opt_j = min/max(cost_j, n_{j+1} opt_{j+1}).
  std::vector<std::optional<DyadicSurd>> opt_exact(levels);
  std::vector<LogReal> opt_log(levels, LogReal(prec));
  std::vector<std::size_t> best(levels);
  const std::size_t last = levels - 1;
  opt_exact[last] = cost_exact[last];
  opt_log[last] = cost_log[last];
  best[last] = w.D;
  for (std::size_t i = last; i-- > 0;) {
    const std::size_t j = w.e + i;
    const mpz_class& nn = K.n(j + 1);
    LogReal cand_log = LogReal::log_of(nn, prec) + opt_log[i + 1];
    bool take_child;
    if (all_exact) {
      DyadicSurd cand = DyadicSurd(mpq_class(nn)) * *opt_exact[i + 1];
      take_child = hausdorff ? cand < *cost_exact[i] : cand > *cost_exact[i];
      opt_exact[i] = take_child ? cand : *cost_exact[i];
    } else {
      take_child = hausdorff ? certainly_less(cand_log, cost_log[i]) : certainly_greater(cand_log, cost_log[i]);
    }
    opt_log[i] = hausdorff ? min(cost_log[i], cand_log) : max(cost_log[i], cand_log);
    best[i] = take_child ? best[i + 1] : j;
  }

  PremeasureValue out;
  out.kind = kind;
  const LogReal log_ve = LogReal::log_of(K.v(w.e), prec);
  if (all_exact) out.exact = DyadicSurd(mpq_class(K.v(w.e))) * *opt_exact[0];
  out.log_value = out.exact ? out.exact->log(prec) : log_ve + opt_log[0];
  out.level = best[0];
  for (std::size_t i = 0; i < levels; ++i) {
    const std::size_t j = w.e + i;
    out.rows.push_back({j, detail::log2_of(K.v(j)), cost_log[i], LogReal::log_of(K.v(j), prec) + opt_log[i]});
  }
  return out;
}

}  // namespace detail

/// inf of sum g(radius) over covers by cylinders of levels e..D.
inline PremeasureValue hausdorff_premeasure(const CompactProduct& K, const Gauge& phi, const TruncationWindow& w,
                                            unsigned prec = kDefaultPrecision) {
  return detail::premeasure_dp(K, phi, w, PremeasureKind::hausdorff, prec);
}

/// sup of sum g(radius) over disjoint families of cylinders of levels e..D.
inline PremeasureValue packing_premeasure(const CompactProduct& K, const Gauge& phi, const TruncationWindow& w,
                                          unsigned prec = kDefaultPrecision) {
  return detail::premeasure_dp(K, phi, w, PremeasureKind::packing, prec);
}

inline std::string premeasure_csv(const PremeasureValue& p) {
  std::ostringstream os;
  os.precision(17);
  os << "j,v_j_log2,cost_log,running_opt_log\n";
  for (const auto& r : p.rows) os << r.j << ',' << r.v_log2 << ',' << r.cost_log.value() << ',' << r.running_log.value() << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Exhaustive enumerators

namespace detail {

inline constexpr unsigned long kOracleLeafCap = 24;

using CountVector = std::vector<unsigned>;  // balls used per level e..D

inline unsigned long oracle_leaves(const CompactProduct& K, const TruncationWindow& w) {
  check_window(K, w);
  if (K.v(w.D) > kOracleLeafCap) throw TooLarge("oracle: more than 24 cylinders at level D");
  return K.v(w.D).get_ui();
}

inline DyadicSurd oracle_cost(const Gauge& g, std::size_t level) {
  auto c = exact_gauge_value(g, level);
  if (!c) throw InvalidParameter("oracle needs a gauge with exact values (dyadic power exponents)");
  return *c;
}

inline DyadicSurd evaluate_counts(const std::set<CountVector>& families, const std::vector<DyadicSurd>& cost,
                                  bool minimize) {
  std::optional<DyadicSurd> best;
  for (const auto& counts : families) {
    DyadicSurd total(0L);
    for (std::size_t i = 0; i < counts.size(); ++i)
      if (counts[i]) total = total + DyadicSurd(mpq_class(counts[i])) * cost[i];
    if (!best || (minimize ? total < *best : total > *best)) best = total;
  }
  return *best;
}

// Leaves of level D are numbered 0..v_D-1 in lexicographic order; the level-j
// ancestor of leaf i covers the block of v_D / v_j leaves containing i. Covers
// are built by repeatedly choosing a ball for the lowest uncovered leaf;
// count vectors reachable from each position are memoised.
inline const std::set<CountVector>& enumerate_covers(unsigned long next, unsigned long leaves, const CompactProduct& K,
                                                     const TruncationWindow& w,
                                                     std::map<unsigned long, std::set<CountVector>>& memo) {
  if (auto it = memo.find(next); it != memo.end()) return it->second;
  std::set<CountVector> out;
  if (next >= leaves) {
    out.insert(CountVector(w.D - w.e + 1, 0));
  } else {
    for (std::size_t j = w.e; j <= w.D; ++j) {
      const unsigned long block = leaves / K.v(j).get_ui();
      const unsigned long end = (next / block + 1) * block;
      for (CountVector c : enumerate_covers(end, leaves, K, w, memo)) {
        ++c[j - w.e];
        out.insert(std::move(c));
      }
    }
  }
  return memo.emplace(next, std::move(out)).first->second;
}

// All antichains (disjoint ball families) inside the subtree of a level-j node.
inline std::set<CountVector> enumerate_packs(std::size_t j, const CompactProduct& K, const TruncationWindow& w) {
  const std::size_t width = w.D - w.e + 1;
  std::set<CountVector> here{CountVector(width, 0)};
  if (j < w.D) {
    const unsigned long children = K.n(j + 1).get_ui();
    const std::set<CountVector> child = enumerate_packs(j + 1, K, w);
    for (unsigned long c = 0; c < children; ++c) {
      std::set<CountVector> next;
      for (const auto& a : here)
        for (const auto& b : child) {
          CountVector s(width);
          for (std::size_t i = 0; i < width; ++i) s[i] = a[i] + b[i];
          next.insert(std::move(s));
        }
      here = std::move(next);
    }
  }
  if (j >= w.e) {
    CountVector self(width, 0);
    self[j - w.e] = 1;
    here.insert(self);
  }
  return here;
}

}  // namespace detail

/// Minimal cover cost found by enumerating every cover of the level-D leaves.
inline DyadicSurd cover_oracle(const CompactProduct& K, const Gauge& phi, const TruncationWindow& w) {
  const unsigned long leaves = detail::oracle_leaves(K, w);
  std::vector<DyadicSurd> cost;
  for (std::size_t j = w.e; j <= w.D; ++j) cost.push_back(detail::oracle_cost(phi, j + 1));
  std::map<unsigned long, std::set<detail::CountVector>> memo;
  return detail::evaluate_counts(detail::enumerate_covers(0, leaves, K, w, memo), cost, true);
}

/// Maximal packing cost over every disjoint family of balls.
inline DyadicSurd pack_oracle(const CompactProduct& K, const Gauge& phi, const TruncationWindow& w) {
  detail::oracle_leaves(K, w);
  std::vector<DyadicSurd> cost;
  for (std::size_t j = w.e; j <= w.D; ++j) cost.push_back(detail::oracle_cost(phi, j));
  // Every node at level 0 is the root; its subtree is the whole product.
  return detail::evaluate_counts(detail::enumerate_packs(0, K, w), cost, false);
}

// ---------------------------------------------------------------------------
// Measures through the density identities

enum class MeasureStatus { finite, zero, infinite };

inline const char* to_string(MeasureStatus s) {
  switch (s) {
    case MeasureStatus::finite:
      return "finite";
    case MeasureStatus::zero:
      return "zero";
    case MeasureStatus::infinite:
      return "infinite";
  }
  return "?";
}

inline constexpr double kDefaultSlopeTolerance = 0.01;

struct MeasureEstimate {
  LogReal value_log;  // ln of 1 / (window extremum of the density stream)
  MeasureStatus status = MeasureStatus::finite;
  double trend_slope = 0;  // nats per level of the stream extrema
  bool degenerate() const { return status != MeasureStatus::finite; }
};

struct MeasureReport {
  std::size_t first = 1;
  std::size_t last = 1;
  MeasureEstimate hausdorff;
  MeasureEstimate packing;
};

namespace detail {

inline std::vector<double> stream_values(const DensityStream& s, std::size_t first, std::size_t last) {
  std::vector<double> y;
  for (std::size_t k = first; k <= last; ++k) y.push_back(s.at(k).value());
  return y;
}

// A density diverging to +inf means measure 0, to 0 means measure +inf.
inline MeasureStatus status_from_density_slope(double slope, double tol) {
  if (slope >= tol) return MeasureStatus::zero;
  if (slope <= -tol) return MeasureStatus::infinite;
  return MeasureStatus::finite;
}

}  // namespace detail

/// H = mu(K) / upper density of phi, P = mu(K) / lower density of psi, each
/// read off the window [first, last] of the corresponding stream.
inline MeasureReport measure_via_density(const CompactProduct& K, const Gauge& phi, const Gauge& psi,
                                         std::size_t first, std::size_t last,
                                         double slope_tol = kDefaultSlopeTolerance,
                                         unsigned prec = kDefaultPrecision) {
  if (first < 1 || first > last) throw InvalidParameter("measure: empty window");
  if (last > K.depth()) throw OutOfDepth("measure: window beyond the product depth");
  MeasureReport r;
  r.first = first;
  r.last = last;

  DensityStream up = density_ratio_stream(K, phi, StreamSide::upper, prec);
  DensityStream lo = density_ratio_stream(K, psi, StreamSide::lower, prec);
  if (up.size() < last || lo.size() < last) throw DepthLimitError("measure: density stream truncated inside the window", 0);

  r.hausdorff.value_log = -window_limsup(up, first, last);
  r.packing.value_log = -window_liminf(lo, first, last);
  if (last - first + 1 >= 2) {
    r.hausdorff.trend_slope = extremum_trend_slope(detail::stream_values(up, first, last), Extremum::maxima);
    r.packing.trend_slope = extremum_trend_slope(detail::stream_values(lo, first, last), Extremum::minima);
    r.hausdorff.status = detail::status_from_density_slope(r.hausdorff.trend_slope, slope_tol);
    r.packing.status = detail::status_from_density_slope(r.packing.trend_slope, slope_tol);
  }
  return r;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json surd_to_json(const DyadicSurd& s) {
  if (s.is_rational()) {
    const mpq_class& q = s.rational();
    return {{"numerator", q.get_num().get_str()}, {"denominator", q.get_den().get_str()}};
  }
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t r = 0; r < s.coefficients().size(); ++r) {
    const mpq_class& c = s.coefficients()[r];
    if (sgn(c) == 0) continue;
    terms.push_back({{"numerator", c.get_num().get_str()},
                     {"denominator", c.get_den().get_str()},
                     {"power_of_two", std::to_string(r) + "/" + std::to_string(s.root_index())}});
  }
  return {{"terms", terms}};
}

inline nlohmann::json premeasure_to_json(const PremeasureValue& p) {
  nlohmann::json j{{"kind", to_string(p.kind)},
                   {"value_log", p.log_value.value()},
                   {"error_bound", p.log_value.error_bound()},
                   {"level", p.level}};
  if (p.exact) j["exact"] = surd_to_json(*p.exact);
  return j;
}

inline nlohmann::json measure_report_to_json(const MeasureReport& r) {
  auto side = [](const MeasureEstimate& m) {
    return nlohmann::json{{"value_log", m.value_log.value()},
                          {"error_bound", m.value_log.error_bound()},
                          {"status", m.degenerate() ? "degenerate" : "finite"},
                          {"trend", to_string(m.status)},
                          {"trend_slope", m.trend_slope}};
  };
  return {{"hausdorff", side(r.hausdorff)}, {"packing", side(r.packing)}, {"window", {r.first, r.last}}};
}

}  // namespace cantor
