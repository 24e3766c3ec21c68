#pragma once

// Hausdorff, packing and local scales of compact products for a scaling
// family, by classifying log-stream trends and bisecting on the exponent.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/gauge.hpp"
#include "cantor/log_real.hpp"
#include "cantor/measure.hpp"
#include "cantor/product.hpp"
#include "json.hpp"

namespace cantor {

enum class Verdict { zero, infinite, indeterminate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::zero:
      return "zero";
    case Verdict::infinite:
      return "infinite";
    case Verdict::indeterminate:
      return "indeterminate";
  }
  return "?";
}

/// Levels [first, last] of the product used for trend classification.
struct LevelWindow {
  std::size_t first = 1;
  std::size_t last = 0;  // 0 means the product depth
};

struct SearchInterval {
  double alpha_lo = 0.05;
  double alpha_hi = 4.0;
  double tol = 0.1;
  double slope_tol = kDefaultSlopeTolerance;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> resolve_window(const CompactProduct& K, const LevelWindow& w) {
  const std::size_t last = w.last == 0 ? K.depth() : w.last;
  if (w.first < 1 || w.first + 2 > last) throw InvalidParameter("scale window needs at least three levels");
  if (last > K.depth()) throw OutOfDepth("scale window beyond the product depth");
  return {w.first, last};
}

inline Verdict verdict_from_slope(double slope, double tol) {
  if (slope <= -tol) return Verdict::zero;
  if (slope >= tol) return Verdict::infinite;
  return Verdict::indeterminate;
}

}  // namespace detail

/// Trend of ln(v_k g(2^-(k+1))) (Hausdorff, through its minima) or
/// ln(v_k g(2^-k)) (packing, through its maxima) over the window.
inline double premeasure_stream_slope(const CompactProduct& K, const Gauge& g, PremeasureKind kind,
                                      const LevelWindow& window, unsigned prec = kDefaultPrecision) {
  auto [first, last] = detail::resolve_window(K, window);
  std::vector<double> y;
  y.reserve(last - first + 1);
  for (std::size_t k = first; k <= last; ++k)
    y.push_back((K.log_v(k) + eval_log_at_level(g, detail::cost_level(kind, k), prec)).value());
  return extremum_trend_slope(y, kind == PremeasureKind::hausdorff ? Extremum::minima : Extremum::maxima);
}

inline Verdict classify_gauge_on_product(const CompactProduct& K, const Gauge& g, PremeasureKind kind,
                                         const LevelWindow& window, double slope_tol = kDefaultSlopeTolerance,
                                         unsigned prec = kDefaultPrecision) {
  return detail::verdict_from_slope(premeasure_stream_slope(K, g, kind, window, prec), slope_tol);
}

/// Verdict on the upper density (limsup of the upper stream, through its
/// maxima) or the lower density (liminf of the lower stream, through its
/// minima): zero when it tends to 0, infinite when it diverges.
inline Verdict classify_density_on_product(const CompactProduct& K, const Gauge& g, StreamSide side,
                                           const LevelWindow& window, double slope_tol = kDefaultSlopeTolerance,
                                           unsigned prec = kDefaultPrecision) {
  auto [first, last] = detail::resolve_window(K, window);
  DensityStream s = density_ratio_stream(K, g, side, prec);
  if (s.size() < last) throw DepthLimitError("density stream truncated inside the scale window", s.size());
  std::vector<double> y;
  for (std::size_t k = first; k <= last; ++k) y.push_back(s.at(k).value());
  const double slope = extremum_trend_slope(y, side == StreamSide::upper ? Extremum::maxima : Extremum::minima);
  return detail::verdict_from_slope(slope, slope_tol);
}

// ---------------------------------------------------------------------------

struct ScaleEstimate {
  double value = 0;
  double lo = 0;
  double hi = 0;
  std::size_t depth_used = 0;
  std::vector<std::pair<double, Verdict>> trace;
  bool all_indeterminate = false;
  bool clipped = false;

  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

namespace detail {

// Threshold between a "below" class holding for small alpha and an "above"
// class holding for large alpha; anything else is indeterminate. Two
// monotone bisections bound the last alpha of the below class and the first
// of the above class; the bracket runs from the former to the latter.
template <class Classify>
ScaleEstimate threshold_search(Classify&& classify, Verdict below, Verdict above, const SearchInterval& s,
                               std::size_t depth) {
  if (!(s.alpha_lo > 0) || !(s.alpha_lo < s.alpha_hi)) throw InvalidParameter("search needs 0 < alpha_lo < alpha_hi");
  if (!(s.tol > 0)) throw InvalidParameter("search tolerance must be positive");
  ScaleEstimate est;
  est.depth_used = depth;
  auto run = [&](double a) {
    Verdict v = classify(a);
    est.trace.emplace_back(a, v);
    return v;
  };
  const double resolution = s.tol / 16;

  const Verdict v_lo = run(s.alpha_lo);
  const Verdict v_hi = run(s.alpha_hi);

  // Last alpha of the below class.
  std::optional<double> last_below;
  if (v_lo == below) {
    if (v_hi == below) {
      last_below = s.alpha_hi;
    } else {
      double a = s.alpha_lo, b = s.alpha_hi;
      while (b - a > resolution) {
        const double mid = 0.5 * (a + b);
        (run(mid) == below ? a : b) = mid;
      }
      last_below = a;
    }
  }
  // First alpha of the above class.
  std::optional<double> first_above;
  if (v_hi == above) {
    if (v_lo == above) {
      first_above = s.alpha_lo;
    } else {
      double a = s.alpha_lo, b = s.alpha_hi;
      while (b - a > resolution) {
        const double mid = 0.5 * (a + b);
        (run(mid) == above ? b : a) = mid;
      }
      first_above = b;
    }
  }

  if (!last_below && !first_above) {
    est.all_indeterminate = true;
    est.lo = s.alpha_lo;
    est.hi = s.alpha_hi;
    est.value = 0.5 * (est.lo + est.hi);
  } else if (!last_below) {
    // Nothing below the threshold inside the search interval.
    est.clipped = true;
    est.hi = *first_above;
    est.lo = *first_above == s.alpha_lo ? 0.0 : s.alpha_lo;
    est.value = est.lo == 0.0 ? 0.0 : 0.5 * (est.lo + est.hi);
  } else if (!first_above) {
    est.clipped = true;
    est.lo = *last_below;
    est.hi = s.alpha_hi;
    est.value = *last_below == s.alpha_hi ? s.alpha_hi : 0.5 * (est.lo + est.hi);
  } else {
    est.lo = *last_below;
    est.hi = *first_above;
    if (est.lo > est.hi) throw InternalError("scale classification is not monotone in alpha");
    est.value = 0.5 * (est.lo + est.hi);
  }
  return est;
}

}  // namespace detail

/// sup{alpha : H^{scl_alpha}(K) = +inf}, bracketed against inf{alpha : H = 0}.
inline ScaleEstimate estimate_hausdorff_scale(const CompactProduct& K, const ScalingFamily& fam,
                                              const SearchInterval& s, const LevelWindow& w = {},
                                              unsigned prec = kDefaultPrecision) {
  auto classify = [&](double a) {
    return classify_gauge_on_product(K, fam.member(a), PremeasureKind::hausdorff, w, s.slope_tol, prec);
  };
  return detail::threshold_search(classify, Verdict::infinite, Verdict::zero, s, detail::resolve_window(K, w).second);
}

inline ScaleEstimate estimate_packing_scale(const CompactProduct& K, const ScalingFamily& fam, const SearchInterval& s,
                                            const LevelWindow& w = {}, unsigned prec = kDefaultPrecision) {
  auto classify = [&](double a) {
    return classify_gauge_on_product(K, fam.member(a), PremeasureKind::packing, w, s.slope_tol, prec);
  };
  return detail::threshold_search(classify, Verdict::infinite, Verdict::zero, s, detail::resolve_window(K, w).second);
}

struct LocalScaleEstimate {
  ScaleEstimate lower;  // sup{alpha : upper density of scl_alpha = 0}
  ScaleEstimate upper;  // inf{alpha : lower density of scl_alpha = +inf}
};

/// Homogeneity makes both local scales independent of the point.
inline LocalScaleEstimate estimate_local_scales(const CompactProduct& K, const ScalingFamily& fam,
                                                const SearchInterval& s, const LevelWindow& w = {},
                                                unsigned prec = kDefaultPrecision) {
  const std::size_t depth = detail::resolve_window(K, w).second;
  auto upper_density = [&](double a) {
    return classify_density_on_product(K, fam.member(a), StreamSide::upper, w, s.slope_tol, prec);
  };
  auto lower_density = [&](double a) {
    return classify_density_on_product(K, fam.member(a), StreamSide::lower, w, s.slope_tol, prec);
  };
  LocalScaleEstimate out;
  out.lower = detail::threshold_search(upper_density, Verdict::zero, Verdict::infinite, s, depth);
  out.upper = detail::threshold_search(lower_density, Verdict::zero, Verdict::infinite, s, depth);
  return out;
}

// ---------------------------------------------------------------------------

struct OrderCheck {
  std::string name;
  bool holds = true;   // false only when the brackets certainly violate the order
  std::string detail;  // "strict", "overlap" or "violated"
};

namespace detail {

inline OrderCheck order_check(std::string name, const ScaleEstimate& small, const ScaleEstimate& large) {
  OrderCheck c{std::move(name), true, "strict"};
  if (small.lo > large.hi) {
    c.holds = false;
    c.detail = "violated";
  } else if (small.hi > large.lo) {
    c.detail = "overlap";
  }
  return c;
}

}  // namespace detail

/// scl_H <= scl_P, lower local <= scl_H, upper local <= scl_P, each up to
/// the bracket widths; overlapping brackets are inconclusive, not failures.
inline std::vector<OrderCheck> check_scale_order(const ScaleEstimate& hausdorff, const ScaleEstimate& packing,
                                                 const LocalScaleEstimate& local) {
  return {detail::order_check("scl_H <= scl_P", hausdorff, packing),
          detail::order_check("lower_local <= scl_H", local.lower, hausdorff),
          detail::order_check("upper_local <= scl_P", local.upper, packing)};
}

inline nlohmann::json scale_estimate_to_json(const ScaleEstimate& e) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& [a, v] : e.trace) trace.push_back({{"alpha", a}, {"verdict", to_string(v)}});
  return {{"value", e.value},
          {"bracket", {e.lo, e.hi}},
          {"depth_used", e.depth_used},
          {"all_indeterminate", e.all_indeterminate},
          {"clipped", e.clipped},
          {"classification_trace", trace}};
}

inline nlohmann::json scale_report_to_json(const ScalingFamily& fam, const ScaleEstimate& h, const ScaleEstimate& p,
                                           const LocalScaleEstimate& local, const std::vector<OrderCheck>& checks) {
  nlohmann::json order = nlohmann::json::array();
  for (const auto& c : checks) order.push_back({{"name", c.name}, {"holds", c.holds}, {"detail", c.detail}});
  return {{"family", family_to_json(fam)},
          {"scl_H", scale_estimate_to_json(h)},
          {"scl_P", scale_estimate_to_json(p)},
          {"local", {{"lower", scale_estimate_to_json(local.lower)}, {"upper", scale_estimate_to_json(local.upper)}}},
          {"order_checks", order}};
}

}  // namespace cantor
