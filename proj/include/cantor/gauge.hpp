#pragma once

// Hausdorff functions (gauges) evaluated in the log domain at dyadic radii
// eps = 2^-k, plus the scaling families built from them.

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/log_real.hpp"
#include "json.hpp"

namespace cantor {

/// Dyadic scale level k, standing for the radius 2^-k.
using DyadicLevel = std::size_t;

class Gauge {
 public:
  enum class Kind { power, iterated, scaled, half };

  /// eps -> eps^alpha.
  static Gauge power(double alpha) {
    if (!(alpha > 0) || !std::isfinite(alpha)) throw InvalidParameter("power gauge: alpha must be positive");
    Gauge g(Kind::power);
    g.alpha_ = alpha;
    return g;
  }

  /// eps -> 1 / exp^{p}(alpha * log_+^{q}(1/eps)).
  static Gauge iterated(int p, int q, double alpha) {
    if (p < 1 || q < 1) throw InvalidParameter("iterated gauge: p and q must be >= 1");
    if (!(alpha > 0) || !std::isfinite(alpha)) throw InvalidParameter("iterated gauge: alpha must be positive");
    Gauge g(Kind::iterated);
    g.p_ = p;
    g.q_ = q;
    g.alpha_ = alpha;
    return g;
  }

  /// eps -> c * inner(eps).
  static Gauge scaled(Gauge inner, double c) {
    if (!(c > 0) || !std::isfinite(c)) throw InvalidParameter("scaled gauge: c must be positive");
    Gauge g(Kind::scaled);
    g.c_ = c;
    g.inner_ = std::make_shared<const Gauge>(std::move(inner));
    return g;
  }

  /// eps -> inner(eps / 2).
  static Gauge half(Gauge inner) {
    Gauge g(Kind::half);
    g.inner_ = std::make_shared<const Gauge>(std::move(inner));
    return g;
  }

  Kind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  int p() const noexcept { return p_; }
  int q() const noexcept { return q_; }
  double c() const noexcept { return c_; }
  const Gauge& inner() const {
    if (!inner_) throw InvalidParameter("gauge has no inner gauge");
    return *inner_;
  }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case Kind::power:
        os << "power(" << alpha_ << ")";
        break;
      case Kind::iterated:
        os << "iterated(" << p_ << "," << q_ << "," << alpha_ << ")";
        break;
      case Kind::scaled:
        os << "scaled(" << inner_->to_string() << "," << c_ << ")";
        break;
      case Kind::half:
        os << "half(" << inner_->to_string() << ")";
        break;
    }
    return os.str();
  }

  friend bool operator==(const Gauge& a, const Gauge& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
      case Kind::power:
        return a.alpha_ == b.alpha_;
      case Kind::iterated:
        return a.p_ == b.p_ && a.q_ == b.q_ && a.alpha_ == b.alpha_;
      case Kind::scaled:
        return a.c_ == b.c_ && *a.inner_ == *b.inner_;
      case Kind::half:
        return *a.inner_ == *b.inner_;
    }
    return false;
  }

 private:
  explicit Gauge(Kind k) : kind_(k) {}

  Kind kind_;
  double alpha_ = 0;
  int p_ = 0;
  int q_ = 0;
  double c_ = 1;
  std::shared_ptr<const Gauge> inner_;
};

inline Gauge make_power_gauge(double alpha) { return Gauge::power(alpha); }
inline Gauge make_iterated_gauge(int p, int q, double alpha) { return Gauge::iterated(p, q, alpha); }

namespace detail {

inline LogReal eval_log_unchecked(const Gauge& g, DyadicLevel k, unsigned prec) {
  switch (g.kind()) {
    case Gauge::Kind::power: {
      // -alpha * k * ln 2; alpha * k is exact at >= 128 bits.
      LogReal ak = LogReal::exact(g.alpha(), std::max(prec, 128u)) *
                   LogReal::from_mpz(mpz_class(static_cast<unsigned long>(k)), std::max(prec, 128u));
      return -(ak.rounded(prec) * LogReal::ln2(prec));
    }
    case Gauge::Kind::iterated: {
      LogReal x(prec);  // log_+(2^k) = k ln 2, and 0 at k = 0
      if (k > 0) x = LogReal::from_mpz(mpz_class(static_cast<unsigned long>(k)), prec) * LogReal::ln2(prec);
      for (int i = 1; i < g.q(); ++i) x = x.log_plus();
      LogReal y = x * LogReal::exact(g.alpha(), std::max(prec, 64u));
      for (int i = 1; i < g.p(); ++i) y = y.exp();
      return -y.rounded(prec);
    }
    case Gauge::Kind::scaled:
      return LogReal::log_of(g.c(), prec) + eval_log_unchecked(g.inner(), k, prec);
    case Gauge::Kind::half:
      return eval_log_unchecked(g.inner(), k + 1, prec);
  }
  throw InternalError("unknown gauge kind");
}

inline bool within_budget(const LogReal& r, unsigned prec) {
  return r.is_finite() && r.radius_below_pow2(-static_cast<long>(prec / 2));
}

}  // namespace detail

/// Deepest level whose evaluation stays inside the error budget at `prec`.
/// Returns nullopt when even level 0 fails.
inline std::optional<DyadicLevel> max_usable_level(const Gauge& g, DyadicLevel below, unsigned prec) {
  if (below == 0 || !detail::within_budget(detail::eval_log_unchecked(g, 0, prec), prec)) return std::nullopt;
  DyadicLevel lo = 0, hi = below;  // lo works, hi fails
  while (hi - lo > 1) {
    DyadicLevel mid = lo + (hi - lo) / 2;
    if (detail::within_budget(detail::eval_log_unchecked(g, mid, prec), prec))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

/// Enclosure of ln g(2^-k) at `prec` bits. Throws DepthLimitError once the
/// enclosure radius reaches 2^(-prec/2).
inline LogReal eval_log_at_level(const Gauge& g, DyadicLevel k, unsigned prec = kDefaultPrecision) {
  if (prec < 16) throw InvalidParameter("precision must be at least 16 bits");
  LogReal r = detail::eval_log_unchecked(g, k, prec);
  if (!detail::within_budget(r, prec)) {
    auto safe = max_usable_level(g, k, prec);
    std::ostringstream os;
    os << "gauge " << g.to_string() << " cannot be enclosed at level " << k << " with " << prec << " bits";
    if (safe) os << "; deepest usable level is " << *safe;
    throw DepthLimitError(os.str(), safe.value_or(0));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Domination  psi(2 eps) <= C phi(eps)

enum class DominationStatus { holds, fails, indeterminate };

inline const char* to_string(DominationStatus s) {
  switch (s) {
    case DominationStatus::holds:
      return "holds";
    case DominationStatus::fails:
      return "fails";
    case DominationStatus::indeterminate:
      return "indeterminate";
  }
  return "?";
}

struct DominationCertificate {
  LogReal log_C;  // enclosure of ln max_k psi(2^-(k-1)) / phi(2^-k)
  double C = 0;   // upper end of exp(log_C), rounded up to a double
  std::size_t depth_checked = 0;
  DominationStatus status = DominationStatus::indeterminate;
  std::size_t fallback_steps = 0;
};

/// Candidate constant C over levels 1..depth. The verdict looks at the last
/// third of the log-ratio sequence: strictly increasing everywhere there
/// means the ratio has not stabilised and domination fails.
inline DominationCertificate check_domination(const Gauge& phi, const Gauge& psi, std::size_t depth,
                                              unsigned prec = kDefaultPrecision) {
  if (depth < 2) throw InvalidParameter("check_domination: depth must be >= 2");
  auto ratio = [&](std::size_t k, unsigned p) { return eval_log_at_level(psi, k - 1, p) - eval_log_at_level(phi, k, p); };

  DominationCertificate cert;
  cert.depth_checked = depth;
  cert.log_C = ratio(1, prec);
  for (std::size_t k = 2; k <= depth; ++k) cert.log_C = max(cert.log_C, ratio(k, prec));

  std::size_t first = depth - depth / 3;
  if (first >= depth) first = depth - 1;
  std::size_t increasing = 0, not_increasing = 0;
  for (std::size_t k = first; k < depth; ++k) {
    Decision d = decide_greater([&](unsigned p) { return std::pair{ratio(k + 1, p), ratio(k, p)}; }, prec);
    if (d == Decision::greater)
      ++increasing;
    else if (d == Decision::not_greater)
      ++not_increasing;
    else
      ++cert.fallback_steps;
  }
  if (not_increasing == 0 && cert.fallback_steps == 0)
    cert.status = DominationStatus::fails;
  else if (not_increasing > 0 || increasing == 0)
    cert.status = DominationStatus::holds;
  else
    cert.status = DominationStatus::indeterminate;

  BigFloat c(53);
  mpfr_exp(c.get(), cert.log_C.hi().get(), MPFR_RNDU);
  cert.C = c.to_double(MPFR_RNDU);
  return cert;
}

// ---------------------------------------------------------------------------
// Scaling families

class ScalingFamily {
 public:
  enum class Kind { power, iterated };

  static ScalingFamily power() { return ScalingFamily(Kind::power, 1, 1); }
  static ScalingFamily iterated(int p, int q) {
    if (p < 1 || q < 1) throw InvalidParameter("iterated family: p and q must be >= 1");
    return ScalingFamily(Kind::iterated, p, q);
  }

  Kind kind() const noexcept { return kind_; }
  int p() const noexcept { return p_; }
  int q() const noexcept { return q_; }

  Gauge member(double alpha) const {
    if (!(alpha > 0)) throw InvalidParameter("scaling member: alpha must be positive");
    return kind_ == Kind::power ? Gauge::power(alpha) : Gauge::iterated(p_, q_, alpha);
  }

  std::string to_string() const {
    if (kind_ == Kind::power) return "power";
    return "iterated(" + std::to_string(p_) + "," + std::to_string(q_) + ")";
  }

 private:
  ScalingFamily(Kind k, int p, int q) : kind_(k), p_(p), q_(q) {}
  Kind kind_;
  int p_;
  int q_;
};

inline Gauge scaling_member(const ScalingFamily& s, double alpha) { return s.member(alpha); }

struct SeparationTrend {
  bool composed_decreasing = false;  // ln scl_b(2^-k) - ln scl_a(2^-ceil(lambda k))
  bool power_decreasing = false;     // ln scl_b(2^-k) - lambda ln scl_a(2^-k)
  std::size_t first_level = 0;
  std::size_t last_level = 0;
  bool separated() const { return composed_decreasing && power_decreasing; }
};

namespace detail {

// Non-increasing step by step (ties resolved "not greater") with a certain
// net decrease between the ends.
template <class Seq>
bool trend_decreasing(Seq&& seq, std::size_t first, std::size_t last, unsigned prec) {
  for (std::size_t k = first; k < last; ++k) {
    if (decide_greater([&](unsigned p) { return std::pair{seq(k + 1, p), seq(k, p)}; }, prec) == Decision::greater)
      return false;
  }
  return certainly_less(seq(last, prec), seq(first, prec));
}

}  // namespace detail

/// Finite-depth check of the two separation conditions of a scaling family,
/// on the final half of levels 1..depth.
inline SeparationTrend scaling_separation_trend(const ScalingFamily& s, double alpha, double beta, double lambda,
                                                std::size_t depth, unsigned prec = kDefaultPrecision) {
  if (!(beta > 0) || !(alpha > 0)) throw InvalidParameter("separation: alpha and beta must be positive");
  if (!(lambda > 1)) throw InvalidParameter("separation: lambda must exceed 1");
  if (depth < 4) throw InvalidParameter("separation: depth must be >= 4");
  const Gauge ga = s.member(alpha);
  const Gauge gb = s.member(beta);
  auto composed = [&](std::size_t k, unsigned p) {
    auto kl = static_cast<DyadicLevel>(std::ceil(lambda * static_cast<double>(k)));
    return eval_log_at_level(gb, k, p) - eval_log_at_level(ga, kl, p);
  };
  auto powered = [&](std::size_t k, unsigned p) {
    return eval_log_at_level(gb, k, p) - eval_log_at_level(ga, k, p).scaled(lambda);
  };
  SeparationTrend t;
  t.first_level = depth / 2 + 1;
  t.last_level = depth;
  t.composed_decreasing = detail::trend_decreasing(composed, t.first_level, t.last_level, prec);
  t.power_decreasing = detail::trend_decreasing(powered, t.first_level, t.last_level, prec);
  return t;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json gauge_to_json(const Gauge& g) {
  using nlohmann::json;
  switch (g.kind()) {
    case Gauge::Kind::power:
      return json{{"kind", "power"}, {"alpha", g.alpha()}};
    case Gauge::Kind::iterated:
      return json{{"kind", "iterated"}, {"p", g.p()}, {"q", g.q()}, {"alpha", g.alpha()}};
    case Gauge::Kind::scaled:
      return json{{"kind", "scaled"}, {"c", g.c()}, {"inner", gauge_to_json(g.inner())}};
    case Gauge::Kind::half:
      return json{{"kind", "half"}, {"inner", gauge_to_json(g.inner())}};
  }
  throw InternalError("unknown gauge kind");
}

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InvalidParameter(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double require_number(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number()) throw InvalidParameter(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

inline int require_int(const nlohmann::json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number_integer()) throw InvalidParameter(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

inline std::string require_kind(const nlohmann::json& j) {
  const auto& v = require(j, "kind");
  if (!v.is_string()) throw InvalidParameter("field 'kind' must be a string");
  return v.get<std::string>();
}

}  // namespace detail

inline Gauge gauge_from_json(const nlohmann::json& j) {
  const std::string kind = detail::require_kind(j);
  if (kind == "power") return Gauge::power(detail::require_number(j, "alpha"));
  if (kind == "iterated")
    return Gauge::iterated(detail::require_int(j, "p"), detail::require_int(j, "q"), detail::require_number(j, "alpha"));
  if (kind == "scaled") return Gauge::scaled(gauge_from_json(detail::require(j, "inner")), detail::require_number(j, "c"));
  if (kind == "half") return Gauge::half(gauge_from_json(detail::require(j, "inner")));
  throw InvalidParameter("unknown gauge kind '" + kind + "'");
}

inline nlohmann::json family_to_json(const ScalingFamily& s) {
  if (s.kind() == ScalingFamily::Kind::power) return {{"kind", "power"}};
  return {{"kind", "iterated"}, {"p", s.p()}, {"q", s.q()}};
}

inline ScalingFamily family_from_json(const nlohmann::json& j) {
  const std::string kind = detail::require_kind(j);
  if (kind == "power") return ScalingFamily::power();
  if (kind == "iterated") return ScalingFamily::iterated(detail::require_int(j, "p"), detail::require_int(j, "q"));
  throw InvalidParameter("unknown family kind '" + kind + "'");
}

}  // namespace cantor
