#pragma once

// From a pair of gauges to a divisibility chain v_1 | v_2 | ... whose ratios
// to the target sequences oscillate inside [1, 2]:
//
//   targets      a_k = 1/phi(2^-(k+1)),  b_k = C/psi(2^-k)
//   schedule     T_{l+1} = min{k > T_l + 1 : a_k > b_{T_l + 1}}
//   envelope     u_k = a_k at k = T_l, u_k = b_{T_l + 1} strictly between
//   chain        v_1 = 1, v_{k+1} = v_k if 2 v_k > u_{k+1},
//                          floor(u_{k+1} / v_k) v_k otherwise
//
// All target values are stored as enclosures of their natural logarithm.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/gauge.hpp"
#include "cantor/log_real.hpp"
#include "json.hpp"

namespace cantor {

enum class Target { a, b };

class TargetSequences {
 public:
  /// Returns an enclosure of ln a_k or ln b_k at the given precision.
  using Source = std::function<LogReal(Target, std::size_t, unsigned)>;

  TargetSequences(Source source, std::size_t depth, unsigned precision_bits) {
    if (depth < 1) throw InvalidParameter("target sequences need depth >= 1");
    auto impl = std::make_shared<Impl>();
    impl->source = std::move(source);
    impl->depth = depth;
    impl->precision = precision_bits;
    impl->a.reserve(depth);
    impl->b.reserve(depth);
    for (std::size_t k = 1; k <= depth; ++k) {
      impl->a.push_back(impl->source(Target::a, k, precision_bits));
      impl->b.push_back(impl->source(Target::b, k, precision_bits));
    }
    impl_ = std::move(impl);
  }

  std::size_t depth() const noexcept { return impl_->depth; }
  unsigned precision_bits() const noexcept { return impl_->precision; }

  /// ln a_k, ln b_k at the base precision (1-based).
  const LogReal& a(std::size_t k) const { return impl_->a.at(k - 1); }
  const LogReal& b(std::size_t k) const { return impl_->b.at(k - 1); }
  const LogReal& cached(Target t, std::size_t k) const { return t == Target::a ? a(k) : b(k); }

  LogReal eval(Target t, std::size_t k, unsigned prec) const {
    if (k < 1 || k > depth()) throw OutOfDepth("target index out of range");
    if (prec == precision_bits()) return cached(t, k);
    return impl_->source(t, k, prec);
  }

 private:
  struct Impl {
    Source source;
    std::size_t depth = 0;
    unsigned precision = 0;
    std::vector<LogReal> a;
    std::vector<LogReal> b;
  };
  std::shared_ptr<const Impl> impl_;
};

namespace detail {

inline void validate_targets(const TargetSequences& t) {
  for (std::size_t k = 1; k <= t.depth(); ++k) {
    if (certainly_greater(t.a(k), t.b(k))) {
      std::ostringstream os;
      os << "a_k > b_k at k = " << k << " (ln a = " << t.a(k).value() << ", ln b = " << t.b(k).value() << ")";
      throw DominationViolated(os.str());
    }
    if (k > 1 && (certainly_less(t.a(k), t.a(k - 1)) || certainly_less(t.b(k), t.b(k - 1))))
      throw InvalidParameter("target sequences must be non-decreasing (k = " + std::to_string(k) + ")");
  }
}

}  // namespace detail

/// a_k = 1/phi(2^-(k+1)), b_k = C/psi(2^-k) for k = 1..depth.
inline TargetSequences targets_from_gauges(const Gauge& phi, const Gauge& psi, double C, std::size_t depth,
                                           unsigned prec = kDefaultPrecision) {
  if (!(C > 0) || !std::isfinite(C)) throw InvalidParameter("targets: C must be positive");
  auto source = [phi, psi, C](Target t, std::size_t k, unsigned p) -> LogReal {
    if (t == Target::a) return -eval_log_at_level(phi, k + 1, p);
    return LogReal::log_of(C, p) - eval_log_at_level(psi, k, p);
  };
  TargetSequences t(source, depth, prec);
  detail::validate_targets(t);
  return t;
}

/// Targets given by closed-form log enclosures, e.g. a_k = k, b_k = k^2.
inline TargetSequences targets_from_functions(std::function<LogReal(std::size_t, unsigned)> ln_a,
                                              std::function<LogReal(std::size_t, unsigned)> ln_b, std::size_t depth,
                                              unsigned prec = kDefaultPrecision) {
  auto source = [ln_a = std::move(ln_a), ln_b = std::move(ln_b)](Target t, std::size_t k, unsigned p) {
    return t == Target::a ? ln_a(k, p) : ln_b(k, p);
  };
  TargetSequences t(source, depth, prec);
  detail::validate_targets(t);
  return t;
}

/// Integer-valued targets.
inline TargetSequences targets_from_integers(std::function<mpz_class(std::size_t)> a,
                                             std::function<mpz_class(std::size_t)> b, std::size_t depth,
                                             unsigned prec = kDefaultPrecision) {
  return targets_from_functions([a](std::size_t k, unsigned p) { return LogReal::log_of(a(k), p); },
                                [b](std::size_t k, unsigned p) { return LogReal::log_of(b(k), p); }, depth, prec);
}

// ---------------------------------------------------------------------------

struct OscillationSchedule {
  std::vector<std::size_t> times;  // T_1 < T_2 < ... (T_0 = 0 implicit)
  std::size_t complete_to = 0;
  std::vector<std::string> warnings;
};

/// Forward scan of T_{l+1} = min{k > T_l + 1 : a_k > b_{T_l+1}}. Stops with a
/// prefix when the depth runs out before the next time exists.
inline OscillationSchedule oscillation_times(const TargetSequences& t) {
  OscillationSchedule s;
  s.complete_to = t.depth();
  std::size_t prev = 0;
  while (prev + 1 <= t.depth()) {
    const std::size_t ref = prev + 1;
    std::optional<std::size_t> next;
    for (std::size_t k = prev + 2; k <= t.depth(); ++k) {
      Decision d = decide_greater(
          [&](unsigned p) { return std::pair{t.eval(Target::a, k, p), t.eval(Target::b, ref, p)}; },
          t.precision_bits());
      if (d == Decision::not_greater_fallback)
        s.warnings.push_back("schedule: a_" + std::to_string(k) + " vs b_" + std::to_string(ref) +
                             " unresolved at precision cap, taken as not greater");
      if (d == Decision::greater) {
        next = k;
        break;
      }
    }
    if (!next) break;
    s.times.push_back(*next);
    prev = *next;
  }
  return s;
}

// ---------------------------------------------------------------------------

class Envelope {
 public:
  struct Entry {
    Target side;
    std::size_t index;  // u_k = side_index
  };

  Envelope(TargetSequences targets, std::vector<Entry> entries)
      : targets_(std::move(targets)), entries_(std::move(entries)) {}

  std::size_t depth() const noexcept { return entries_.size(); }
  const Entry& entry(std::size_t k) const { return entries_.at(k - 1); }
  const TargetSequences& targets() const noexcept { return targets_; }

  /// ln u_k at the base precision.
  const LogReal& value(std::size_t k) const {
    const Entry& e = entry(k);
    return targets_.cached(e.side, e.index);
  }
  LogReal value(std::size_t k, unsigned prec) const {
    const Entry& e = entry(k);
    return targets_.eval(e.side, e.index, prec);
  }

 private:
  TargetSequences targets_;
  std::vector<Entry> entries_;
};

inline Envelope build_envelope(const TargetSequences& t, const OscillationSchedule& sched) {
  std::vector<Envelope::Entry> entries;
  entries.reserve(t.depth());
  std::size_t ell = 0;  // number of times <= k
  for (std::size_t k = 1; k <= t.depth(); ++k) {
    while (ell < sched.times.size() && sched.times[ell] <= k) ++ell;
    const std::size_t last_time = ell == 0 ? 0 : sched.times[ell - 1];
    if (last_time == k)
      entries.push_back({Target::a, k});
    else
      entries.push_back({Target::b, last_time + 1});
  }
  for (std::size_t i = 1; i < sched.times.size(); ++i)
    if (sched.times[i] <= sched.times[i - 1] + 1) throw InvalidParameter("schedule times must satisfy T_{l+1} > T_l + 1");
  return Envelope(t, std::move(entries));
}

// ---------------------------------------------------------------------------

enum class ChainMode { exact, approx };

inline const char* to_string(ChainMode m) { return m == ChainMode::exact ? "exact" : "approx"; }

struct DivisibilityChain {
  ChainMode mode = ChainMode::exact;
  std::vector<mpz_class> v;  // exact mode only; v[k-1] = v_k
  std::vector<mpz_class> n;  // exact mode only; n_k = v_k / v_{k-1}, v_0 = 1
  std::vector<double> v_log2;
  std::vector<double> n_log2;
  std::size_t k0 = 0;  // first k with v_k > 1; 0 if none
  std::vector<std::string> warnings;

  std::size_t depth() const noexcept { return v_log2.size(); }
};

namespace detail {

inline double log2_of(const mpz_class& z) {
  long exp = 0;
  double m = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log2(m) + static_cast<double>(exp);
}

struct IntegerEnclosure {
  mpz_class value;  // floor(u), or the integer the enclosure straddles
  bool straddles = false;
};

// Integer enclosure of u_k = exp(ln u_k) with additive error below 1/2. When
// the enclosure straddles an integer m and the decision for the current step
// depends on whether u_k < m (m divisible by `divisor`), precision is
// escalated; past the cap m is used and the caller flags the step.
inline IntegerEnclosure integer_enclosure(const Envelope& u, std::size_t k, const mpz_class& divisor,
                                          unsigned prec, unsigned cap) {
  const LogReal& base = u.value(k);
  const double hi = base.upper();
  if (!std::isfinite(hi)) throw DepthLimitError("envelope value not finite at k = " + std::to_string(k), k - 1);
  const long value_bits = std::max(0L, static_cast<long>(std::ceil(hi / std::log(2.0)))) + 4;
  const long mag_bits = static_cast<long>(std::ceil(std::log2(std::fabs(hi) + std::fabs(base.lower()) + 2.0))) + 2;
  for (unsigned guard = std::max(prec, 64u);; guard *= 2) {
    const auto work = static_cast<unsigned>(value_bits + mag_bits + guard);
    LogReal ln_u = u.value(k, work);
    BigFloat lo(value_bits + guard), up(value_bits + guard);
    mpfr_exp(lo.get(), ln_u.lo().get(), MPFR_RNDD);
    mpfr_exp(up.get(), ln_u.hi().get(), MPFR_RNDU);
    BigFloat width(value_bits + guard);
    mpfr_sub(width.get(), up.get(), lo.get(), MPFR_RNDU);
    if (mpfr_number_p(width.get()) && mpfr_cmp_d(width.get(), 0.5) < 0) {
      IntegerEnclosure r;
      mpz_class flo, fhi;
      mpfr_get_z(flo.get_mpz_t(), lo.get(), MPFR_RNDD);
      mpfr_get_z(fhi.get_mpz_t(), up.get(), MPFR_RNDD);
      if (flo == fhi) {
        r.value = flo;
        return r;
      }
      r.value = fhi;
      r.straddles = true;
      const bool relevant = sgn(divisor) > 0 && mpz_divisible_p(fhi.get_mpz_t(), divisor.get_mpz_t());
      if (!relevant || guard >= cap) return r;
    } else if (guard >= cap) {
      throw DepthLimitError("integer enclosure of u_" + std::to_string(k) + " exceeds the precision cap", k - 1);
    }
    if (guard * 2 > cap) guard = cap / 2;
  }
}

}  // namespace detail

/// Exact (big-integer) or approximate (log2-tracking) divisibility chain for an envelope.
inline DivisibilityChain build_chain(const Envelope& u, unsigned prec = kDefaultPrecision,
                                     ChainMode mode = ChainMode::exact, unsigned cap = kPrecisionCap) {
  DivisibilityChain c;
  c.mode = mode;
  const std::size_t depth = u.depth();
  if (depth == 0) return c;
  const double ln2 = std::log(2.0);

  if (mode == ChainMode::exact) {
    c.v.reserve(depth);
    c.v.emplace_back(1);
    for (std::size_t k = 1; k < depth; ++k) {
      const mpz_class& vk = c.v.back();
      detail::IntegerEnclosure U;
      try {
        U = detail::integer_enclosure(u, k + 1, vk, prec, std::max(cap, prec));
      } catch (const DepthLimitError& e) {
        throw DepthLimitError(std::string(e.what()) + "; chain is exact up to k = " + std::to_string(k), k);
      }
      if (U.straddles && mpz_divisible_p(U.value.get_mpz_t(), vk.get_mpz_t())) {
        c.warnings.push_back("chain: u_" + std::to_string(k + 1) + " indistinguishable from the integer " +
                             (mpz_sizeinbase(U.value.get_mpz_t(), 10) <= 24 ? U.value.get_str()
                                                                           : std::string("(large)")) +
                             " at the precision cap; threshold taken as not greater");
      }
      if (2 * vk > U.value) {
        c.v.push_back(vk);
      } else {
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), U.value.get_mpz_t(), vk.get_mpz_t());
        c.v.push_back(q * vk);
      }
    }
    c.n.reserve(depth);
    mpz_class prev = 1;
    for (const auto& vk : c.v) {
      c.n.push_back(vk / prev);
      c.v_log2.push_back(detail::log2_of(vk));
      c.n_log2.push_back(detail::log2_of(c.n.back()));
      prev = vk;
    }
    for (std::size_t k = 1; k <= depth; ++k)
      if (c.v[k - 1] > 1) {
        c.k0 = k;
        break;
      }
    return c;
  }

  c.v_log2.push_back(0.0);
  c.n_log2.push_back(0.0);
  for (std::size_t k = 1; k < depth; ++k) {
    const double lv = c.v_log2.back();
    const double lu = u.value(k + 1).value() / ln2;
    if (!std::isfinite(lu))
      throw DepthLimitError("approximate chain: log2 u_" + std::to_string(k + 1) + " exceeds double range", k);
    double ln_step = 0.0;
    if (!(lv + 1.0 > lu)) {
      const double r = lu - lv;
      ln_step = r < 52.0 ? std::log2(std::floor(std::exp2(r))) : r;
    }
    c.n_log2.push_back(ln_step);
    c.v_log2.push_back(lv + ln_step);
  }
  for (std::size_t k = 1; k <= depth; ++k)
    if (c.v_log2[k - 1] > 0.5) {
      c.k0 = k;
      break;
    }
  return c;
}

/// n_k = v_k / v_{k-1} with v_0 = 1.
inline std::vector<mpz_class> branching_from_chain(const DivisibilityChain& c) {
  if (c.mode != ChainMode::exact) throw InvalidParameter("branching factors need an exact chain");
  std::vector<mpz_class> n;
  n.reserve(c.v.size());
  mpz_class prev = 1;
  for (const auto& vk : c.v) {
    if (!mpz_divisible_p(vk.get_mpz_t(), prev.get_mpz_t())) throw InternalError("chain is not a divisibility chain");
    n.push_back(vk / prev);
    prev = vk;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Invariant checks shared by construction and stored-report verification.

enum class CheckStatus { pass, fail, skipped };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    case CheckStatus::skipped:
      return "skipped";
  }
  return "?";
}

struct InvariantCheck {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::string detail;
};

namespace detail {

// ln v_k enclosure for either chain mode. Approximate chains only know
// log2 v_k to double accuracy, so their enclosure is widened accordingly.
inline LogReal ln_chain(const DivisibilityChain& c, std::size_t k, unsigned prec) {
  if (c.mode == ChainMode::exact) return LogReal::log_of(c.v.at(k - 1), prec);
  const double x = c.v_log2.at(k - 1) * std::log(2.0);
  const double slack = 1e-9 * (1.0 + std::fabs(x));
  return LogReal::between(x - slack, x + slack, prec);
}

}  // namespace detail

}  // namespace cantor
