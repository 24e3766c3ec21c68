#pragma once

// Outward-rounded interval arithmetic on top of MPFR. A LogReal is a closed
// interval [lo, hi] that is guaranteed to contain the exact real it stands
// for; most of the library stores natural logarithms in it, hence the name.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "cantor/errors.hpp"

namespace cantor {

inline constexpr unsigned kDefaultPrecision = 256;
inline constexpr unsigned kPrecisionCap = 4096;

/// RAII owner of an mpfr_t.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec = 64) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  BigFloat(const BigFloat& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& other) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }
  BigFloat& operator=(const BigFloat& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_prec_t precision() const noexcept { return mpfr_get_prec(v_); }

  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }

 private:
  mpfr_t v_;
};

/// Three-valued comparison outcome.
enum class Cmp3 { less, greater, indeterminate };

class LogReal {
 public:
  LogReal() : LogReal(kDefaultPrecision) {}
  explicit LogReal(unsigned precision_bits)
      : lo_(precision_bits), hi_(precision_bits), prec_(precision_bits) {}

  static LogReal exact(double x, unsigned prec) {
    if (!std::isfinite(x)) throw InvalidParameter("LogReal::exact: non-finite value");
    LogReal r(prec);
    mpfr_set_d(r.lo_.get(), x, MPFR_RNDD);
    mpfr_set_d(r.hi_.get(), x, MPFR_RNDU);
    return r;
  }

  /// Enclosure [lo, hi] of two doubles.
  static LogReal between(double lo, double hi, unsigned prec) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) throw InvalidParameter("LogReal::between: bad endpoints");
    LogReal r(prec);
    mpfr_set_d(r.lo_.get(), lo, MPFR_RNDD);
    mpfr_set_d(r.hi_.get(), hi, MPFR_RNDU);
    return r;
  }

  static LogReal from_mpz(const mpz_class& z, unsigned prec) {
    LogReal r(prec);
    mpfr_set_z(r.lo_.get(), z.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_.get(), z.get_mpz_t(), MPFR_RNDU);
    return r;
  }

  static LogReal from_mpq(const mpq_class& q, unsigned prec) {
    LogReal r(prec);
    mpfr_set_q(r.lo_.get(), q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_.get(), q.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  static LogReal ln2(unsigned prec) {
    LogReal r(prec);
    mpfr_const_log2(r.lo_.get(), MPFR_RNDD);
    mpfr_const_log2(r.hi_.get(), MPFR_RNDU);
    return r;
  }

  /// Enclosure of ln z for a positive integer z.
  static LogReal log_of(const mpz_class& z, unsigned prec) {
    if (sgn(z) <= 0) throw InvalidParameter("LogReal::log_of: non-positive integer");
    return from_mpz(z, prec + 8).log().rounded(prec);
  }

  static LogReal log_of(const mpq_class& q, unsigned prec) {
    if (sgn(q) <= 0) throw InvalidParameter("LogReal::log_of: non-positive rational");
    return from_mpq(q, prec + 8).log().rounded(prec);
  }

  static LogReal log_of(double x, unsigned prec) {
    if (!(x > 0) || !std::isfinite(x)) throw InvalidParameter("LogReal::log_of: value must be positive and finite");
    return exact(x, std::max(prec, 64u)).log().rounded(prec);
  }

  unsigned precision_bits() const noexcept { return prec_; }
  const BigFloat& lo() const noexcept { return lo_; }
  const BigFloat& hi() const noexcept { return hi_; }

  /// Midpoint, rounded to nearest double.
  double value() const {
    BigFloat m(prec_ + 1);
    mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
    mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
    return m.to_double();
  }
  double lower() const { return lo_.to_double(MPFR_RNDD); }
  double upper() const { return hi_.to_double(MPFR_RNDU); }

  /// Half-width of the enclosure, rounded up.
  double error_bound() const { return radius().to_double(MPFR_RNDU); }

  BigFloat radius() const {
    BigFloat w(prec_);
    mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
    mpfr_div_2ui(w.get(), w.get(), 1, MPFR_RNDU);
    return w;
  }

  /// True when the half-width is strictly below 2^exponent.
  bool radius_below_pow2(long exponent) const {
    if (!is_finite()) return false;
    BigFloat r = radius();
    return mpfr_cmp_si_2exp(r.get(), 1, exponent) < 0;
  }

  bool is_finite() const { return mpfr_number_p(lo_.get()) && mpfr_number_p(hi_.get()); }

  bool contains(const LogReal& inner) const {
    return mpfr_lessequal_p(lo_.get(), inner.lo_.get()) && mpfr_lessequal_p(inner.hi_.get(), hi_.get());
  }
  bool contains(double x) const { return mpfr_cmp_d(lo_.get(), x) <= 0 && mpfr_cmp_d(hi_.get(), x) >= 0; }

  /// Re-rounds outward to a (usually lower) precision.
  LogReal rounded(unsigned prec) const {
    LogReal r(prec);
    mpfr_set(r.lo_.get(), lo_.get(), MPFR_RNDD);
    mpfr_set(r.hi_.get(), hi_.get(), MPFR_RNDU);
    return r;
  }

  friend LogReal operator+(const LogReal& a, const LogReal& b) {
    LogReal r(std::max(a.prec_, b.prec_));
    mpfr_add(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_add(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend LogReal operator-(const LogReal& a, const LogReal& b) {
    LogReal r(std::max(a.prec_, b.prec_));
    mpfr_sub(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
    mpfr_sub(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
    return r;
  }

  friend LogReal operator-(const LogReal& a) {
    LogReal r(a.prec_);
    mpfr_neg(r.lo_.get(), a.hi_.get(), MPFR_RNDD);
    mpfr_neg(r.hi_.get(), a.lo_.get(), MPFR_RNDU);
    return r;
  }

  friend LogReal operator*(const LogReal& a, const LogReal& b) {
    const unsigned prec = std::max(a.prec_, b.prec_);
    LogReal r(prec);
    BigFloat t(prec);
    bool first = true;
    for (const BigFloat* x : {&a.lo_, &a.hi_}) {
      for (const BigFloat* y : {&b.lo_, &b.hi_}) {
        mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDD);
        if (first || mpfr_less_p(t.get(), r.lo_.get())) mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
        mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDU);
        if (first || mpfr_greater_p(t.get(), r.hi_.get())) mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
        first = false;
      }
    }
    return r;
  }

  LogReal scaled(double s) const { return *this * exact(s, std::max(prec_, 64u)); }

  LogReal exp() const {
    LogReal r(prec_);
    mpfr_exp(r.lo_.get(), lo_.get(), MPFR_RNDD);
    mpfr_exp(r.hi_.get(), hi_.get(), MPFR_RNDU);
    return r;
  }

  LogReal log() const {
    if (mpfr_sgn(lo_.get()) <= 0) throw InvalidParameter("LogReal::log: enclosure not strictly positive");
    LogReal r(prec_);
    mpfr_log(r.lo_.get(), lo_.get(), MPFR_RNDD);
    mpfr_log(r.hi_.get(), hi_.get(), MPFR_RNDU);
    return r;
  }

  /// log_+(x) = log(x) for x > 1 and 0 otherwise (natural log).
  LogReal log_plus() const {
    LogReal r(prec_);
    if (mpfr_cmp_ui(hi_.get(), 1) <= 0) return r;
    if (mpfr_cmp_ui(lo_.get(), 1) > 0) {
      mpfr_log(r.lo_.get(), lo_.get(), MPFR_RNDD);
    } else {
      mpfr_set_zero(r.lo_.get(), 1);
    }
    mpfr_log(r.hi_.get(), hi_.get(), MPFR_RNDU);
    return r;
  }

  friend Cmp3 compare(const LogReal& x, const LogReal& y) {
    if (mpfr_greater_p(x.lo_.get(), y.hi_.get())) return Cmp3::greater;
    if (mpfr_less_p(x.hi_.get(), y.lo_.get())) return Cmp3::less;
    return Cmp3::indeterminate;
  }

  /// Enclosure of max(x, y).
  friend LogReal max(const LogReal& x, const LogReal& y) {
    LogReal r(std::max(x.prec_, y.prec_));
    mpfr_max(r.lo_.get(), x.lo_.get(), y.lo_.get(), MPFR_RNDD);
    mpfr_max(r.hi_.get(), x.hi_.get(), y.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend LogReal min(const LogReal& x, const LogReal& y) {
    LogReal r(std::max(x.prec_, y.prec_));
    mpfr_min(r.lo_.get(), x.lo_.get(), y.lo_.get(), MPFR_RNDD);
    mpfr_min(r.hi_.get(), x.hi_.get(), y.hi_.get(), MPFR_RNDU);
    return r;
  }

  /// Bit-identical endpoints (used by determinism and law checks).
  friend bool identical(const LogReal& x, const LogReal& y) {
    return mpfr_equal_p(x.lo_.get(), y.lo_.get()) && mpfr_equal_p(x.hi_.get(), y.hi_.get());
  }

 private:
  BigFloat lo_;
  BigFloat hi_;
  unsigned prec_;
};

/// Certainly-greater test: x > y holds for every point of both enclosures.
inline bool certainly_greater(const LogReal& x, const LogReal& y) { return compare(x, y) == Cmp3::greater; }
inline bool certainly_less(const LogReal& x, const LogReal& y) { return compare(x, y) == Cmp3::less; }

}  // namespace cantor

namespace cantor {

/// Outcome of an escalated "x > y" decision.
enum class Decision { greater, not_greater, not_greater_fallback };

/// Decides x > y where `eval(prec)` returns the pair (x, y) enclosed at
/// `prec` bits. Overlapping enclosures trigger re-evaluation at doubled
/// precision up to `cap`; past the cap the answer is "not greater" and the
/// fallback is reported to the caller.
template <class Eval>
Decision decide_greater(Eval&& eval, unsigned prec, unsigned cap = kPrecisionCap) {
  for (unsigned p = prec;; p *= 2) {
    auto [x, y] = eval(p);
    switch (compare(x, y)) {
      case Cmp3::greater:
        return Decision::greater;
      case Cmp3::less:
        return Decision::not_greater;
      case Cmp3::indeterminate:
        break;
    }
    if (p >= cap) return Decision::not_greater_fallback;
    if (p * 2 > cap) p = cap / 2;
  }
}

}  // namespace cantor
