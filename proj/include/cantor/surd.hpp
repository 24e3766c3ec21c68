#pragma once

// Exact arithmetic in Q(2^(1/q)): elements are sum_{r<q} c_r 2^(r/q) with
// rational c_r. x^q - 2 is irreducible, so the powers 2^(r/q) are linearly
// independent and an element is zero iff every coefficient is.

#include <gmpxx.h>
#include <mpfr.h>

#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/gauge.hpp"
#include "cantor/log_real.hpp"

namespace cantor {

class DyadicSurd {
 public:
  DyadicSurd() : c_(1) {}
  DyadicSurd(const mpq_class& r) : c_{r} {}  // NOLINT: rationals embed implicitly
  DyadicSurd(long r) : c_{mpq_class(r)} {}   // NOLINT

  /// c * 2^(p/q).
  static DyadicSurd monomial(const mpq_class& c, long p, unsigned q) {
    if (q == 0) throw InvalidParameter("surd: root index must be positive");
    DyadicSurd s;
    s.c_.assign(q, mpq_class(0));
    long a = p / static_cast<long>(q), r = p % static_cast<long>(q);
    if (r < 0) {
      r += q;
      a -= 1;
    }
    mpq_class x = c;
    if (a >= 0)
      mpq_mul_2exp(x.get_mpq_t(), x.get_mpq_t(), static_cast<unsigned long>(a));
    else
      mpq_div_2exp(x.get_mpq_t(), x.get_mpq_t(), static_cast<unsigned long>(-a));
    s.c_[static_cast<std::size_t>(r)] = x;
    s.normalize();
    return s;
  }

  unsigned root_index() const noexcept { return static_cast<unsigned>(c_.size()); }
  const std::vector<mpq_class>& coefficients() const noexcept { return c_; }

  bool is_zero() const {
    for (const auto& x : c_)
      if (sgn(x) != 0) return false;
    return true;
  }
  bool is_rational() const {
    for (std::size_t r = 1; r < c_.size(); ++r)
      if (sgn(c_[r]) != 0) return false;
    return true;
  }
  const mpq_class& rational() const {
    if (!is_rational()) throw InvalidParameter("surd value is irrational");
    return c_[0];
  }

  /// Interval enclosure of the value.
  LogReal enclose(unsigned prec) const {
    LogReal sum = LogReal::exact(0, prec);
    const LogReal root = LogReal::ln2(prec + 8).scaled(1.0 / static_cast<double>(c_.size()));
    for (std::size_t r = 0; r < c_.size(); ++r) {
      if (sgn(c_[r]) == 0) continue;
      LogReal term = LogReal::from_mpq(c_[r], prec);
      if (r > 0) {
        LogReal e = (root * LogReal::from_mpz(mpz_class(static_cast<unsigned long>(r)), prec)).exp();
        term = term * e;
      }
      sum = sum + term;
    }
    return sum.rounded(prec);
  }

  int sign() const {
    if (is_zero()) return 0;
    for (unsigned prec = 64;; prec *= 2) {
      LogReal x = enclose(prec);
      if (mpfr_sgn(x.lo().get()) > 0) return 1;
      if (mpfr_sgn(x.hi().get()) < 0) return -1;
    }
  }

  /// ln of a positive value.
  LogReal log(unsigned prec) const {
    if (sign() <= 0) throw InvalidParameter("surd logarithm of a non-positive value");
    for (unsigned p = prec + 16;; p *= 2) {
      LogReal x = enclose(p);
      if (mpfr_sgn(x.lo().get()) > 0) return x.log().rounded(prec);
    }
  }

  double to_double() const { return enclose(96).value(); }

  friend DyadicSurd operator+(const DyadicSurd& a, const DyadicSurd& b) {
    const unsigned q = std::lcm(a.root_index(), b.root_index());
    DyadicSurd x = a.lifted(q), y = b.lifted(q);
    for (std::size_t r = 0; r < q; ++r) x.c_[r] += y.c_[r];
    x.normalize();
    return x;
  }
  friend DyadicSurd operator-(const DyadicSurd& a) {
    DyadicSurd x = a;
    for (auto& c : x.c_) c = -c;
    return x;
  }
  friend DyadicSurd operator-(const DyadicSurd& a, const DyadicSurd& b) { return a + (-b); }

  friend DyadicSurd operator*(const DyadicSurd& a, const DyadicSurd& b) {
    const unsigned q = std::lcm(a.root_index(), b.root_index());
    DyadicSurd x = a.lifted(q), y = b.lifted(q);
    DyadicSurd out;
    out.c_.assign(q, mpq_class(0));
    for (std::size_t i = 0; i < q; ++i) {
      if (sgn(x.c_[i]) == 0) continue;
      for (std::size_t j = 0; j < q; ++j) {
        if (sgn(y.c_[j]) == 0) continue;
        mpq_class t = x.c_[i] * y.c_[j];
        std::size_t r = i + j;
        if (r >= q) {  // 2^(r/q) = 2 * 2^((r-q)/q)
          r -= q;
          t *= 2;
        }
        out.c_[r] += t;
      }
    }
    out.normalize();
    return out;
  }

  friend bool operator==(const DyadicSurd& a, const DyadicSurd& b) { return (a - b).is_zero(); }
  friend bool operator!=(const DyadicSurd& a, const DyadicSurd& b) { return !(a == b); }
  friend bool operator<(const DyadicSurd& a, const DyadicSurd& b) { return (a - b).sign() < 0; }
  friend bool operator>(const DyadicSurd& a, const DyadicSurd& b) { return b < a; }
  friend bool operator<=(const DyadicSurd& a, const DyadicSurd& b) { return !(b < a); }
  friend bool operator>=(const DyadicSurd& a, const DyadicSurd& b) { return !(a < b); }

  friend std::ostream& operator<<(std::ostream& os, const DyadicSurd& s) {
    bool first = true;
    for (std::size_t r = 0; r < s.c_.size(); ++r) {
      if (sgn(s.c_[r]) == 0) continue;
      if (!first) os << " + ";
      os << s.c_[r];
      if (r > 0) os << "*2^(" << r << "/" << s.c_.size() << ")";
      first = false;
    }
    if (first) os << "0";
    return os;
  }

 private:
  DyadicSurd lifted(unsigned q) const {
    const unsigned step = q / root_index();
    DyadicSurd out;
    out.c_.assign(q, mpq_class(0));
    for (std::size_t r = 0; r < c_.size(); ++r) out.c_[r * step] = c_[r];
    return out;
  }

  // Smallest root index that still represents the value.
  void normalize() {
    unsigned q = root_index();
    while (q % 2 == 0) {
      bool even_only = true;
      for (std::size_t r = 1; r < q; r += 2)
        if (sgn(c_[r]) != 0) even_only = false;
      if (!even_only) break;
      std::vector<mpq_class> half(q / 2);
      for (std::size_t r = 0; r < q / 2; ++r) half[r] = c_[2 * r];
      c_ = std::move(half);
      q /= 2;
    }
    for (unsigned d = 3; d <= q; d += 2) {
      while (q % d == 0) {
        bool ok = true;
        for (std::size_t r = 0; r < q; ++r)
          if (r % d != 0 && sgn(c_[r]) != 0) ok = false;
        if (!ok) break;
        std::vector<mpq_class> part(q / d);
        for (std::size_t r = 0; r < q / d; ++r) part[r] = c_[d * r];
        c_ = std::move(part);
        q /= d;
      }
    }
  }

  std::vector<mpq_class> c_;
};

namespace detail {

// alpha as p/q with q a power of two no larger than 64, if exactly so.
inline std::optional<std::pair<long, unsigned>> dyadic_exponent(double alpha) {
  mpq_class a(alpha);
  const mpz_class& den = a.get_den();
  if (mpz_popcount(den.get_mpz_t()) != 1 || den > 64) return std::nullopt;
  if (!a.get_num().fits_slong_p()) return std::nullopt;
  return std::pair{a.get_num().get_si(), static_cast<unsigned>(den.get_ui())};
}

}  // namespace detail

/// g(2^-k) exactly, when g is built from dyadic-exponent power gauges,
/// iterated(1,1,alpha) (which equals power(alpha)), scalings and halvings.
inline std::optional<DyadicSurd> exact_gauge_value(const Gauge& g, DyadicLevel k) {
  switch (g.kind()) {
    case Gauge::Kind::power:
    case Gauge::Kind::iterated: {
      if (g.kind() == Gauge::Kind::iterated && (g.p() != 1 || g.q() != 1)) return std::nullopt;
      auto e = detail::dyadic_exponent(g.alpha());
      if (!e) return std::nullopt;
      // 2^(-alpha k) = 2^(-(p k) / q)
      return DyadicSurd::monomial(1, -e->first * static_cast<long>(k), e->second);
    }
    case Gauge::Kind::scaled: {
      auto inner = exact_gauge_value(g.inner(), k);
      if (!inner) return std::nullopt;
      return DyadicSurd(mpq_class(g.c())) * *inner;
    }
    case Gauge::Kind::half:
      return exact_gauge_value(g.inner(), k + 1);
  }
  return std::nullopt;
}

}  // namespace cantor
