#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

#include "normalis/precision.hpp"

namespace normalis {

/// Closed real interval [lo, hi] with MPFR endpoints and outward rounding.
///
/// Every operation returns an enclosure of the exact image of its operands, so a
/// chain of operations on enclosures of exact inputs encloses the exact result.
/// The result precision of a binary operation is the larger operand precision.
class Interval {
 public:
  explicit Interval(Bits prec = kDefaultWorkingPrecision);
  Interval(long value, Bits prec);
  Interval(const mpz_class& value, Bits prec);
  Interval(const mpq_class& value, Bits prec);

  static Interval from_double(double value, Bits prec);
  static Interval from_endpoints(const mpq_class& lo, const mpq_class& hi, Bits prec);
  static Interval from_mpfr(mpfr_srcptr lo, mpfr_srcptr hi, Bits prec);
  static Interval pi(Bits prec);

  Interval(const Interval& other);
  Interval(Interval&& other) noexcept;
  Interval& operator=(const Interval& other);
  Interval& operator=(Interval&& other) noexcept;
  ~Interval();

  Bits precision() const { return mpfr_get_prec(lo_); }
  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }

  double lo_double() const { return mpfr_get_d(lo_, MPFR_RNDD); }
  double hi_double() const { return mpfr_get_d(hi_, MPFR_RNDU); }
  double mid_double() const;
  /// Upper bound on hi - lo, rounded to double.
  double width() const;
  /// Upper bound on max(|lo|, |hi|).
  double magnitude() const;

  mpq_class lo_rational() const;
  mpq_class hi_rational() const;

  bool contains(const mpq_class& q) const;
  bool contains(const Interval& other) const;
  bool contains_zero() const;
  bool is_positive() const { return mpfr_sgn(lo_) > 0; }
  bool is_negative() const { return mpfr_sgn(hi_) < 0; }
  bool is_finite() const { return mpfr_number_p(lo_) && mpfr_number_p(hi_); }
  /// True iff hi - lo <= 2^exponent.
  bool width_at_most_pow2(long exponent) const;
  /// True iff some integer k satisfies lo <= k <= hi.
  bool contains_integer() const;
  /// floor(lo) == floor(hi); the common value is written to out.
  bool common_floor(mpz_class& out) const;

  /// Strict order certificates.
  bool certainly_less(const Interval& other) const { return mpfr_less_p(hi_, other.lo_); }
  bool certainly_greater(const Interval& other) const { return mpfr_greater_p(lo_, other.hi_); }
  bool certainly_less(long v) const { return mpfr_cmp_si(hi_, v) < 0; }
  bool certainly_greater(long v) const { return mpfr_cmp_si(lo_, v) > 0; }
  bool intersects(const Interval& other) const;

  Interval& operator+=(const Interval& rhs);
  Interval& operator-=(const Interval& rhs);
  Interval& operator*=(const Interval& rhs);
  Interval& operator/=(const Interval& rhs);

  Interval operator-() const;
  Interval abs() const;
  Interval sqr() const;
  Interval sqrt() const;
  Interval exp() const;
  Interval log() const;
  Interval cos() const;
  Interval sin() const;
  Interval pow(unsigned long n) const;
  Interval hull(const Interval& other) const;
  /// The midpoint as a degenerate interval (used for approximate iterations).
  Interval midpoint() const;
  /// Same value re-enclosed at a different precision (outward).
  Interval with_precision(Bits prec) const;

  std::string to_string(int digits = 20) const;

 private:
  struct Uninit {};
  Interval(Bits prec, Uninit);

  mpfr_t lo_;
  mpfr_t hi_;
};

Interval operator+(Interval lhs, const Interval& rhs);
Interval operator-(Interval lhs, const Interval& rhs);
Interval operator*(Interval lhs, const Interval& rhs);
Interval operator/(Interval lhs, const Interval& rhs);

/// Rectangular complex enclosure.
struct ComplexInterval {
  Interval re;
  Interval im;

  explicit ComplexInterval(Bits prec = kDefaultWorkingPrecision) : re(prec), im(prec) {}
  ComplexInterval(Interval r, Interval i) : re(std::move(r)), im(std::move(i)) {}

  /// e^{i * phase}.
  static ComplexInterval expi(const Interval& phase);
  static ComplexInterval one(Bits prec) { return {Interval(1L, prec), Interval(0L, prec)}; }

  ComplexInterval& operator+=(const ComplexInterval& rhs);
  ComplexInterval& operator-=(const ComplexInterval& rhs);
  ComplexInterval& operator*=(const ComplexInterval& rhs);
  ComplexInterval& operator*=(const Interval& rhs);

  ComplexInterval conj() const { return {re, -im}; }
  Interval abs() const;
  Interval abs_sqr() const;
  bool intersects(const ComplexInterval& other) const {
    return re.intersects(other.re) && im.intersects(other.im);
  }
  /// Widen both components by a nonnegative radius.
  ComplexInterval inflated(double radius) const;
};

ComplexInterval operator+(ComplexInterval lhs, const ComplexInterval& rhs);
ComplexInterval operator-(ComplexInterval lhs, const ComplexInterval& rhs);
ComplexInterval operator*(ComplexInterval lhs, const ComplexInterval& rhs);

}  // namespace normalis
