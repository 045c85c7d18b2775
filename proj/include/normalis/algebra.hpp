#pragma once

#include <gmpxx.h>

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "normalis/interval.hpp"
#include "normalis/polynomial.hpp"

namespace normalis {

/// Q(alpha) for a real algebraic alpha given by its minimal polynomial and a
/// rational isolating interval. Immutable apart from an internal cache of the
/// tightest generator bracket computed so far.
class NumberField {
 public:
  /// Validates: primitive integer minimal polynomial of degree >= 2, irreducible,
  /// and exactly one real root in [lo, hi].
  NumberField(Polynomial minpoly, mpq_class lo, mpq_class hi);

  const Polynomial& minimal_polynomial() const { return minpoly_; }
  const Polynomial& monic_minimal_polynomial() const { return monic_; }
  int degree() const { return minpoly_.degree(); }
  std::pair<mpq_class, mpq_class> isolating_interval() const { return {lo_, hi_}; }

  /// Enclosure of the generator with width <= 2^-bits.
  Interval generator(Bits bits) const;
  /// Same minimal polynomial and same real root.
  bool same_as(const NumberField& other) const;

 private:
  Polynomial minpoly_;
  Polynomial monic_;
  mpq_class lo_, hi_;
  mutable std::mutex cache_mutex_;
  mutable mpq_class cache_lo_, cache_hi_;
  mutable long cache_bits_ = 0;
};

/// Exact real scalar: a rational, or an element of a real number field Q(alpha)
/// in the power basis. Arithmetic is exact; comparisons are decided by
/// escalating interval evaluation (nonzero elements always separate from 0).
class ExactNumber {
 public:
  ExactNumber() : ExactNumber(mpq_class(0)) {}
  ExactNumber(const mpq_class& q);  // NOLINT(google-explicit-constructor)
  ExactNumber(long v) : ExactNumber(mpq_class(v)) {}  // NOLINT(google-explicit-constructor)

  static ExactNumber generator(std::shared_ptr<const NumberField> field);
  /// The unique real root of poly inside [lo, hi]; rational when deg poly == 1.
  static ExactNumber algebraic(const Polynomial& poly, const mpq_class& lo, const mpq_class& hi);
  /// "3/4", "-2", "0.125", "1.5e-3".
  static ExactNumber parse(const std::string& text);

  bool is_rational() const { return field_ == nullptr; }
  std::optional<mpq_class> as_rational() const;
  const mpq_class& rational() const;
  const std::shared_ptr<const NumberField>& field() const { return field_; }
  const std::vector<mpq_class>& coefficients() const { return coeffs_; }

  ExactNumber& operator+=(const ExactNumber& rhs);
  ExactNumber& operator-=(const ExactNumber& rhs);
  ExactNumber& operator*=(const ExactNumber& rhs);
  ExactNumber& operator/=(const ExactNumber& rhs);
  ExactNumber operator-() const;
  ExactNumber inverse() const;
  ExactNumber pow(long n) const;

  int sign() const;
  int compare(const ExactNumber& rhs) const { return (*this - rhs).sign(); }
  bool is_zero() const;

  /// Enclosure with absolute width <= 2^-bits.
  Interval approx(Bits bits) const;
  double to_double() const;

  /// Primitive integer minimal polynomial.
  Polynomial minimal_polynomial() const;
  /// Rational interval isolating this number among the real roots of its minimal polynomial.
  std::pair<mpq_class, mpq_class> isolating_interval() const;

  std::string to_string() const;

  friend ExactNumber operator+(ExactNumber a, const ExactNumber& b) { return a += b; }
  friend ExactNumber operator-(ExactNumber a, const ExactNumber& b) { return a -= b; }
  friend ExactNumber operator*(ExactNumber a, const ExactNumber& b) { return a *= b; }
  friend ExactNumber operator/(ExactNumber a, const ExactNumber& b) { return a /= b; }
  friend bool operator==(const ExactNumber& a, const ExactNumber& b) { return (a - b).is_zero(); }
  friend bool operator!=(const ExactNumber& a, const ExactNumber& b) { return !(a == b); }
  friend bool operator<(const ExactNumber& a, const ExactNumber& b) { return a.compare(b) < 0; }
  friend bool operator>(const ExactNumber& a, const ExactNumber& b) { return a.compare(b) > 0; }
  friend bool operator<=(const ExactNumber& a, const ExactNumber& b) { return a.compare(b) <= 0; }
  friend bool operator>=(const ExactNumber& a, const ExactNumber& b) { return a.compare(b) >= 0; }

 private:
  ExactNumber(std::shared_ptr<const NumberField> field, std::vector<mpq_class> coeffs);
  void normalize();
  void unify(ExactNumber& other);

  std::shared_ptr<const NumberField> field_;
  std::vector<mpq_class> coeffs_;  // size 1 when rational, else field degree
};

ExactNumber abs(const ExactNumber& x);

/// Exact integer power b^n as an mpz.
mpz_class integer_power(long base, unsigned long exponent);

// ---------------------------------------------------------------------------
// Pisot machinery

struct PisotReport {
  Polynomial poly;
  bool is_algebraic_integer = false;
  int degree = 0;
  /// The distinguished root: the real root of largest value when one exists,
  /// otherwise a root of largest modulus. Stored as an enclosure of its real part.
  Interval root;
  bool root_is_real = false;
  std::vector<Interval> conjugate_moduli;
  bool is_pisot = false;
  Bits precision_bits = 0;
};

/// Certified Pisot verdict for an integer polynomial. Throws InputError for
/// constant or reducible input (naming a factor) and PrecisionError when the
/// cap is reached with some conjugate modulus still straddling 1.
PisotReport pisot_check(const Polynomial& poly, Bits cap = precision_cap());

/// Power sum of all roots, s_{l*q}, by Newton's identities. Monic, irreducible input.
mpz_class trace_power_sum(const Polynomial& poly, unsigned long l, unsigned long q);
/// s_0 .. s_n for a monic integer polynomial.
std::vector<mpz_class> power_sums(const Polynomial& poly, unsigned long n);

enum class DefectLocation { Zero, InsideUnit, AtLeastOne, Undecided };

struct ConjugateDefect {
  Interval value;  // |s_{lq} - beta^{lq}| = |sum of conjugate powers|
  DefectLocation location = DefectLocation::Undecided;
  Bits precision_bits = 0;
};

/// Requires a Pisot polynomial. Escalates from precision_bits until the enclosure
/// is separated from 0 and 1 or the cap is hit (then Undecided).
ConjugateDefect conjugate_defect(const Polynomial& poly, unsigned long l, unsigned long q,
                                 Bits precision_bits = kDefaultWorkingPrecision, Bits cap = precision_cap());

// ---------------------------------------------------------------------------
// theta = -log b / log lambda

/// theta enclosure of width <= 2^-bits. Requires 0 < lambda < 1 and b >= 2.
Interval theta_value(long b, const ExactNumber& lambda, Bits bits);

struct DefectCertificate {
  unsigned long q = 0;
  unsigned long l = 0;
  Interval defect;
};

struct ThetaDecision {
  enum class Verdict { Rational, IrrationalProven, Undecided };
  enum class Witness { None, ExactPowerIdentity, MultiplicativeIndependence, PisotTrace };

  Verdict verdict = Verdict::Undecided;
  /// Rational: lambda^q * b^p == 1 with gcd(p, q) = 1, hence theta = q / p.
  long p = 0;
  long q = 0;
  long search_bound = 0;
  Interval theta;
  Witness witness = Witness::None;
  std::string witness_text;
  /// PisotTrace witness data.
  int pisot_degree = 0;
  double max_conjugate_modulus = 0;
  unsigned long tail_index = 0;  // (d-1) rho^n < 1 for every n >= tail_index
  std::vector<DefectCertificate> certificates;
};

ThetaDecision theta_decide(long b, const ExactNumber& lambda, long search_bound,
                           unsigned long max_l = 10000);

const char* to_string(ThetaDecision::Verdict v);

/// Exact floor(theta * n) for theta = -log b / log lambda.
class RotationNumber {
 public:
  RotationNumber(long b, ExactNumber lambda);

  long base() const { return b_; }
  const ExactNumber& lambda() const { return lambda_; }
  Interval theta(Bits bits) const { return theta_value(b_, lambda_, bits); }
  long floor_multiple(long n) const;
  /// Exact test of theta * n == k, i.e. lambda^k * b^n == 1.
  bool is_exact_multiple(long n, long k) const;

 private:
  long b_;
  ExactNumber lambda_;
  std::optional<mpq_class> rational_lambda_;
};

}  // namespace normalis
