#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "normalis/interval.hpp"

namespace normalis {

/// Univariate polynomial over Q, coefficients stored constant term first.
/// The representation is kept trimmed: no trailing zero coefficients.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<mpq_class> coeffs);
  static Polynomial from_integers(const std::vector<long>& coeffs);
  static Polynomial monomial(const mpq_class& c, std::size_t degree);
  static Polynomial constant(const mpq_class& c) { return Polynomial({c}); }

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<mpq_class>& coeffs() const { return coeffs_; }
  mpq_class coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : mpq_class(0); }
  const mpq_class& leading() const { return coeffs_.back(); }

  bool has_integer_coeffs() const;
  bool is_monic() const { return !is_zero() && leading() == 1; }
  /// Integer content-free form with positive leading coefficient.
  Polynomial primitive() const;
  bool is_primitive() const;
  Polynomial monic() const;
  /// x^d p(1/x).
  Polynomial reversed() const;
  Polynomial derivative() const;

  mpq_class operator()(const mpq_class& x) const;
  Interval operator()(const Interval& x) const;
  ComplexInterval operator()(const ComplexInterval& z) const;
  int sign_at(const mpq_class& x) const { return sgn((*this)(x)); }

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(const Polynomial& rhs);
  Polynomial operator-() const;

  /// Euclidean division: *this = q * divisor + r, deg r < deg divisor.
  std::pair<Polynomial, Polynomial> divmod(const Polynomial& divisor) const;
  Polynomial operator%(const Polynomial& divisor) const { return divmod(divisor).second; }

  bool operator==(const Polynomial& rhs) const { return coeffs_ == rhs.coeffs_; }

  std::vector<long> integer_coeffs_as_long() const;
  std::string to_string() const;

 private:
  void trim();
  std::vector<mpq_class> coeffs_;
};

Polynomial operator+(Polynomial a, const Polynomial& b);
Polynomial operator-(Polynomial a, const Polynomial& b);
Polynomial operator*(Polynomial a, const Polynomial& b);

/// Monic gcd over Q (zero if both are zero).
Polynomial gcd(Polynomial a, Polynomial b);

/// Extended Euclid: returns (g, s, t) with s*a + t*b = g monic.
struct ExtendedGcd {
  Polynomial g, s, t;
};
ExtendedGcd extended_gcd(const Polynomial& a, const Polynomial& b);

/// Number of distinct real roots in the half-open interval (lo, hi] (Sturm).
int count_real_roots(const Polynomial& p, const mpq_class& lo, const mpq_class& hi);

/// Upper bound on the modulus of every complex root (Cauchy bound).
mpq_class root_modulus_bound(const Polynomial& p);

/// A certified root: the disk |z - center| <= radius contains exactly one root.
struct RootDisk {
  ComplexInterval center;  // point enclosure of the approximation
  Interval radius;         // rigorous upper bound on the distance to the root
  bool real = false;       // centre on the real axis; the root is then real

  Interval modulus() const;  // enclosure of |root|
  double approx_re() const { return center.re.mid_double(); }
  double approx_im() const { return center.im.mid_double(); }
};

/// Certified isolation of all complex roots of a squarefree polynomial: each
/// disk contains at least one root (Newton inclusion n|p/p'|) and the disks are
/// pairwise disjoint, so each contains exactly one. Precision escalates from
/// start_bits up to cap; nullopt if the cap is reached first.
std::optional<std::vector<RootDisk>> isolate_complex_roots(const Polynomial& p, Bits start_bits,
                                                           Bits cap);

/// Refine an isolating interval (exactly one root in (lo, hi)) of a squarefree
/// polynomial until its width is at most 2^-bits; endpoints stay rational.
std::pair<mpq_class, mpq_class> refine_real_root(const Polynomial& p, mpq_class lo, mpq_class hi,
                                                 long bits);

/// Irreducibility over Q for an integer polynomial. Returns a nontrivial factor
/// (primitive, integer coefficients) when the input is reducible.
std::optional<Polynomial> find_factor(const Polynomial& p, Bits cap);

}  // namespace normalis
