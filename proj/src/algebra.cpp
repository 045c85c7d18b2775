#include "normalis/algebra.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "normalis/error.hpp"

namespace normalis {

namespace {

long bit_length(const mpz_class& z) {
  return z == 0 ? 0 : static_cast<long>(mpz_sizeinbase(z.get_mpz_t(), 2));
}

// Bits needed to represent the integer part of |q| (0 when |q| < 1).
long magnitude_bits(const mpq_class& q) {
  const mpz_class t = abs(q.get_num()) / q.get_den();
  return bit_length(t);
}

Polynomial linear_factor(const mpq_class& root) {
  return Polynomial({-root, mpq_class(1)}).primitive();
}

std::string trim_copy(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// Largest e with n = g^e; returns (g, e). n >= 2.
std::pair<mpz_class, unsigned long> perfect_power_root(const mpz_class& n) {
  const unsigned long max_e = static_cast<unsigned long>(bit_length(n));
  for (unsigned long e = max_e; e >= 2; --e) {
    mpz_class r;
    if (mpz_root(r.get_mpz_t(), n.get_mpz_t(), e) != 0) return {r, e};
  }
  return {n, 1};
}

}  // namespace

// ---------------------------------------------------------------------------
// NumberField

NumberField::NumberField(Polynomial minpoly, mpq_class lo, mpq_class hi)
    : minpoly_(std::move(minpoly)), lo_(std::move(lo)), hi_(std::move(hi)) {
  if (!minpoly_.has_integer_coeffs()) throw InputError("minimal polynomial must have integer coefficients");
  minpoly_ = minpoly_.primitive();
  if (minpoly_.degree() < 2) throw InputError("number field needs a minimal polynomial of degree >= 2");
  if (lo_ > hi_) throw InputError("isolating interval has lo > hi");
  if (auto factor = find_factor(minpoly_, precision_cap()))
    throw InputError("polynomial " + minpoly_.to_string() + " is reducible: factor " + factor->to_string());
  // Irreducible of degree >= 2 has no rational roots, so endpoints are never roots.
  const int count = count_real_roots(minpoly_, lo_, hi_);
  if (count != 1)
    throw InputError("interval [" + lo_.get_str() + ", " + hi_.get_str() + "] contains " + std::to_string(count) +
                     " real roots of " + minpoly_.to_string() + ", expected exactly 1");
  monic_ = minpoly_.monic();
  cache_lo_ = lo_;
  cache_hi_ = hi_;
}

Interval NumberField::generator(Bits bits) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  if (cache_bits_ < bits + 2) {
    auto bracket = refine_real_root(minpoly_, cache_lo_, cache_hi_, static_cast<long>(bits + 2));
    cache_lo_ = bracket.first;
    cache_hi_ = bracket.second;
    cache_bits_ = static_cast<long>(bits + 2);
  }
  const Bits prec = bits + 32 + std::max(magnitude_bits(cache_lo_), magnitude_bits(cache_hi_));
  note_precision_used(prec);
  return Interval::from_endpoints(cache_lo_, cache_hi_, prec);
}

bool NumberField::same_as(const NumberField& other) const {
  if (this == &other) return true;
  if (!(minpoly_ == other.minpoly_)) return false;
  const mpq_class lo = std::max(lo_, other.lo_);
  const mpq_class hi = std::min(hi_, other.hi_);
  if (lo > hi) return false;
  return count_real_roots(minpoly_, lo, hi) >= 1;
}

// ---------------------------------------------------------------------------
// ExactNumber

ExactNumber::ExactNumber(const mpq_class& q) : coeffs_{q} { coeffs_[0].canonicalize(); }

ExactNumber::ExactNumber(std::shared_ptr<const NumberField> field, std::vector<mpq_class> coeffs)
    : field_(std::move(field)), coeffs_(std::move(coeffs)) {
  normalize();
}

void ExactNumber::normalize() {
  if (!field_) {
    coeffs_.resize(1);
    return;
  }
  const std::size_t d = static_cast<std::size_t>(field_->degree());
  if (coeffs_.size() > d) {
    Polynomial r = Polynomial(coeffs_) % field_->monic_minimal_polynomial();
    coeffs_ = r.coeffs();
  }
  coeffs_.resize(d);
  bool rational = true;
  for (std::size_t k = 1; k < d; ++k)
    if (coeffs_[k] != 0) rational = false;
  if (rational) {
    field_.reset();
    coeffs_.resize(1);
  }
}

void ExactNumber::unify(ExactNumber& other) {
  if (field_ == other.field_) return;
  if (field_ && other.field_) {
    if (!field_->same_as(*other.field_))
      throw InputError("arithmetic between elements of distinct number fields is not supported");
    other.field_ = field_;
    return;
  }
  // Exactly one side is rational: lift it into the other's field.
  ExactNumber& lifted = field_ ? other : *this;
  const ExactNumber& ref = field_ ? *this : other;
  lifted.field_ = ref.field_;
  lifted.coeffs_.resize(static_cast<std::size_t>(ref.field_->degree()));
}

ExactNumber ExactNumber::generator(std::shared_ptr<const NumberField> field) {
  if (!field) throw InputError("null number field");
  std::vector<mpq_class> c(static_cast<std::size_t>(field->degree()));
  c[1] = 1;
  return ExactNumber(std::move(field), std::move(c));
}

ExactNumber ExactNumber::algebraic(const Polynomial& poly, const mpq_class& lo, const mpq_class& hi) {
  if (!poly.has_integer_coeffs()) throw InputError("algebraic number needs an integer polynomial");
  const Polynomial p = poly.primitive();
  if (p.degree() < 1) throw InputError("algebraic number needs a nonconstant polynomial");
  if (p.degree() == 1) {
    const mpq_class root = -p.coeff(0) / p.coeff(1);
    if (root < lo || root > hi)
      throw InputError("root " + root.get_str() + " of " + p.to_string() + " is outside the given interval");
    return ExactNumber(root);
  }
  return generator(std::make_shared<const NumberField>(p, lo, hi));
}

ExactNumber ExactNumber::parse(const std::string& raw) {
  const std::string text = trim_copy(raw);
  auto fail = [&]() -> ExactNumber { throw InputError("cannot parse exact number '" + raw + "'"); };
  if (text.empty()) return fail();
  std::string body = text;
  bool negative = false;
  if (body[0] == '+' || body[0] == '-') {
    negative = body[0] == '-';
    body = body.substr(1);
  }
  if (const auto slash = body.find('/'); slash != std::string::npos) {
    const std::string num = trim_copy(body.substr(0, slash));
    const std::string den = trim_copy(body.substr(slash + 1));
    if (!all_digits(num) || !all_digits(den)) return fail();
    mpz_class d(den, 10);
    if (d == 0) throw InputError("zero denominator in '" + raw + "'");
    mpq_class q(mpz_class(num, 10), d);
    q.canonicalize();
    return ExactNumber(negative ? mpq_class(-q) : q);
  }
  std::string mantissa = body;
  long exponent = 0;
  if (const auto e = body.find_first_of("eE"); e != std::string::npos) {
    mantissa = body.substr(0, e);
    std::string ex = body.substr(e + 1);
    bool eneg = false;
    if (!ex.empty() && (ex[0] == '+' || ex[0] == '-')) {
      eneg = ex[0] == '-';
      ex = ex.substr(1);
    }
    if (!all_digits(ex) || ex.size() > 6) return fail();
    exponent = std::stol(ex) * (eneg ? -1 : 1);
  }
  std::string int_part = mantissa, frac_part;
  if (const auto dot = mantissa.find('.'); dot != std::string::npos) {
    int_part = mantissa.substr(0, dot);
    frac_part = mantissa.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) return fail();
  if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part))) return fail();
  mpz_class digits((int_part.empty() ? std::string("0") : int_part) + frac_part, 10);
  exponent -= static_cast<long>(frac_part.size());
  mpq_class q(digits);
  const mpz_class scale = integer_power(10, static_cast<unsigned long>(std::labs(exponent)));
  if (exponent >= 0) {
    q *= scale;
  } else {
    q /= scale;
  }
  q.canonicalize();
  return ExactNumber(negative ? mpq_class(-q) : q);
}

std::optional<mpq_class> ExactNumber::as_rational() const {
  if (field_) return std::nullopt;
  return coeffs_[0];
}

const mpq_class& ExactNumber::rational() const {
  if (field_) throw InputError("expected a rational number, got " + to_string());
  return coeffs_[0];
}

ExactNumber& ExactNumber::operator+=(const ExactNumber& rhs) {
  ExactNumber r = rhs;
  unify(r);
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += r.coeffs_[k];
  normalize();
  return *this;
}

ExactNumber& ExactNumber::operator-=(const ExactNumber& rhs) { return *this += -rhs; }

ExactNumber& ExactNumber::operator*=(const ExactNumber& rhs) {
  ExactNumber r = rhs;
  unify(r);
  if (!field_) {
    coeffs_[0] *= r.coeffs_[0];
    return *this;
  }
  Polynomial prod = Polynomial(coeffs_) * Polynomial(r.coeffs_);
  coeffs_ = (prod % field_->monic_minimal_polynomial()).coeffs();
  normalize();
  return *this;
}

ExactNumber& ExactNumber::operator/=(const ExactNumber& rhs) { return *this *= rhs.inverse(); }

ExactNumber ExactNumber::operator-() const {
  ExactNumber out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

ExactNumber ExactNumber::inverse() const {
  if (!field_) {
    if (coeffs_[0] == 0) throw InputError("division by zero");
    return ExactNumber(mpq_class(1) / coeffs_[0]);
  }
  // Nonrational elements are nonzero; gcd with the irreducible modulus is 1.
  const ExtendedGcd eg = extended_gcd(Polynomial(coeffs_), field_->monic_minimal_polynomial());
  if (eg.g.degree() != 0) throw Error(ErrorKind::Internal, "field element shares a factor with its modulus");
  return ExactNumber(field_, (eg.s % field_->monic_minimal_polynomial()).coeffs());
}

ExactNumber ExactNumber::pow(long n) const {
  if (n < 0) return inverse().pow(-n);
  ExactNumber result(1L), base = *this;
  for (unsigned long e = static_cast<unsigned long>(n); e > 0; e >>= 1) {
    if (e & 1UL) result *= base;
    if (e > 1) base *= base;
  }
  return result;
}

bool ExactNumber::is_zero() const { return !field_ && coeffs_[0] == 0; }

int ExactNumber::sign() const {
  if (!field_) return sgn(coeffs_[0]);
  const Bits cap = precision_cap();
  for (Bits bits = 64;; bits *= 2) {
    const Interval v = approx(bits);
    if (v.is_positive()) return 1;
    if (v.is_negative()) return -1;
    if (bits >= cap) throw PrecisionError("sign of " + to_string() + " undecided at the precision cap");
  }
}

Interval ExactNumber::approx(Bits bits) const {
  if (!field_) {
    const Bits prec = bits + 8 + magnitude_bits(coeffs_[0]);
    return Interval(coeffs_[0], prec);
  }
  long coeff_bits = 0;
  for (const auto& c : coeffs_) coeff_bits = std::max(coeff_bits, bit_length(c.get_num()) + bit_length(c.get_den()));
  const Bits cap = std::max<Bits>(precision_cap(), bits + 64);
  for (Bits w = bits + 16 + coeff_bits;; w *= 2) {
    const Interval alpha = field_->generator(w);
    const Bits prec = alpha.precision() + coeff_bits;
    Interval acc(coeffs_.back(), prec);
    for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
      acc *= alpha;
      acc += Interval(coeffs_[k], prec);
    }
    if (acc.width_at_most_pow2(-static_cast<long>(bits))) return acc;
    if (w > cap) throw PrecisionError("cannot enclose " + to_string() + " to " + std::to_string(bits) + " bits");
  }
}

double ExactNumber::to_double() const {
  if (!field_) return coeffs_[0].get_d();
  return approx(64).mid_double();
}

namespace {

// Solve sum_j c_j basis[j] = target over Q; nullopt when target is not in the span.
std::optional<std::vector<mpq_class>> solve_in_span(const std::vector<std::vector<mpq_class>>& basis,
                                                     const std::vector<mpq_class>& target) {
  const std::size_t rows = target.size();
  const std::size_t cols = basis.size();
  std::vector<std::vector<mpq_class>> m(rows, std::vector<mpq_class>(cols + 1));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m[r][c] = basis[c][r];
    m[r][cols] = target[r];
  }
  std::vector<std::size_t> pivot_col;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < rows; ++c) {
    std::size_t piv = row;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[row]);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == row || m[r][c] == 0) continue;
      const mpq_class f = m[r][c] / m[row][c];
      for (std::size_t k = c; k <= cols; ++k) m[r][k] -= f * m[row][k];
    }
    pivot_col.push_back(c);
    ++row;
  }
  for (std::size_t r = row; r < rows; ++r)
    if (m[r][cols] != 0) return std::nullopt;
  std::vector<mpq_class> sol(cols);
  for (std::size_t r = 0; r < pivot_col.size(); ++r) sol[pivot_col[r]] = m[r][cols] / m[r][pivot_col[r]];
  return sol;
}

}  // namespace

Polynomial ExactNumber::minimal_polynomial() const {
  if (!field_) return linear_factor(coeffs_[0]);
  const std::size_t d = static_cast<std::size_t>(field_->degree());
  std::vector<std::vector<mpq_class>> powers;
  ExactNumber power(1L);
  for (std::size_t k = 0; k <= d; ++k) {
    ExactNumber lifted = power;
    ExactNumber probe = *this;
    lifted.unify(probe);
    std::vector<mpq_class> vec = lifted.coeffs_;
    vec.resize(d);
    if (k > 0) {
      if (auto sol = solve_in_span(powers, vec)) {
        std::vector<mpq_class> c(k + 1);
        for (std::size_t j = 0; j < k; ++j) c[j] = -(*sol)[j];
        c[k] = 1;
        return Polynomial(std::move(c)).primitive();
      }
    }
    powers.push_back(std::move(vec));
    power *= *this;
  }
  throw Error(ErrorKind::Internal, "no linear dependency among powers of a field element");
}

std::pair<mpq_class, mpq_class> ExactNumber::isolating_interval() const {
  if (!field_) return {coeffs_[0], coeffs_[0]};
  const Polynomial m = minimal_polynomial();
  if (m.degree() == 1) {
    const mpq_class r = -m.coeff(0) / m.coeff(1);
    return {r, r};
  }
  for (Bits bits = 32;; bits *= 2) {
    const Interval v = approx(bits);
    const mpq_class lo = v.lo_rational();
    const mpq_class hi = v.hi_rational();
    if (count_real_roots(m, lo, hi) == 1) return {lo, hi};
    if (bits > precision_cap()) throw PrecisionError("cannot isolate " + to_string());
  }
}

std::string ExactNumber::to_string() const {
  if (!field_) return coeffs_[0].get_num().get_str() + "/" + coeffs_[0].get_den().get_str();
  std::ostringstream os;
  os << "(";
  bool first = true;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    if (coeffs_[k] == 0) continue;
    if (!first) os << " + ";
    os << coeffs_[k].get_str();
    if (k > 0) os << "*a" << (k > 1 ? "^" + std::to_string(k) : "");
    first = false;
  }
  const auto [lo, hi] = field_->isolating_interval();
  os << ") with a the root of " << field_->minimal_polynomial().to_string() << " in [" << lo.get_str() << ", "
     << hi.get_str() << "]";
  return os.str();
}

ExactNumber abs(const ExactNumber& x) { return x.sign() < 0 ? -x : x; }

mpz_class integer_power(long base, unsigned long exponent) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), mpz_class(base).get_mpz_t(), exponent);
  return out;
}

// ---------------------------------------------------------------------------
// Pisot machinery

namespace {

Polynomial validated_integer_poly(const Polynomial& poly) {
  if (!poly.has_integer_coeffs()) throw InputError("polynomial " + poly.to_string() + " must have integer coefficients");
  if (poly.degree() < 1) throw InputError("polynomial must be nonconstant");
  return poly.primitive();
}

void require_irreducible(const Polynomial& p) {
  if (p.degree() < 2) return;
  if (auto factor = find_factor(p, precision_cap()))
    throw InputError("polynomial " + p.to_string() + " is reducible: factor " + factor->to_string());
}

bool certainly_nonreal(const RootDisk& d) {
  return !d.real && d.center.im.abs().certainly_greater(d.radius);
}

}  // namespace

PisotReport pisot_check(const Polynomial& poly, Bits cap) {
  const Polynomial p = validated_integer_poly(poly);
  require_irreducible(p);
  PisotReport rep;
  rep.poly = p;
  rep.degree = p.degree();
  rep.is_algebraic_integer = p.is_monic();
  if (rep.degree == 1) {
    const mpq_class root = -p.coeff(0) / p.coeff(1);
    rep.root = Interval(root, kDefaultWorkingPrecision);
    rep.root_is_real = true;
    rep.is_pisot = rep.is_algebraic_integer && root > 1;
    rep.precision_bits = kDefaultWorkingPrecision;
    return rep;
  }
  for (Bits prec = kDefaultWorkingPrecision;; prec *= 2) {
    if (prec > cap) throw PrecisionError("Undecidable: a root modulus of " + p.to_string() + " is not separated from 1 below the precision cap");
    auto disks = isolate_complex_roots(p, prec, cap);
    if (!disks) throw PrecisionError("Undecidable: root isolation of " + p.to_string() + " did not certify below the precision cap");
    std::size_t best = 0;
    bool have_real = false;
    for (std::size_t i = 0; i < disks->size(); ++i) {
      const RootDisk& d = (*disks)[i];
      if (d.real) {
        if (!have_real || d.approx_re() > (*disks)[best].approx_re()) best = i;
        have_real = true;
      } else if (!have_real && d.modulus().mid_double() > (*disks)[best].modulus().mid_double()) {
        best = i;
      }
    }
    const RootDisk& top = (*disks)[best];
    rep.root = top.center.re + (-top.radius).hull(top.radius);
    rep.root_is_real = top.real;
    rep.conjugate_moduli.clear();
    for (std::size_t i = 0; i < disks->size(); ++i)
      if (i != best) rep.conjugate_moduli.push_back((*disks)[i].modulus());
    rep.precision_bits = prec;
    if (!rep.is_algebraic_integer) {
      rep.is_pisot = false;
      return rep;
    }

    int above = 0, unresolved = 0;
    bool nonreal_or_negative_above = false;
    for (const auto& d : *disks) {
      const Interval m = d.modulus();
      if (m.certainly_greater(1L)) {
        ++above;
        if (certainly_nonreal(d) || (d.real && d.center.re.certainly_less(0L))) nonreal_or_negative_above = true;
      } else if (!m.certainly_less(1L)) {
        ++unresolved;
      }
    }
    if (above >= 2 || nonreal_or_negative_above) {
      rep.is_pisot = false;
      if (unresolved == 0) return rep;
    }
    if (unresolved == 0) {
      bool all_below = true;
      for (const auto& m : rep.conjugate_moduli) all_below = all_below && m.certainly_less(1L);
      rep.is_pisot = top.real && rep.root.certainly_greater(1L) && all_below;
      return rep;
    }
  }
}

std::vector<mpz_class> power_sums(const Polynomial& poly, unsigned long n) {
  if (!poly.has_integer_coeffs() || !poly.is_monic())
    throw InputError("power sums need a monic integer polynomial, got " + poly.to_string());
  const std::size_t d = static_cast<std::size_t>(poly.degree());
  // c[i] is the coefficient of x^{d-i}.
  std::vector<mpz_class> c(d + 1);
  for (std::size_t i = 0; i <= d; ++i) c[i] = poly.coeff(d - i).get_num();
  std::vector<mpz_class> s(n + 1);
  s[0] = static_cast<unsigned long>(d);
  for (std::size_t k = 1; k <= n; ++k) {
    mpz_class acc = 0;
    for (std::size_t i = 1; i <= std::min<std::size_t>(k - 1, d); ++i) acc += c[i] * s[k - i];
    if (k <= d) acc += static_cast<unsigned long>(k) * c[k];
    s[k] = -acc;
  }
  return s;
}

mpz_class trace_power_sum(const Polynomial& poly, unsigned long l, unsigned long q) {
  if (l == 0 || q == 0) throw InputError("trace_power_sum needs positive l and q");
  if (!poly.has_integer_coeffs() || !poly.is_monic())
    throw InputError("trace_power_sum needs a monic integer polynomial; " + poly.to_string() +
                     " has non-integral power sums in general");
  require_irreducible(poly);
  return power_sums(poly, l * q).back();
}

ConjugateDefect conjugate_defect(const Polynomial& poly, unsigned long l, unsigned long q, Bits precision_bits,
                                 Bits cap) {
  if (l == 0 || q == 0) throw InputError("conjugate_defect needs positive l and q");
  const PisotReport rep = pisot_check(poly, cap);
  if (!rep.is_pisot) throw InputError("conjugate_defect needs a Pisot polynomial, got " + poly.to_string());
  ConjugateDefect out;
  if (rep.degree == 1) {
    out.value = Interval(0L, precision_bits);
    out.location = DefectLocation::Zero;
    out.precision_bits = precision_bits;
    return out;
  }
  const unsigned long n = l * q;
  const mpz_class s = power_sums(rep.poly, n).back();
  mpq_class lo = rep.root.lo_rational();
  mpq_class hi = rep.root.hi_rational();
  const double log2_beta = std::log2(std::max(2.0, rep.root.hi_double()));
  for (Bits w = std::max<Bits>(precision_bits, 32);; w *= 2) {
    const long target = static_cast<long>(w) + static_cast<long>(std::ceil(static_cast<double>(n) * log2_beta)) + 16;
    std::tie(lo, hi) = refine_real_root(rep.poly, lo, hi, target);
    const Bits prec = static_cast<Bits>(target + 64);
    note_precision_used(prec);
    const Interval beta_n = Interval::from_endpoints(lo, hi, prec).pow(n);
    out.value = (Interval(s, prec) - beta_n).abs();
    out.precision_bits = w;
    if (out.value.is_positive() && out.value.certainly_less(1L)) {
      out.location = DefectLocation::InsideUnit;
      return out;
    }
    if (out.value.certainly_greater(1L)) {
      out.location = DefectLocation::AtLeastOne;
      return out;
    }
    if (w * 2 > cap) {
      out.location = DefectLocation::Undecided;
      return out;
    }
  }
}

// ---------------------------------------------------------------------------
// theta

namespace {

void require_unit_interval(long b, const ExactNumber& lambda) {
  if (b < 2) throw InputError("base must be an integer >= 2, got " + std::to_string(b));
  if (lambda.sign() <= 0 || lambda >= ExactNumber(1L))
    throw InputError("lambda must lie in (0,1), got " + lambda.to_string());
}

struct RationalThetaResult {
  bool rational = false;
  long p = 0, q = 0;  // r^q * b^p == 1
  std::string text;
};

// theta for a rational r = u/v in (0,1).
RationalThetaResult decide_rational(long b, const mpq_class& r) {
  RationalThetaResult out;
  const mpz_class u = r.get_num();
  const mpz_class v = r.get_den();
  if (u != 1) {
    out.text = "numerator " + u.get_str() + " > 1 is coprime to denominator " + v.get_str() +
               ", so v^q = b^p u^q has no solution";
    return out;
  }
  const auto [g, s] = perfect_power_root(v);
  const auto [h, rr] = perfect_power_root(mpz_class(b));
  if (g != h) {
    out.text = "v = " + g.get_str() + "^" + std::to_string(s) + " and b = " + h.get_str() + "^" + std::to_string(rr) +
               " have distinct primitive roots, so v^q = b^p has no solution";
    return out;
  }
  const unsigned long gg = std::gcd(s, rr);
  out.rational = true;
  out.q = static_cast<long>(rr / gg);
  out.p = static_cast<long>(s / gg);
  if (integer_power(v.get_si(), static_cast<unsigned long>(out.q)) != integer_power(b, static_cast<unsigned long>(out.p)))
    throw Error(ErrorKind::Internal, "power identity check failed");
  out.text = v.get_str() + "^" + std::to_string(out.q) + " = " + std::to_string(b) + "^" + std::to_string(out.p);
  return out;
}

}  // namespace

Interval theta_value(long b, const ExactNumber& lambda, Bits bits) {
  require_unit_interval(b, lambda);
  const Bits cap = std::max<Bits>(precision_cap(), bits + 64);
  for (Bits w = bits + 32;; w *= 2) {
    const Interval lam = lambda.approx(w);
    const Interval theta = -(Interval(b, w).log() / lam.with_precision(w).log());
    if (theta.width_at_most_pow2(-static_cast<long>(bits))) return theta;
    if (w > cap) throw PrecisionError("theta enclosure did not reach " + std::to_string(bits) + " bits");
  }
}

const char* to_string(ThetaDecision::Verdict v) {
  switch (v) {
    case ThetaDecision::Verdict::Rational: return "Rational";
    case ThetaDecision::Verdict::IrrationalProven: return "IrrationalProven";
    case ThetaDecision::Verdict::Undecided: return "Undecided";
  }
  return "Undecided";
}

ThetaDecision theta_decide(long b, const ExactNumber& lambda, long search_bound, unsigned long max_l) {
  require_unit_interval(b, lambda);
  if (search_bound < 1) throw InputError("search bound must be positive");
  ThetaDecision out;
  out.search_bound = search_bound;
  out.theta = theta_value(b, lambda, kDefaultWorkingPrecision);

  auto from_rational = [&](const mpq_class& r, long root_q, const std::string& prefix) {
    const RationalThetaResult rr = decide_rational(b, r);
    if (rr.rational) {
      // (lambda^root_q)^rr.q * b^rr.p == 1
      long p = rr.p, q = rr.q * root_q;
      const long g = std::gcd(p, q);
      out.verdict = ThetaDecision::Verdict::Rational;
      out.p = p / g;
      out.q = q / g;
      out.witness = ThetaDecision::Witness::ExactPowerIdentity;
      if (lambda.pow(out.q) * ExactNumber(mpq_class(integer_power(b, static_cast<unsigned long>(out.p)))) != ExactNumber(1L))
        throw Error(ErrorKind::Internal, "rational theta verdict failed its exact check");
      out.witness_text = prefix + rr.text + "; lambda^" + std::to_string(out.q) + " * " + std::to_string(b) + "^" +
                         std::to_string(out.p) + " = 1";
    } else {
      out.verdict = ThetaDecision::Verdict::IrrationalProven;
      out.witness = ThetaDecision::Witness::MultiplicativeIndependence;
      out.witness_text = prefix + rr.text;
    }
  };

  if (auto r = lambda.as_rational()) {
    from_rational(*r, 1, "lambda = " + r->get_str() + ": ");
    return out;
  }

  ExactNumber power = lambda;
  for (long q = 1; q <= search_bound; ++q) {
    if (auto r = power.as_rational()) {
      from_rational(*r, q, "lambda^" + std::to_string(q) + " = " + r->get_str() + ": ");
      return out;
    }
    power *= lambda;
  }

  const Polynomial inv_poly = lambda.inverse().minimal_polynomial();
  PisotReport rep;
  try {
    rep = pisot_check(inv_poly);
  } catch (const PrecisionError&) {
    return out;
  }
  if (!rep.is_pisot || rep.degree < 2) return out;

  double rho = 0;
  for (const auto& m : rep.conjugate_moduli) rho = std::max(rho, m.hi_double());
  const double d1 = static_cast<double>(rep.degree - 1);
  unsigned long n0 = 1;
  while (d1 * std::pow(rho, static_cast<double>(n0)) >= 1.0) ++n0;
  out.pisot_degree = rep.degree;
  out.max_conjugate_modulus = rho;
  out.tail_index = n0;
  for (long q = 1; q <= search_bound; ++q) {
    bool certified = false;
    for (unsigned long l = 1; l <= max_l; ++l) {
      const ConjugateDefect cd = conjugate_defect(rep.poly, l, static_cast<unsigned long>(q));
      if (cd.location == DefectLocation::InsideUnit) {
        out.certificates.push_back({static_cast<unsigned long>(q), l, cd.value});
        certified = true;
        break;
      }
    }
    if (!certified) {
      out.certificates.clear();
      return out;
    }
  }
  out.verdict = ThetaDecision::Verdict::IrrationalProven;
  out.witness = ThetaDecision::Witness::PisotTrace;
  std::ostringstream os;
  os << "1/lambda is a degree-" << rep.degree << " Pisot number with root polynomial " << rep.poly.to_string()
     << "; lambda^q b^p = 1 would make s_{lq} - lambda^{-lq} an integer for every l, but 0 < |s_{lq} - lambda^{-lq}| < 1 "
     << "is certified for q = 1.." << search_bound << " and holds for every lq >= " << n0
     << " since (d-1) rho^n < 1 with rho <= " << rho;
  out.witness_text = os.str();
  return out;
}

// ---------------------------------------------------------------------------
// RotationNumber

RotationNumber::RotationNumber(long b, ExactNumber lambda) : b_(b), lambda_(std::move(lambda)) {
  require_unit_interval(b_, lambda_);
  rational_lambda_ = lambda_.as_rational();
}

bool RotationNumber::is_exact_multiple(long n, long k) const {
  if (n < 0 || k < 0) return false;
  const mpz_class bn = integer_power(b_, static_cast<unsigned long>(n));
  if (rational_lambda_) {
    mpq_class lk(integer_power(rational_lambda_->get_num().get_si(), static_cast<unsigned long>(k)),
                 integer_power(rational_lambda_->get_den().get_si(), static_cast<unsigned long>(k)));
    return lk * bn == 1;
  }
  return lambda_.pow(k) * ExactNumber(mpq_class(bn)) == ExactNumber(1L);
}

long RotationNumber::floor_multiple(long n) const {
  if (n < 0) throw InputError("floor_multiple needs n >= 0");
  if (n == 0) return 0;
  if (rational_lambda_) {
    // Largest k with (v/u)^k <= b^n, i.e. v^k <= b^n u^k.
    const mpz_class u = rational_lambda_->get_num();
    const mpz_class v = rational_lambda_->get_den();
    const mpz_class bn = integer_power(b_, static_cast<unsigned long>(n));
    const double est = static_cast<double>(n) * std::log(static_cast<double>(b_)) /
                       (std::log(v.get_d()) - std::log(u.get_d()));
    long k = std::max(0L, static_cast<long>(std::floor(est)));
    auto fits = [&](long kk) {
      mpz_class vk, uk;
      mpz_pow_ui(vk.get_mpz_t(), v.get_mpz_t(), static_cast<unsigned long>(kk));
      mpz_pow_ui(uk.get_mpz_t(), u.get_mpz_t(), static_cast<unsigned long>(kk));
      return vk <= bn * uk;
    };
    while (k > 0 && !fits(k)) --k;
    while (fits(k + 1)) ++k;
    return k;
  }
  const Bits cap = precision_cap();
  for (Bits w = 96 + static_cast<Bits>(std::log2(static_cast<double>(n) + 1));; w *= 2) {
    const Interval t = theta(w) * Interval(n, w);
    mpz_class k;
    if (t.common_floor(k)) return k.get_si();
    // The only integer the enclosure can straddle is floor(hi).
    const mpq_class hi = t.hi_rational();
    const long candidate = mpz_class(hi.get_num() / hi.get_den()).get_si();
    if (is_exact_multiple(n, candidate)) return candidate;
    if (w > cap) throw PrecisionError("theta*n straddles an integer at the precision cap (n = " + std::to_string(n) + ")");
  }
}

}  // namespace normalis
