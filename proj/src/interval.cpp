#include "normalis/interval.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "normalis/error.hpp"

namespace normalis {
namespace {

// RAII scratch value.
struct Scratch {
  explicit Scratch(Bits prec) { mpfr_init2(v, prec); }
  ~Scratch() { mpfr_clear(v); }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;
  mpfr_t v;
};

Bits join(const Interval& a, const Interval& b) {
  return std::max(a.precision(), b.precision());
}

}  // namespace

Interval::Interval(Bits prec, Uninit) {
  mpfr_init2(lo_, prec);
  mpfr_init2(hi_, prec);
}

Interval::Interval(Bits prec) : Interval(prec, Uninit{}) {
  mpfr_set_zero(lo_, 1);
  mpfr_set_zero(hi_, 1);
}

Interval::Interval(long value, Bits prec) : Interval(prec, Uninit{}) {
  mpfr_set_si(lo_, value, MPFR_RNDD);
  mpfr_set_si(hi_, value, MPFR_RNDU);
}

Interval::Interval(const mpz_class& value, Bits prec) : Interval(prec, Uninit{}) {
  mpfr_set_z(lo_, value.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(hi_, value.get_mpz_t(), MPFR_RNDU);
}

Interval::Interval(const mpq_class& value, Bits prec) : Interval(prec, Uninit{}) {
  mpfr_set_q(lo_, value.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi_, value.get_mpq_t(), MPFR_RNDU);
}

Interval Interval::from_double(double value, Bits prec) {
  Interval r(prec, Uninit{});
  mpfr_set_d(r.lo_, value, MPFR_RNDD);
  mpfr_set_d(r.hi_, value, MPFR_RNDU);
  return r;
}

Interval Interval::from_endpoints(const mpq_class& lo, const mpq_class& hi, Bits prec) {
  if (lo > hi) throw InputError("interval endpoints out of order");
  Interval r(prec, Uninit{});
  mpfr_set_q(r.lo_, lo.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(r.hi_, hi.get_mpq_t(), MPFR_RNDU);
  return r;
}

Interval Interval::from_mpfr(mpfr_srcptr lo, mpfr_srcptr hi, Bits prec) {
  Interval r(prec, Uninit{});
  mpfr_set(r.lo_, lo, MPFR_RNDD);
  mpfr_set(r.hi_, hi, MPFR_RNDU);
  return r;
}

Interval Interval::pi(Bits prec) {
  Interval r(prec, Uninit{});
  mpfr_const_pi(r.lo_, MPFR_RNDD);
  mpfr_const_pi(r.hi_, MPFR_RNDU);
  return r;
}

Interval::Interval(const Interval& other) : Interval(other.precision(), Uninit{}) {
  mpfr_set(lo_, other.lo_, MPFR_RNDD);
  mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

Interval::Interval(Interval&& other) noexcept : Interval(other.precision(), Uninit{}) {
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
}

Interval& Interval::operator=(const Interval& other) {
  if (this != &other) {
    mpfr_set_prec(lo_, other.precision());
    mpfr_set_prec(hi_, other.precision());
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
  }
  return *this;
}

Interval& Interval::operator=(Interval&& other) noexcept {
  mpfr_swap(lo_, other.lo_);
  mpfr_swap(hi_, other.hi_);
  return *this;
}

Interval::~Interval() {
  mpfr_clear(lo_);
  mpfr_clear(hi_);
}

double Interval::mid_double() const {
  Scratch m(precision() + 1);
  mpfr_add(m.v, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m.v, m.v, 1, MPFR_RNDN);
  return mpfr_get_d(m.v, MPFR_RNDN);
}

double Interval::width() const {
  Scratch w(precision());
  mpfr_sub(w.v, hi_, lo_, MPFR_RNDU);
  return mpfr_get_d(w.v, MPFR_RNDU);
}

double Interval::magnitude() const {
  return std::max(std::fabs(mpfr_get_d(lo_, MPFR_RNDA)), std::fabs(mpfr_get_d(hi_, MPFR_RNDA)));
}

mpq_class Interval::lo_rational() const {
  if (!mpfr_number_p(lo_)) throw PrecisionError("non-finite interval endpoint");
  mpq_class q;
  mpfr_get_q(q.get_mpq_t(), lo_);
  return q;
}

mpq_class Interval::hi_rational() const {
  if (!mpfr_number_p(hi_)) throw PrecisionError("non-finite interval endpoint");
  mpq_class q;
  mpfr_get_q(q.get_mpq_t(), hi_);
  return q;
}

bool Interval::contains(const mpq_class& q) const {
  return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
}

bool Interval::contains(const Interval& other) const {
  return mpfr_lessequal_p(lo_, other.lo_) && mpfr_greaterequal_p(hi_, other.hi_);
}

bool Interval::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

bool Interval::width_at_most_pow2(long exponent) const {
  Scratch w(precision());
  mpfr_sub(w.v, hi_, lo_, MPFR_RNDU);
  return mpfr_cmp_ui_2exp(w.v, 1, exponent) <= 0;
}

bool Interval::contains_integer() const {
  if (!is_finite()) return true;
  Scratch c(precision());
  mpfr_ceil(c.v, lo_);
  return mpfr_lessequal_p(c.v, hi_);
}

bool Interval::common_floor(mpz_class& out) const {
  if (!is_finite()) return false;
  mpz_class a, b;
  mpfr_get_z(a.get_mpz_t(), lo_, MPFR_RNDD);
  mpfr_get_z(b.get_mpz_t(), hi_, MPFR_RNDD);
  if (a != b) return false;
  out = a;
  return true;
}

bool Interval::intersects(const Interval& other) const {
  return !(mpfr_less_p(hi_, other.lo_) || mpfr_less_p(other.hi_, lo_));
}

Interval& Interval::operator+=(const Interval& rhs) {
  const Bits p = join(*this, rhs);
  mpfr_prec_round(lo_, p, MPFR_RNDD);
  mpfr_prec_round(hi_, p, MPFR_RNDU);
  mpfr_add(lo_, lo_, rhs.lo_, MPFR_RNDD);
  mpfr_add(hi_, hi_, rhs.hi_, MPFR_RNDU);
  return *this;
}

Interval& Interval::operator-=(const Interval& rhs) {
  const Bits p = join(*this, rhs);
  mpfr_prec_round(lo_, p, MPFR_RNDD);
  mpfr_prec_round(hi_, p, MPFR_RNDU);
  Scratch t(p);
  mpfr_sub(t.v, lo_, rhs.hi_, MPFR_RNDD);
  mpfr_sub(hi_, hi_, rhs.lo_, MPFR_RNDU);
  mpfr_swap(lo_, t.v);
  return *this;
}

Interval& Interval::operator*=(const Interval& rhs) {
  const Bits p = join(*this, rhs);
  Scratch a(p), b(p), lo(p), hi(p);
  mpfr_mul(lo.v, lo_, rhs.lo_, MPFR_RNDD);
  mpfr_mul(hi.v, lo_, rhs.lo_, MPFR_RNDU);
  auto fold = [&](mpfr_srcptr x, mpfr_srcptr y) {
    mpfr_mul(a.v, x, y, MPFR_RNDD);
    mpfr_mul(b.v, x, y, MPFR_RNDU);
    if (mpfr_less_p(a.v, lo.v)) mpfr_set(lo.v, a.v, MPFR_RNDD);
    if (mpfr_greater_p(b.v, hi.v)) mpfr_set(hi.v, b.v, MPFR_RNDU);
  };
  fold(lo_, rhs.hi_);
  fold(hi_, rhs.lo_);
  fold(hi_, rhs.hi_);
  mpfr_set_prec(lo_, p);
  mpfr_set_prec(hi_, p);
  mpfr_swap(lo_, lo.v);
  mpfr_swap(hi_, hi.v);
  return *this;
}

Interval& Interval::operator/=(const Interval& rhs) {
  if (rhs.contains_zero()) throw PrecisionError("interval division by an enclosure of zero");
  const Bits p = join(*this, rhs);
  Scratch a(p), b(p), lo(p), hi(p);
  mpfr_div(lo.v, lo_, rhs.lo_, MPFR_RNDD);
  mpfr_div(hi.v, lo_, rhs.lo_, MPFR_RNDU);
  auto fold = [&](mpfr_srcptr x, mpfr_srcptr y) {
    mpfr_div(a.v, x, y, MPFR_RNDD);
    mpfr_div(b.v, x, y, MPFR_RNDU);
    if (mpfr_less_p(a.v, lo.v)) mpfr_set(lo.v, a.v, MPFR_RNDD);
    if (mpfr_greater_p(b.v, hi.v)) mpfr_set(hi.v, b.v, MPFR_RNDU);
  };
  fold(lo_, rhs.hi_);
  fold(hi_, rhs.lo_);
  fold(hi_, rhs.hi_);
  mpfr_set_prec(lo_, p);
  mpfr_set_prec(hi_, p);
  mpfr_swap(lo_, lo.v);
  mpfr_swap(hi_, hi.v);
  return *this;
}

Interval Interval::operator-() const {
  Interval r(precision(), Uninit{});
  mpfr_neg(r.lo_, hi_, MPFR_RNDD);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  return r;
}

Interval Interval::abs() const {
  if (mpfr_sgn(lo_) >= 0) return *this;
  if (mpfr_sgn(hi_) <= 0) return -*this;
  Interval r(precision(), Uninit{});
  mpfr_set_zero(r.lo_, 1);
  mpfr_neg(r.hi_, lo_, MPFR_RNDU);
  if (mpfr_greater_p(hi_, r.hi_)) mpfr_set(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::sqr() const {
  const Interval a = abs();
  Interval r(precision(), Uninit{});
  mpfr_sqr(r.lo_, a.lo_, MPFR_RNDD);
  mpfr_sqr(r.hi_, a.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::sqrt() const {
  if (mpfr_sgn(hi_) < 0) throw PrecisionError("square root of a negative enclosure");
  Interval r(precision(), Uninit{});
  if (mpfr_sgn(lo_) <= 0) {
    mpfr_set_zero(r.lo_, 1);
  } else {
    mpfr_sqrt(r.lo_, lo_, MPFR_RNDD);
  }
  mpfr_sqrt(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::exp() const {
  Interval r(precision(), Uninit{});
  mpfr_exp(r.lo_, lo_, MPFR_RNDD);
  mpfr_exp(r.hi_, hi_, MPFR_RNDU);
  return r;
}

Interval Interval::log() const {
  if (mpfr_sgn(lo_) <= 0) throw PrecisionError("logarithm of an enclosure containing 0");
  Interval r(precision(), Uninit{});
  mpfr_log(r.lo_, lo_, MPFR_RNDD);
  mpfr_log(r.hi_, hi_, MPFR_RNDU);
  return r;
}

namespace {

// Lipschitz-1 enclosure for sin/cos: f(mid) +- radius, clamped to [-1, 1].
template <typename F>
Interval lipschitz_trig(const Interval& x, F f) {
  const Bits p = x.precision();
  Scratch mid(p + 2), rad(p), a(p), b(p);
  mpfr_add(mid.v, x.lo(), x.hi(), MPFR_RNDN);
  mpfr_div_2ui(mid.v, mid.v, 1, MPFR_RNDN);
  mpfr_sub(a.v, x.hi(), mid.v, MPFR_RNDU);
  mpfr_sub(b.v, mid.v, x.lo(), MPFR_RNDU);
  mpfr_max(rad.v, a.v, b.v, MPFR_RNDU);
  f(a.v, mid.v, MPFR_RNDD);
  f(b.v, mid.v, MPFR_RNDU);
  mpfr_sub(a.v, a.v, rad.v, MPFR_RNDD);
  mpfr_add(b.v, b.v, rad.v, MPFR_RNDU);
  if (mpfr_cmp_si(a.v, -1) < 0) mpfr_set_si(a.v, -1, MPFR_RNDD);
  if (mpfr_cmp_si(b.v, 1) > 0) mpfr_set_si(b.v, 1, MPFR_RNDU);
  return Interval::from_mpfr(a.v, b.v, p);
}

}  // namespace

Interval Interval::cos() const {
  return lipschitz_trig(*this, [](mpfr_ptr r, mpfr_srcptr v, mpfr_rnd_t rnd) { mpfr_cos(r, v, rnd); });
}

Interval Interval::sin() const {
  return lipschitz_trig(*this, [](mpfr_ptr r, mpfr_srcptr v, mpfr_rnd_t rnd) { mpfr_sin(r, v, rnd); });
}

Interval Interval::pow(unsigned long n) const {
  if (n == 0) return Interval(1L, precision());
  // x^n is increasing for odd n; for even n it is |x|^n.
  const Interval base = (n % 2 == 0) ? abs() : *this;
  Interval r(precision(), Uninit{});
  mpfr_pow_ui(r.lo_, base.lo_, n, MPFR_RNDD);
  mpfr_pow_ui(r.hi_, base.hi_, n, MPFR_RNDU);
  return r;
}

Interval Interval::hull(const Interval& other) const {
  const Bits p = join(*this, other);
  Interval r(p, Uninit{});
  mpfr_min(r.lo_, lo_, other.lo_, MPFR_RNDD);
  mpfr_max(r.hi_, hi_, other.hi_, MPFR_RNDU);
  return r;
}

Interval Interval::midpoint() const {
  const Bits p = precision();
  Scratch m(p + 2);
  mpfr_add(m.v, lo_, hi_, MPFR_RNDN);
  mpfr_div_2ui(m.v, m.v, 1, MPFR_RNDN);
  return from_mpfr(m.v, m.v, p);
}

Interval Interval::with_precision(Bits prec) const { return from_mpfr(lo_, hi_, prec); }

std::string Interval::to_string(int digits) const {
  auto render = [digits](mpfr_srcptr v, mpfr_rnd_t rnd) {
    char* buf = nullptr;
    mpfr_asprintf(&buf, "%.*R*g", digits, rnd, v);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
  };
  return "[" + render(lo_, MPFR_RNDD) + ", " + render(hi_, MPFR_RNDU) + "]";
}

Interval operator+(Interval lhs, const Interval& rhs) { return lhs += rhs; }
Interval operator-(Interval lhs, const Interval& rhs) { return lhs -= rhs; }
Interval operator*(Interval lhs, const Interval& rhs) { return lhs *= rhs; }
Interval operator/(Interval lhs, const Interval& rhs) { return lhs /= rhs; }

ComplexInterval ComplexInterval::expi(const Interval& phase) {
  return {phase.cos(), phase.sin()};
}

ComplexInterval& ComplexInterval::operator+=(const ComplexInterval& rhs) {
  re += rhs.re;
  im += rhs.im;
  return *this;
}

ComplexInterval& ComplexInterval::operator-=(const ComplexInterval& rhs) {
  re -= rhs.re;
  im -= rhs.im;
  return *this;
}

ComplexInterval& ComplexInterval::operator*=(const ComplexInterval& rhs) {
  Interval r = re * rhs.re - im * rhs.im;
  Interval i = re * rhs.im + im * rhs.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

ComplexInterval& ComplexInterval::operator*=(const Interval& rhs) {
  re *= rhs;
  im *= rhs;
  return *this;
}

Interval ComplexInterval::abs_sqr() const { return re.sqr() + im.sqr(); }

Interval ComplexInterval::abs() const { return abs_sqr().sqrt(); }

ComplexInterval ComplexInterval::inflated(double radius) const {
  const Interval pad = Interval::from_double(-radius, re.precision())
                           .hull(Interval::from_double(radius, re.precision()));
  return {re + pad, im + pad};
}

ComplexInterval operator+(ComplexInterval lhs, const ComplexInterval& rhs) { return lhs += rhs; }
ComplexInterval operator-(ComplexInterval lhs, const ComplexInterval& rhs) { return lhs -= rhs; }
ComplexInterval operator*(ComplexInterval lhs, const ComplexInterval& rhs) { return lhs *= rhs; }

}  // namespace normalis
