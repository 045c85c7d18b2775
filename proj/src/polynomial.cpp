#include "normalis/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "normalis/error.hpp"

namespace normalis {

Polynomial::Polynomial(std::vector<mpq_class> coeffs) : coeffs_(std::move(coeffs)) {
  for (auto& c : coeffs_) c.canonicalize();
  trim();
}

Polynomial Polynomial::from_integers(const std::vector<long>& coeffs) {
  std::vector<mpq_class> q;
  q.reserve(coeffs.size());
  for (long c : coeffs) q.emplace_back(c);
  return Polynomial(std::move(q));
}

Polynomial Polynomial::monomial(const mpq_class& c, std::size_t degree) {
  std::vector<mpq_class> q(degree + 1, mpq_class(0));
  q[degree] = c;
  return Polynomial(std::move(q));
}

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

bool Polynomial::has_integer_coeffs() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(),
                     [](const mpq_class& c) { return c.get_den() == 1; });
}

Polynomial Polynomial::primitive() const {
  if (is_zero()) return *this;
  mpz_class den_lcm = 1;
  for (const auto& c : coeffs_) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den_mpz_t());
  std::vector<mpz_class> ints;
  ints.reserve(coeffs_.size());
  mpz_class content = 0;
  for (const auto& c : coeffs_) {
    mpz_class v = c.get_num() * (den_lcm / c.get_den());
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), v.get_mpz_t());
    ints.push_back(std::move(v));
  }
  if (sgn(coeffs_.back()) < 0) content = -content;
  std::vector<mpq_class> out;
  out.reserve(ints.size());
  for (auto& v : ints) out.emplace_back(mpz_class(v / content));
  return Polynomial(std::move(out));
}

bool Polynomial::is_primitive() const {
  if (is_zero() || !has_integer_coeffs() || sgn(leading()) < 0) return false;
  mpz_class content = 0;
  for (const auto& c : coeffs_) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.get_num_mpz_t());
  return content == 1;
}

Polynomial Polynomial::monic() const {
  if (is_zero()) return *this;
  std::vector<mpq_class> out = coeffs_;
  const mpq_class lead = leading();
  for (auto& c : out) c /= lead;
  return Polynomial(std::move(out));
}

Polynomial Polynomial::reversed() const {
  std::vector<mpq_class> out(coeffs_.rbegin(), coeffs_.rend());
  return Polynomial(std::move(out));
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<mpq_class> out(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) out[k - 1] = coeffs_[k] * static_cast<unsigned long>(k);
  return Polynomial(std::move(out));
}

mpq_class Polynomial::operator()(const mpq_class& x) const {
  mpq_class acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Interval Polynomial::operator()(const Interval& x) const {
  const Bits p = x.precision();
  Interval acc(p);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= x;
    acc += Interval(*it, p);
  }
  return acc;
}

ComplexInterval Polynomial::operator()(const ComplexInterval& z) const {
  const Bits p = z.re.precision();
  ComplexInterval acc(p);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= z;
    acc.re += Interval(*it, p);
  }
  return acc;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (coeffs_.size() < rhs.coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), mpq_class(0));
  for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  if (coeffs_.size() < rhs.coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), mpq_class(0));
  for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& rhs) {
  if (is_zero() || rhs.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  std::vector<mpq_class> out(coeffs_.size() + rhs.coeffs_.size() - 1, mpq_class(0));
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * rhs.coeffs_[j];
  }
  coeffs_ = std::move(out);
  trim();
  return *this;
}

Polynomial Polynomial::operator-() const {
  std::vector<mpq_class> out = coeffs_;
  for (auto& c : out) c = -c;
  return Polynomial(std::move(out));
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& divisor) const {
  if (divisor.is_zero()) throw InputError("polynomial division by zero");
  std::vector<mpq_class> rem = coeffs_;
  const int dd = divisor.degree();
  const int nd = degree();
  if (nd < dd) return {Polynomial(), *this};
  std::vector<mpq_class> quot(static_cast<std::size_t>(nd - dd + 1), mpq_class(0));
  const mpq_class& lead = divisor.leading();
  for (int k = nd - dd; k >= 0; --k) {
    const mpq_class f = rem[static_cast<std::size_t>(k + dd)] / lead;
    quot[static_cast<std::size_t>(k)] = f;
    if (f == 0) continue;
    for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(k + j)] -= f * divisor.coeffs_[static_cast<std::size_t>(j)];
  }
  rem.resize(static_cast<std::size_t>(dd));
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

std::vector<long> Polynomial::integer_coeffs_as_long() const {
  std::vector<long> out;
  for (const auto& c : coeffs_) {
    if (c.get_den() != 1 || !c.get_num().fits_slong_p()) throw InputError("coefficient is not a machine integer");
    out.push_back(c.get_num().get_si());
  }
  return out;
}

std::string Polynomial::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const mpq_class& c = coeffs_[static_cast<std::size_t>(k)];
    if (c == 0) continue;
    mpq_class mag = abs(c);
    os << (sgn(c) < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    if (mag != 1 || k == 0) os << mag.get_str();
    if (k >= 1) os << "x";
    if (k >= 2) os << "^" << k;
    first = false;
  }
  return os.str();
}

Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }

Polynomial gcd(Polynomial a, Polynomial b) {
  while (!b.is_zero()) {
    Polynomial r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

ExtendedGcd extended_gcd(const Polynomial& a, const Polynomial& b) {
  Polynomial r0 = a, r1 = b;
  Polynomial s0 = Polynomial::constant(1), s1;
  Polynomial t0, t1 = Polynomial::constant(1);
  while (!r1.is_zero()) {
    auto [q, r] = r0.divmod(r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    Polynomial s2 = s0 - q * s1;
    Polynomial t2 = t0 - q * t1;
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.is_zero()) return {r0, s0, t0};
  const mpq_class lead = r0.leading();
  const Polynomial inv = Polynomial::constant(mpq_class(1) / lead);
  return {r0 * inv, s0 * inv, t0 * inv};
}

namespace {

std::vector<Polynomial> sturm_chain(const Polynomial& p) {
  std::vector<Polynomial> chain{p, p.derivative()};
  while (!chain.back().is_zero()) {
    Polynomial r = chain[chain.size() - 2] % chain.back();
    if (r.is_zero()) break;
    chain.push_back(-r);
  }
  return chain;
}

int sign_changes(const std::vector<Polynomial>& chain, const mpq_class& x) {
  int changes = 0;
  int last = 0;
  for (const auto& q : chain) {
    const int s = q.sign_at(x);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

int count_real_roots(const Polynomial& p, const mpq_class& lo, const mpq_class& hi) {
  if (p.degree() <= 0) return 0;
  const Polynomial sf = p.divmod(gcd(p, p.derivative())).first;
  const auto chain = sturm_chain(sf);
  return sign_changes(chain, lo) - sign_changes(chain, hi);
}

mpq_class root_modulus_bound(const Polynomial& p) {
  mpq_class m = 0;
  const mpq_class lead = abs(p.leading());
  for (int k = 0; k < p.degree(); ++k) m = std::max(m, mpq_class(abs(p.coeff(static_cast<std::size_t>(k))) / lead));
  return m + 1;
}

Interval RootDisk::modulus() const {
  Interval m = center.abs();
  const Interval pad = -radius;
  Interval lo = m + pad;
  Interval hi = m + radius;
  Interval out = lo.hull(hi);
  if (out.lo_double() < 0) out = Interval(0L, out.precision()).hull(hi);
  return out;
}

namespace {

using CLD = std::complex<long double>;

std::vector<CLD> durand_kerner_ld(const Polynomial& p) {
  const int n = p.degree();
  std::vector<long double> c(static_cast<std::size_t>(n + 1));
  const mpq_class lead = p.leading();
  for (int k = 0; k <= n; ++k) c[static_cast<std::size_t>(k)] = static_cast<long double>(mpq_class(p.coeff(static_cast<std::size_t>(k)) / lead).get_d());
  auto eval = [&](CLD z) {
    CLD acc = 0;
    for (int k = n; k >= 0; --k) acc = acc * z + c[static_cast<std::size_t>(k)];
    return acc;
  };
  const long double radius = static_cast<long double>(root_modulus_bound(p.monic()).get_d());
  std::vector<CLD> z(static_cast<std::size_t>(n));
  const CLD seed(0.4L, 0.9L);
  for (int k = 0; k < n; ++k) z[static_cast<std::size_t>(k)] = std::pow(seed, k) * std::min(radius, 1.0L + radius / 2);
  for (int iter = 0; iter < 2000; ++iter) {
    long double delta = 0;
    for (int i = 0; i < n; ++i) {
      CLD denom = 1;
      for (int j = 0; j < n; ++j)
        if (j != i) denom *= (z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)]);
      if (std::abs(denom) == 0) denom = 1e-30L;
      const CLD step = eval(z[static_cast<std::size_t>(i)]) / denom;
      z[static_cast<std::size_t>(i)] -= step;
      delta = std::max(delta, std::abs(step) / std::max(1.0L, std::abs(z[static_cast<std::size_t>(i)])));
    }
    if (delta < 1e-18L) break;
  }
  return z;
}

ComplexInterval point(const ComplexInterval& z) { return {z.re.midpoint(), z.im.midpoint()}; }

ComplexInterval divide(const ComplexInterval& a, const ComplexInterval& b) {
  const Interval den = b.abs_sqr();
  ComplexInterval num = a * b.conj();
  return {num.re / den, num.im / den};
}

// One precision-P Newton polish of every approximation.
void newton_polish(const Polynomial& p, const Polynomial& dp, std::vector<ComplexInterval>& z, Bits prec) {
  for (auto& zi : z) {
    zi = {zi.re.with_precision(prec), zi.im.with_precision(prec)};
    for (int step = 0; step < 3; ++step) {
      const ComplexInterval d = dp(zi);
      if (d.abs_sqr().contains_zero()) break;
      zi = point(zi - divide(p(zi), d));
    }
  }
}

void durand_kerner_mp(const Polynomial& p, std::vector<ComplexInterval>& z, Bits prec, int iterations) {
  const Polynomial m = p.monic();
  const std::size_t n = z.size();
  for (int iter = 0; iter < iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      ComplexInterval denom = ComplexInterval::one(prec);
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) denom *= (z[i] - z[j]);
      if (denom.abs_sqr().contains_zero()) continue;
      z[i] = point(z[i] - divide(m(z[i]), denom));
    }
  }
}

std::optional<std::vector<RootDisk>> certify(const Polynomial& p, const Polynomial& dp,
                                             std::vector<ComplexInterval>& z, Bits prec) {
  const std::size_t n = z.size();
  std::vector<RootDisk> disks;
  disks.reserve(n);
  for (auto& zi : z) {
    RootDisk disk;
    // Snap near-real approximations onto the axis; certification decides whether that was valid.
    ComplexInterval c = zi;
    const int snap = static_cast<int>(std::min<Bits>(prec / 2, 900));
    if (c.im.magnitude() <= std::ldexp(1.0 + c.re.magnitude(), -snap)) {
      c.im = Interval(prec);
      disk.real = true;
    }
    const ComplexInterval pv = p(c);
    const ComplexInterval dv = dp(c);
    const Interval dmod = dv.abs();
    if (!dmod.is_positive()) return std::nullopt;
    disk.radius = Interval(static_cast<long>(n), prec) * pv.abs() / dmod;
    disk.radius = Interval::from_mpfr(disk.radius.hi(), disk.radius.hi(), prec);
    disk.center = c;
    disks.push_back(std::move(disk));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Interval dist = (disks[i].center - disks[j].center).abs();
      if (!dist.certainly_greater(disks[i].radius + disks[j].radius)) return std::nullopt;
    }
  return disks;
}

}  // namespace

std::optional<std::vector<RootDisk>> isolate_complex_roots(const Polynomial& p, Bits start_bits, Bits cap) {
  const int n = p.degree();
  if (n < 1) return std::vector<RootDisk>{};
  const Polynomial dp = p.derivative();
  const auto seeds = durand_kerner_ld(p);
  std::vector<ComplexInterval> z;
  z.reserve(seeds.size());
  for (const auto& s : seeds)
    z.emplace_back(Interval::from_double(static_cast<double>(s.real()), 64).midpoint(),
                   Interval::from_double(static_cast<double>(s.imag()), 64).midpoint());
  Bits polished = 64;
  for (Bits prec = std::max<Bits>(start_bits, 64); prec <= cap; prec *= 2) {
    note_precision_used(prec);
    for (Bits b = std::max<Bits>(polished * 2, 128); b <= prec; b *= 2) newton_polish(p, dp, z, b);
    newton_polish(p, dp, z, prec);
    polished = prec;
    if (auto disks = certify(p, dp, z, prec)) return disks;
    durand_kerner_mp(p, z, prec, 60);
    newton_polish(p, dp, z, prec);
    if (auto disks = certify(p, dp, z, prec)) return disks;
  }
  return std::nullopt;
}

std::pair<mpq_class, mpq_class> refine_real_root(const Polynomial& p, mpq_class lo, mpq_class hi, long bits) {
  const mpq_class target(mpz_class(1), mpz_class(1) << static_cast<mp_bitcnt_t>(std::max(bits, 0L)));
  int slo = p.sign_at(lo);
  if (slo == 0) return {lo, lo};
  if (p.sign_at(hi) == 0) return {hi, hi};
  auto bisect_to = [&](const mpq_class& width) {
    while (hi - lo > width) {
      mpq_class mid = (lo + hi) / 2;
      const int s = p.sign_at(mid);
      if (s == 0) {
        lo = hi = mid;
        return;
      }
      if (s == slo) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  };
  bisect_to(std::max(target, mpq_class(1, 1L << 40)));
  if (hi - lo <= target) return {lo, hi};
  // Newton polish in MPFR, then certify a tiny bracket by exact sign evaluation.
  const Bits prec = static_cast<Bits>(bits + 64);
  const Polynomial dp = p.derivative();
  Interval x = Interval((lo + hi) / 2, 64).midpoint();
  for (Bits b = 128; ; b = std::min<Bits>(b * 2, prec)) {
    x = x.with_precision(b);
    for (int it = 0; it < 2; ++it) {
      const Interval d = dp(x);
      if (d.contains_zero()) break;
      x = (x - p(x) / d).midpoint();
    }
    if (b == prec) break;
  }
  const mpq_class c = x.lo_rational();
  const mpq_class a = c - target / 2;
  const mpq_class b = c + target / 2;
  if (a > lo && b < hi) {
    const int sa = p.sign_at(a);
    const int sb = p.sign_at(b);
    if (sa == 0) return {a, a};
    if (sb == 0) return {b, b};
    if (sa != sb) return {a, b};
  }
  bisect_to(target);
  return {lo, hi};
}

namespace {

std::vector<mpz_class> positive_divisors(mpz_class n) {
  n = abs(n);
  if (n > mpz_class("1000000000000")) throw InputError("leading coefficient too large for factor search");
  std::vector<mpz_class> out;
  for (mpz_class d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      if (d * d != n) out.push_back(n / d);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Root groups closed under conjugation: a real root or a conjugate pair.
std::vector<std::vector<std::size_t>> conjugate_units(const std::vector<RootDisk>& roots) {
  std::vector<std::vector<std::size_t>> units;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    if (roots[i].real) {
      units.push_back({i});
      continue;
    }
    std::size_t best = i;
    double best_d = 1e300;
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (used[j] || roots[j].real) continue;
      const double d = std::hypot(roots[j].approx_re() - roots[i].approx_re(), roots[j].approx_im() + roots[i].approx_im());
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best == i) {
      units.push_back({i});
    } else {
      used[best] = true;
      units.push_back({i, best});
    }
  }
  return units;
}

enum class Candidate { Rejected, Factor, Unresolved };

Candidate test_subset(const Polynomial& p, const std::vector<RootDisk>& roots, const std::vector<std::size_t>& members,
                      const mpz_class& lead_divisor, Bits prec, Polynomial& factor_out) {
  // Coefficients of c * prod (x - root), roots taken as rectangles around the disks.
  std::vector<ComplexInterval> coeffs{ComplexInterval(Interval(lead_divisor, prec), Interval(prec))};
  for (std::size_t idx : members) {
    const RootDisk& r = roots[idx];
    const Interval spread = (-r.radius).hull(r.radius);
    const ComplexInterval root = {r.center.re + spread, r.center.im + spread};
    std::vector<ComplexInterval> next(coeffs.size() + 1, ComplexInterval(prec));
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      next[k + 1] += coeffs[k];
      next[k] -= coeffs[k] * root;
    }
    coeffs = std::move(next);
  }
  std::vector<mpq_class> ints;
  bool unresolved = false;
  for (const auto& c : coeffs) {
    if (!c.im.contains_zero()) return Candidate::Rejected;
    if (!c.re.contains_integer()) return Candidate::Rejected;
    mpz_class lo, hi;
    mpfr_get_z(lo.get_mpz_t(), c.re.lo(), MPFR_RNDU);
    mpfr_get_z(hi.get_mpz_t(), c.re.hi(), MPFR_RNDD);
    if (lo != hi) unresolved = true;
    ints.emplace_back(lo);
  }
  if (unresolved) return Candidate::Unresolved;
  Polynomial g(std::move(ints));
  if (g.degree() >= 1 && (p % g).is_zero()) {
    factor_out = g.primitive();
    return Candidate::Factor;
  }
  return Candidate::Rejected;
}

}  // namespace

std::optional<Polynomial> find_factor(const Polynomial& p_in, Bits cap) {
  const Polynomial p = p_in.primitive();
  const int n = p.degree();
  if (n <= 1) return std::nullopt;
  if (p.coeff(0) == 0) return Polynomial::from_integers({0, 1});
  if (n > 24) throw InputError("irreducibility check supports degree <= 24");
  const Polynomial g = gcd(p, p.derivative());
  if (g.degree() >= 1) return g.primitive();

  const auto divisors = positive_divisors(p.leading().get_num());
  for (Bits prec = 128; prec <= cap; prec *= 2) {
    auto roots = isolate_complex_roots(p, prec, cap);
    if (!roots) break;
    const auto units = conjugate_units(*roots);
    const std::size_t u = units.size();
    if (u > 24) throw InputError("too many root groups for factor search");
    bool unresolved = false;
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << u); ++mask) {
      std::vector<std::size_t> members;
      for (std::size_t k = 0; k < u; ++k)
        if (mask & (std::uint64_t{1} << k)) members.insert(members.end(), units[k].begin(), units[k].end());
      if (2 * members.size() > static_cast<std::size_t>(n)) continue;
      for (const auto& c : divisors) {
        Polynomial factor;
        switch (test_subset(p, *roots, members, c, prec, factor)) {
          case Candidate::Factor: return factor;
          case Candidate::Unresolved: unresolved = true; break;
          case Candidate::Rejected: break;
        }
      }
    }
    if (!unresolved) return std::nullopt;
  }
  throw PrecisionError("irreducibility undecided at precision cap for " + p.to_string());
}

}  // namespace normalis
