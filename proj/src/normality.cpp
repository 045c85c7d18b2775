#include "normalis/normality.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "normalis/error.hpp"

namespace normalis {

namespace {

void check_base(long b) {
  if (b < 2) throw InputError("base must be at least 2, got " + std::to_string(b));
}

// Base-b digits of n, most significant first, left-padded with zeros to `width`.
std::vector<std::uint32_t> digits_of(mpz_class n, long b, std::size_t width) {
  std::vector<std::uint32_t> out(width, 0);
  for (std::size_t k = width; k-- > 0 && sgn(n) > 0;) {
    out[k] = static_cast<std::uint32_t>(mpz_fdiv_q_ui(n.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(b)));
  }
  return out;
}

mpz_class floor_scaled(const mpq_class& x, const mpz_class& scale) {
  const mpq_class y = x * scale;
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
  return f;
}

}  // namespace

ExtractionBudget extraction_budget(const EquicontractiveIFS& ifs, long b, std::size_t N) {
  check_base(b);
  const double lam = std::fabs(ifs.lambda_double());
  const double diam = attractor_hull(ifs).width().to_double();
  const double need = static_cast<double>(N) * std::log(static_cast<double>(b)) + std::max(0.0, std::log(diam));
  ExtractionBudget out;
  out.depth = static_cast<std::size_t>(std::ceil(need / -std::log(lam))) + 8;
  out.bits = static_cast<Bits>(std::ceil(static_cast<double>(N) * std::log2(static_cast<double>(b)))) + 64;
  return out;
}

std::vector<std::uint32_t> certified_prefix(const Interval& enclosure, long b, std::size_t N) {
  check_base(b);
  if (!enclosure.is_finite()) throw InputError("digit extraction needs a finite enclosure");
  const mpq_class lo = enclosure.lo_rational(), hi = enclosure.hi_rational();
  if (lo < 0 || hi > 1) throw InputError("digit extraction needs a point in [0, 1]; normalize the system first");
  const mpz_class scale = integer_power(b, N);
  mpz_class a = floor_scaled(lo, scale), c = floor_scaled(hi, scale);
  if (c >= scale) c = scale - 1;  // hi = 1 can only share a prefix of (b-1)s
  const auto da = digits_of(a, b, N), dc = digits_of(c, b, N);
  std::size_t j = 0;
  while (j < N && da[j] == dc[j]) ++j;
  return std::vector<std::uint32_t>(da.begin(), da.begin() + static_cast<std::ptrdiff_t>(j));
}

DigitStream extract_digits(const PointRefiner& refine, long b, std::size_t N, const ExtractionBudget& budget) {
  check_base(b);
  DigitStream out;
  out.base = b;
  out.requested = N;
  std::size_t depth = std::max<std::size_t>(budget.depth, 1);
  Bits bits = std::max<Bits>(budget.bits, 64);
  for (int round = 0; round <= budget.max_rounds; ++round) {
    const Bits use = std::min(bits, precision_cap());
    note_precision_used(use);
    const CertifiedPoint pt = refine(depth, use);
    auto prefix = certified_prefix(pt.enclosure, b, N);
    if (prefix.size() > out.digits.size()) out.digits = std::move(prefix);
    if (out.digits.size() == N) return out;
    depth *= 2;
    bits *= 2;
  }
  out.boundary = true;
  return out;
}

DigitStream extract_sample_digits(const PointSampler& sampler, std::uint64_t index, long b, std::size_t N) {
  return extract_digits([&](std::size_t depth, Bits bits) { return sampler.point(index, depth, bits); }, b, N,
                        extraction_budget(sampler.ifs(), b, N));
}

DigitStream extract_digits(const mpq_class& x, long b, std::size_t N) {
  check_base(b);
  if (x < 0 || x >= 1) throw InputError("digit extraction needs x in [0, 1), got " + x.get_str());
  DigitStream out;
  out.base = b;
  out.requested = N;
  out.digits = digits_of(floor_scaled(x, integer_power(b, N)), b, N);
  return out;
}

mpq_class shifted_prefix(const DigitStream& s, std::size_t n, std::size_t K) {
  if (n + K > s.size())
    throw InputError("stream has " + std::to_string(s.size()) + " digits; " + std::to_string(n + K) + " required");
  mpz_class num = 0;
  for (std::size_t j = 0; j < K; ++j) num = num * s.base + s.digits[n + j];
  mpq_class out(num, integer_power(s.base, K));
  out.canonicalize();
  return out;
}

std::size_t weyl_guard_digits(long b) {
  check_base(b);
  return static_cast<std::size_t>(std::ceil(53.0 / std::log2(static_cast<double>(b))));
}

std::vector<double> orbit_values(const DigitStream& s, std::size_t count) {
  const std::size_t G = weyl_guard_digits(s.base);
  if (count + G > s.size())
    throw InputError("orbit of length " + std::to_string(count) + " needs " + std::to_string(count + G) +
                     " digits (" + std::to_string(G) + " guard digits); stream has " + std::to_string(s.size()));
  const double b = static_cast<double>(s.base);
  std::vector<double> out(count);
  for (std::size_t n = 0; n < count; ++n) {
    double v = 0;
    for (std::size_t j = G; j-- > 0;) v = (v + s.digits[n + j]) / b;
    out[n] = v < 1.0 ? v : std::nextafter(1.0, 0.0);
  }
  return out;
}

WeylSeries weyl_sums(const DigitStream& s, long l, const std::vector<std::size_t>& grid) {
  if (l == 0) throw InputError("weyl_sums requires l != 0");
  if (grid.empty()) throw InputError("weyl_sums needs a nonempty grid");
  std::vector<std::size_t> g = grid;
  std::sort(g.begin(), g.end());
  if (g.front() == 0) throw InputError("grid entries must be positive");
  const auto y = orbit_values(s, g.back() + 1);
  WeylSeries out;
  out.l = l;
  out.grid = g;
  std::complex<double> acc = 0;
  std::size_t k = 0;
  for (std::size_t n = 1; n <= g.back(); ++n) {
    const double ph = 2 * std::numbers::pi * std::remainder(static_cast<double>(l) * y[n], 1.0);
    acc += std::complex<double>(std::cos(ph), std::sin(ph));
    while (k < g.size() && g[k] == n) {
      out.averages.push_back(acc / static_cast<double>(n));
      ++k;
    }
  }
  return out;
}

double star_discrepancy(std::vector<double> points) {
  if (points.empty()) throw InputError("star discrepancy needs at least one point");
  for (double x : points)
    if (!(x >= 0 && x < 1)) throw InputError("star discrepancy points must lie in [0, 1)");
  std::sort(points.begin(), points.end());
  const double N = static_cast<double>(points.size());
  double d = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = points[i];
    d = std::max({d, static_cast<double>(i + 1) / N - x, x - static_cast<double>(i) / N});
  }
  return d;
}

ChiSquareReport kgram_test(const DigitStream& s, int k, double alpha) {
  if (k < 1 || k > 8) throw InputError("k-gram order must be in 1..8");
  const double cells = std::pow(static_cast<double>(s.base), k);
  if (static_cast<double>(s.size()) < 10 * cells)
    throw InputError("k-gram test of order " + std::to_string(k) + " needs at least " +
                     std::to_string(static_cast<long>(10 * cells)) + " digits; stream has " + std::to_string(s.size()));
  const std::size_t m = static_cast<std::size_t>(cells);
  std::vector<std::uint64_t> counts(m, 0);
  std::size_t window = 0;
  for (std::size_t n = 0; n < s.size(); ++n) {
    window = (window * static_cast<std::size_t>(s.base) + s.digits[n]) % m;
    if (n + 1 >= static_cast<std::size_t>(k)) ++counts[window];
  }
  return chi_square_uniform(counts, alpha);
}

MonobitReport monobit_test(const DigitStream& s, double z_max) {
  if (s.size() == 0) throw InputError("monobit test needs digits");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(s.base), 0);
  for (auto d : s.digits) ++counts[d];
  const double N = static_cast<double>(s.size());
  const double p = 1.0 / static_cast<double>(s.base);
  const double sd = std::sqrt(N * p * (1 - p));
  MonobitReport r;
  for (auto c : counts) r.z = std::max(r.z, std::fabs(static_cast<double>(c) - N * p) / sd);
  r.pass = r.z <= z_max;
  return r;
}

PointStatistics analyze_stream(const DigitStream& s, std::size_t N, int max_k, long l, double alpha) {
  PointStatistics out;
  out.boundary = s.boundary;
  if (N > s.size()) throw InputError("analysis of " + std::to_string(N) + " digits on a stream of " + std::to_string(s.size()));
  DigitStream head = s;
  head.digits.resize(N);
  out.digits = N;
  out.monobit = monobit_test(head);
  out.kgram_pass = true;
  for (int k = 1; k <= max_k; ++k) {
    out.kgram.push_back(kgram_test(head, k, alpha));
    out.kgram_pass = out.kgram_pass && out.kgram.back().pass;
  }
  out.weyl_modulus = std::abs(weyl_sums(s, l, {N}).averages[0]);
  out.discrepancy = star_discrepancy(orbit_values(s, N));
  return out;
}

RotationOrbit rotation_orbit(long b, const ExactNumber& lambda, std::size_t N) {
  check_base(b);
  if (!(lambda > ExactNumber(0L) && lambda < ExactNumber(1L))) throw InputError("rotation_orbit requires 0 < lambda < 1");
  const RotationNumber rot(b, lambda);
  const Bits bits = 128 + static_cast<Bits>(std::log2(static_cast<double>(N) + 2));
  RotationOrbit out;
  out.theta = rot.theta(bits);
  const ThetaDecision d = theta_decide(b, lambda, 64, 1);
  std::size_t count = N;
  if (d.verdict == ThetaDecision::Verdict::Rational) {
    out.periodic = true;
    out.period = d.p;
    count = std::min<std::size_t>(N, static_cast<std::size_t>(d.p));
  }
  std::vector<double> mids;
  for (std::size_t n = 1; n <= count; ++n) {
    const long nn = static_cast<long>(n);
    long k;
    Interval frac(bits);
    if (out.periodic) {
      const mpq_class t(d.q * nn, d.p);
      mpz_class f;
      mpz_fdiv_q(f.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
      k = f.get_si();
      frac = Interval(mpq_class(t - f), bits);
    } else {
      const Interval s = Interval(nn, bits) * out.theta;
      mpz_class f;
      k = s.common_floor(f) ? f.get_si() : rot.floor_multiple(nn);
      frac = s - Interval(k, bits);
    }
    out.nprime.push_back(k);
    mids.push_back(std::clamp(frac.mid_double(), 0.0, std::nextafter(1.0, 0.0)));
    out.fractions.push_back(std::move(frac));
  }
  out.discrepancy = mids.empty() ? 0.0 : star_discrepancy(mids);
  return out;
}

DigitWord partition_cell(const CertifiedPoint& x, long m, const RotationNumber& rot) {
  const long len = rot.floor_multiple(m);
  if (static_cast<std::size_t>(len) > x.digits.size())
    throw InputError("partition cell of m = " + std::to_string(m) + " needs " + std::to_string(len) +
                     " digits; the point carries " + std::to_string(x.digits.size()) + "; sample deeper");
  return DigitWord(x.digits.begin(), x.digits.begin() + len);
}

}  // namespace normalis
