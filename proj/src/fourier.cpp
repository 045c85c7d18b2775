#include "normalis/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "normalis/error.hpp"
#include "normalis/parallel.hpp"
#include "normalis/stats.hpp"

namespace normalis {

namespace {

unsigned resolve_workers(unsigned w) { return w == 0 ? default_workers() : w; }

using LevelWeights = std::vector<std::pair<std::uint32_t, Interval>>;

// Smallest K with exp(A |lambda|^K) - 1 <= target, where A = 2 pi |xi| D / (1 - |lambda|);
// the bound itself is evaluated in interval arithmetic.
std::pair<std::size_t, double> truncation(const Interval& xi_abs, const Interval& spread, const Interval& lam_abs,
                                          double target, std::size_t max_terms) {
  const Bits prec = 64;
  const Interval two_pi = Interval::pi(prec) * Interval(2L, prec);
  const Interval a = two_pi * xi_abs.with_precision(prec) * spread.with_precision(prec) /
                     (Interval(1L, prec) - lam_abs.with_precision(prec));
  if (!a.is_finite()) throw InputError("frequency or translations too large for a finite tail bound");
  if (a.hi_double() == 0) return {0, 0.0};
  const double budget = std::log1p(target);
  const double lam = lam_abs.hi_double();
  double k_est = std::ceil(std::log(budget / a.hi_double()) / std::log(lam));
  std::size_t k = k_est > 0 ? static_cast<std::size_t>(k_est) : 0;
  for (;; ++k) {
    if (k > max_terms)
      throw PrecisionError("the product needs more than " + std::to_string(max_terms) +
                           " factors for this frequency; raise the term cap or the target error");
    const Interval y = a * lam_abs.with_precision(prec).pow(k);
    mpfr_t t;
    mpfr_init2(t, prec);
    mpfr_expm1(t, y.hi(), MPFR_RNDU);
    const double tail = mpfr_get_d(t, MPFR_RNDU);
    mpfr_clear(t);
    if (tail <= target) return {k, tail};
  }
}

FourierValue product_core(const EquicontractiveIFS& ifs, const ExactNumber& centre, const Interval& xi,
                          double target_error, const FourierOptions& options,
                          const std::function<const LevelWeights&(std::size_t)>& level) {
  if (!(target_error > 0)) throw InputError("target error must be positive");
  const Bits prec = options.bits + 32;
  const Interval lam = ifs.lambda().approx(prec);
  std::vector<Interval> u;
  double spread_hi = 0;
  for (const auto& t : ifs.translations()) {
    u.push_back((t - centre).approx(prec));
    spread_hi = std::max(spread_hi, u.back().magnitude());
  }
  const Interval spread = Interval::from_double(spread_hi, 64);
  const auto [K, tail] = truncation(xi.abs(), spread, lam.abs(), target_error, options.max_terms);

  const Interval two_pi_xi = Interval::pi(prec) * Interval(2L, prec) * xi.with_precision(prec);
  ComplexInterval acc = ComplexInterval::one(prec);
  Interval lam_n(1L, prec);
  for (std::size_t n = 0; n < K; ++n) {
    ComplexInterval factor{Interval(0L, prec), Interval(0L, prec)};
    const Interval step = two_pi_xi * lam_n;
    for (const auto& [i, w] : level(n)) {
      ComplexInterval e = ComplexInterval::expi(step * u[i]);
      e *= w;
      factor += e;
    }
    acc *= factor;
    lam_n *= lam;
  }
  // Recentring phase e^{2 pi i xi c / (1 - lambda)}.
  if (!centre.is_zero() && !(mpfr_zero_p(xi.lo()) && mpfr_zero_p(xi.hi()))) {
    const Interval shift = (centre / (ExactNumber(1L) - ifs.lambda())).approx(prec);
    acc *= ComplexInterval::expi(two_pi_xi * shift);
  }
  FourierValue out;
  out.value = acc;
  out.truncation_terms = K;
  out.tail_bound = tail;
  return out;
}

ExactNumber weighted_centre(const EquicontractiveIFS& ifs, const ProbVector& p) {
  ExactNumber c(0L);
  for (std::size_t i = 0; i < ifs.size(); ++i) c += ExactNumber(p[i]) * ifs.translations()[i];
  return c;
}

void check_system(const EquicontractiveIFS& ifs, const ProbVector& p) {
  if (p.size() != ifs.size()) throw InputError("probability vector does not match the IFS");
}

}  // namespace

FourierValue fourier_product(const EquicontractiveIFS& ifs, const ProbVector& p, const Interval& xi,
                             double target_error, const FourierOptions& options) {
  check_system(ifs, p);
  const Bits prec = options.bits + 32;
  LevelWeights weights;
  for (std::uint32_t i = 0; i < p.size(); ++i)
    if (sgn(p[i]) > 0) weights.emplace_back(i, Interval(p[i], prec));
  return product_core(ifs, weighted_centre(ifs, p), xi, target_error, options,
                      [&](std::size_t) -> const LevelWeights& { return weights; });
}

FourierValue fourier_product(const EquicontractiveIFS& ifs, const ProbVector& p, const ExactNumber& xi,
                             double target_error, const FourierOptions& options) {
  return fourier_product(ifs, p, xi.approx(options.bits + 32), target_error, options);
}

FourierValue fourier_model(const ModelWord& omega, const EquicontractiveIFS& ifs, const ProbVector& p,
                           const ModelAlphabet& alphabet, const Interval& xi, double target_error,
                           const FourierOptions& options) {
  check_system(ifs, p);
  if (alphabet.block_of.size() != ifs.size()) throw InputError("alphabet does not match the IFS");
  const Bits prec = options.bits + 32;
  std::vector<LevelWeights> per_block(alphabet.size());
  for (std::size_t k = 0; k < alphabet.size(); ++k)
    for (auto i : alphabet.blocks[k]) per_block[k].emplace_back(i, Interval(mpq_class(p[i] / alphabet.q[k]), prec));
  return product_core(ifs, weighted_centre(ifs, p), xi, target_error, options,
                      [&](std::size_t n) -> const LevelWeights& { return per_block[omega.block(n)]; });
}

double McEstimate::stderr_modulus() const { return std::hypot(stderr_re, stderr_im); }

McEstimate fourier_mc(const std::function<double(std::uint64_t)>& sample, double xi, std::size_t N,
                      unsigned workers) {
  if (N < 1000) throw InputError("fourier_mc needs N >= 1000, got " + std::to_string(N));
  std::vector<double> c(N), s(N);
  parallel_for(N, resolve_workers(workers), [&](std::size_t j) {
    // Reduce xi * x mod 1 before scaling by 2 pi to keep the phase accurate.
    const double x = sample(j);
    const double frac = std::remainder(xi * x, 1.0);
    const double phase = 2 * std::numbers::pi * frac;
    c[j] = std::cos(phase);
    s[j] = std::sin(phase);
  });
  const auto er = mean_and_stderr(c);
  const auto ei = mean_and_stderr(s);
  return McEstimate{er.mean, ei.mean, er.standard_error, ei.standard_error, N};
}

AtomicMeasure::AtomicMeasure(std::vector<mpq_class> positions, std::vector<mpq_class> weights)
    : x_(std::move(positions)), w_(std::move(weights)) {
  for (auto& x : x_) x.canonicalize();
  for (auto& w : w_) w.canonicalize();
  if (x_.empty() || x_.size() != w_.size()) throw InputError("atomic measure needs matching positions and weights");
  mpq_class sum = 0;
  for (const auto& w : w_) {
    if (sgn(w) <= 0) throw InputError("atomic measure weights must be positive");
    sum += w;
  }
  if (sum != 1) throw InputError("atomic measure weights sum to " + sum.get_str() + ", expected 1");
}

ComplexInterval AtomicMeasure::fourier(const mpq_class& xi, Bits bits) const {
  const Interval two_pi = Interval::pi(bits) * Interval(2L, bits);
  ComplexInterval acc{Interval(0L, bits), Interval(0L, bits)};
  for (std::size_t j = 0; j < x_.size(); ++j) {
    ComplexInterval e = ComplexInterval::expi(two_pi * Interval(mpq_class(xi * x_[j]), bits));
    e *= Interval(w_[j], bits);
    acc += e;
  }
  return acc;
}

ComplexInterval AtomicMeasure::fourier(const Interval& xi) const {
  const Bits bits = xi.precision();
  const Interval two_pi_xi = Interval::pi(bits) * Interval(2L, bits) * xi;
  ComplexInterval acc{Interval(0L, bits), Interval(0L, bits)};
  for (std::size_t j = 0; j < x_.size(); ++j) {
    ComplexInterval e = ComplexInterval::expi(two_pi_xi * Interval(x_[j], bits));
    e *= Interval(w_[j], bits);
    acc += e;
  }
  return acc;
}

AtomicMeasure AtomicMeasure::translated(const mpq_class& y) const {
  std::vector<mpq_class> xs = x_;
  for (auto& x : xs) x += y;
  return AtomicMeasure(std::move(xs), w_);
}

AtomicMeasure ScaleOp::apply(const AtomicMeasure& mu) const {
  std::vector<mpq_class> xs = mu.positions();
  for (auto& x : xs) x *= factor;
  return AtomicMeasure(std::move(xs), mu.weights());
}

EquicontractiveIFS ScaleOp::apply(const EquicontractiveIFS& ifs) const {
  std::vector<ExactNumber> t = ifs.translations();
  for (auto& ti : t) ti *= ExactNumber(factor);
  return EquicontractiveIFS(ifs.lambda(), std::move(t));
}

DiracModulusReport dirac_modulus_check(const AtomicMeasure& mu, const mpq_class& y, long l, Bits bits) {
  DiracModulusReport r;
  r.shifted = mu.translated(y).fourier(mpq_class(l), bits).abs();
  r.original = mu.fourier(mpq_class(l), bits).abs();
  r.equal = r.shifted.intersects(r.original);
  return r;
}

Lemma32Report lemma32_check(const AtomicMeasure& nu, double lambda, long l, const mpq_class& r,
                            const QuadratureOptions& options) {
  if (!(lambda > 0 && lambda < 1)) throw InputError("lemma32_check requires 0 < lambda < 1");
  if (l == 0) throw InputError("lemma32_check requires l != 0");
  if (sgn(r) <= 0) throw InputError("lemma32_check requires r > 0");

  Lemma32Report rep;
  const auto& xs = nu.positions();
  const auto& ws = nu.weights();
  rep.correlation = 0;
  for (std::size_t j = 0; j < xs.size(); ++j)
    for (std::size_t k = 0; k < xs.size(); ++k)
      if (abs(mpq_class(xs[j] - xs[k])) < r) rep.correlation += ws[j] * ws[k];
  const double log_inv = -std::log(lambda);
  rep.rhs = rep.correlation.get_d() + 1.0 / (r.get_d() * static_cast<double>(std::labs(l)) * log_inv);

  std::vector<double> x(xs.size()), w(ws.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    x[j] = xs[j].get_d();
    w[j] = ws[j].get_d();
  }
  const double two_pi_l = 2 * std::numbers::pi * static_cast<double>(l);
  auto g = [&](double t) {
    ++rep.evaluations;
    const double s = std::exp(t * log_inv);
    double re = 0, im = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double ph = two_pi_l * s * x[j];
      re += w[j] * std::cos(ph);
      im += w[j] * std::sin(ph);
    }
    return re * re + im * im;
  };

  // Adaptive Simpson on 64 initial panels; each accepted panel contributes the
  // Richardson-extrapolated value and |S2 - S1| / 15 to the error estimate.
  struct Panel {
    double a, b, fa, fm, fb, whole, tol;
    int depth;
  };
  const int panels = 64;
  std::vector<Panel> stack;
  for (int k = panels - 1; k >= 0; --k) {
    const double a = static_cast<double>(k) / panels, b = static_cast<double>(k + 1) / panels;
    const double m = 0.5 * (a + b);
    const double fa = g(a), fm = g(m), fb = g(b);
    stack.push_back({a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), options.tolerance / panels, 0});
  }
  double total = 0, err = 0;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m), rm = 0.5 * (m + p.b);
    const double flm = g(lm), frm = g(rm);
    const double left = (m - p.a) / 6 * (p.fa + 4 * flm + p.fm);
    const double right = (p.b - m) / 6 * (p.fm + 4 * frm + p.fb);
    const double diff = left + right - p.whole;
    if (std::fabs(diff) <= 15 * p.tol || p.depth >= 50) {
      total += left + right + diff / 15;
      err += std::fabs(diff) / 15;
      continue;
    }
    if (rep.evaluations > options.max_evaluations)
      throw PrecisionError("adaptive quadrature did not converge within " + std::to_string(options.max_evaluations) +
                           " evaluations (accumulated error estimate " + std::to_string(err) + ")");
    stack.push_back({m, p.b, p.fm, frm, p.fb, right, p.tol / 2, p.depth + 1});
    stack.push_back({p.a, m, p.fa, flm, p.fm, left, p.tol / 2, p.depth + 1});
  }
  if (err > options.tolerance)
    throw PrecisionError("adaptive quadrature reached depth limit with error estimate " + std::to_string(err));
  rep.lhs = total;
  rep.quadrature_error = err;
  rep.holds = rep.lhs <= rep.rhs + rep.quadrature_error;
  return rep;
}

AtomicMeasure random_atomic_measure(std::uint64_t seed, std::uint64_t index) {
  StreamReader rd(CounterStream(seed, StreamTag::Fixture, index));
  const std::size_t atoms = 1 + rd.next_below(20);
  std::vector<mpq_class> x, w;
  std::vector<unsigned long> raw;
  unsigned long total = 0;
  for (std::size_t j = 0; j < atoms; ++j) {
    x.emplace_back(mpz_class(rd.next_below(1u << 20)), mpz_class(1u << 20));
    raw.push_back(1 + rd.next_below(16));
    total += raw.back();
  }
  for (auto r : raw) w.emplace_back(r, total);
  return AtomicMeasure(std::move(x), std::move(w));
}

Lemma32Sweep lemma32_sweep(std::size_t measures, double lambda, std::uint64_t seed, unsigned workers,
                           const QuadratureOptions& options) {
  std::vector<Lemma32Sweep> parts(measures);
  parallel_for(measures, resolve_workers(workers), [&](std::size_t k) {
    const AtomicMeasure nu = random_atomic_measure(seed, k);
    Lemma32Sweep& part = parts[k];
    part.max_excess = -std::numeric_limits<double>::infinity();
    for (int e = 1; e <= 10; ++e) {
      const mpq_class r(1, 1L << e);
      for (long l = -5; l <= 5; ++l) {
        if (l == 0) continue;
        const Lemma32Report rep = lemma32_check(nu, lambda, l, r, options);
        ++part.checks;
        if (!rep.holds) ++part.violations;
        part.max_excess = std::max(part.max_excess, rep.lhs - rep.rhs - rep.quadrature_error);
        part.max_ratio = std::max(part.max_ratio, rep.lhs / rep.rhs);
        part.evaluations += rep.evaluations;
      }
    }
  });
  Lemma32Sweep out;
  out.max_excess = -std::numeric_limits<double>::infinity();
  for (const auto& p : parts) {
    out.checks += p.checks;
    out.violations += p.violations;
    out.max_excess = std::max(out.max_excess, p.max_excess);
    out.max_ratio = std::max(out.max_ratio, p.max_ratio);
    out.evaluations += p.evaluations;
  }
  return out;
}

EquicontractiveIFS bernoulli_ifs(const ExactNumber& lambda) {
  return EquicontractiveIFS(lambda, {ExactNumber(-1L), ExactNumber(1L)});
}

std::vector<FrequencyScanEntry> bernoulli_scan(const ExactNumber& lambda, long n_max, double target_error, Bits bits,
                                               unsigned workers) {
  if (n_max < 0) throw InputError("n_max must be nonnegative");
  if (!(lambda > ExactNumber(0L) && lambda < ExactNumber(1L))) throw InputError("bernoulli_scan requires 0 < lambda < 1");
  const EquicontractiveIFS ifs = bernoulli_ifs(lambda);
  const ProbVector p = ProbVector::uniform(2);
  const ExactNumber inv = lambda.inverse();
  std::vector<ExactNumber> freqs(static_cast<std::size_t>(n_max) + 1);
  freqs[0] = ExactNumber(1L);
  for (std::size_t n = 1; n < freqs.size(); ++n) freqs[n] = freqs[n - 1] * inv;
  std::vector<FrequencyScanEntry> out(freqs.size());
  FourierOptions opt;
  opt.bits = bits;
  parallel_for(out.size(), resolve_workers(workers), [&](std::size_t n) {
    out[n].n = static_cast<long>(n);
    out[n].xi = freqs[n].to_double();
    out[n].value = fourier_product(ifs, p, freqs[n], target_error, opt);
    note_precision_used(bits);
  });
  return out;
}

std::vector<FrequencyScanEntry> erdos_scan(const ExactNumber& lambda, long n_max, double target_error, Bits bits,
                                           unsigned workers) {
  if (!(lambda > ExactNumber(mpq_class(1, 2)) && lambda < ExactNumber(1L)))
    throw InputError("erdos_scan requires 1/2 < lambda < 1");
  const Polynomial poly = lambda.inverse().minimal_polynomial();
  const PisotReport rep = pisot_check(poly);
  if (!rep.is_pisot) throw InputError("1/lambda is not a Pisot number (minimal polynomial " + poly.to_string() + ")");
  return bernoulli_scan(lambda, n_max, target_error, bits, workers);
}

BlowupFactor blowup_factor(const RotationNumber& rot, long n, Bits bits) {
  if (n < 0) throw InputError("blowup_factor needs n >= 0");
  BlowupFactor out;
  out.nprime = rot.floor_multiple(n);
  const ExactNumber& lam = rot.lambda();
  if (const auto q = lam.as_rational()) {
    const mpz_class bn = integer_power(rot.base(), static_cast<unsigned long>(n));
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), q->get_num_mpz_t(), static_cast<unsigned long>(out.nprime));
    mpz_pow_ui(den.get_mpz_t(), q->get_den_mpz_t(), static_cast<unsigned long>(out.nprime));
    mpq_class s(bn * num, den);
    s.canonicalize();
    out.exact = s;
    out.scale = Interval(s, bits);
    out.in_range = s >= 1 && s * *q < 1;
    return out;
  }
  const Bits prec = bits + 32 + static_cast<Bits>(std::log2(static_cast<double>(n) + 2));
  const Interval log_lam = lam.approx(prec).log();
  const Interval log_scale =
      Interval(n, prec) * Interval(rot.base(), prec).log() + Interval(out.nprime, prec) * log_lam;
  out.scale = log_scale.exp();
  if (out.scale.certainly_less(2) && !out.scale.certainly_greater(1) && rot.is_exact_multiple(n, out.nprime)) {
    out.exact = mpq_class(1);
    out.scale = Interval(1L, bits);
    out.in_range = true;
    return out;
  }
  out.in_range = mpfr_cmp_ui(out.scale.lo(), 1) >= 0 && out.scale.certainly_less(Interval(1L, prec) / lam.approx(prec));
  return out;
}

BlowupFactor blowup_factor(long b, const ExactNumber& lambda, long n, Bits bits) {
  return blowup_factor(RotationNumber(b, lambda), n, bits);
}

}  // namespace normalis
