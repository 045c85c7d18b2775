#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "normalis/algebra.hpp"
#include "normalis/cli.hpp"
#include "normalis/disintegration.hpp"
#include "normalis/error.hpp"
#include "normalis/fourier.hpp"
#include "normalis/normality.hpp"
#include "normalis/parallel.hpp"
#include "normalis/rng.hpp"

using namespace normalis;
using Json = cli::Json;

namespace {

// Pinned tolerances and sizes.
constexpr std::uint64_t kSeed = 20240601;
constexpr std::size_t kC1Fixtures = 50, kC1MaxLength = 6;
constexpr double kC1Seconds = 10;
constexpr std::size_t kC2Samples = 100000;
constexpr double kC2Alpha = 0.01, kC2Seconds = 60;
constexpr std::size_t kC3Samples = 10000;
constexpr double kC3Alpha = 0.01, kC3Seconds = 120;
constexpr std::size_t kC4Prefixes = 1000, kC4Words = 100, kC4Length = 50;
constexpr std::size_t kC5Measures = 100;
constexpr double kC5Seconds = 300;
constexpr std::size_t kC6Pairs = 20, kC6Samples = 1000000;
constexpr double kC6Sigmas = 4, kC6TargetError = 1e-12;
constexpr unsigned long kC7MaxL = 30;
constexpr long kC8MaxN = 10000;
constexpr long kC9MaxN = 40;
constexpr double kC9Threshold = 4.0e-4, kC9ControlRatio = 5, kC9Seconds = 120, kC9TargetError = 1e-30;
constexpr Bits kC9Bits = 1024;
constexpr std::size_t kC10Points = 20, kC10Digits = 1000;
constexpr std::size_t kC11Points = 50, kC11Digits = 4096;
constexpr std::size_t kC11MonobitPasses = 48, kC11KgramPasses = 45;
constexpr double kC11MonobitZ = 4, kC11KgramAlpha = 0.001, kC11MedianDiscrepancy = 0.05, kC11Seconds = 600;

struct Outcome {
  bool pass = false;
  std::string detail;
  Json report;  // deterministic payload, compared across worker counts
};

ExactNumber Q(long n, long d = 1) { return ExactNumber(mpq_class(n, d)); }

ExactNumber golden_reciprocal() {
  return ExactNumber::algebraic(Polynomial::from_integers({-1, 1, 1}), mpq_class(1, 2), mpq_class(1));
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

struct Fixture {
  EquicontractiveIFS ifs;
  ProbVector p;
};

// Random IFS with m in [2, 5], lambda = k/20 with random sign, translations j/16 distinct, weights 1..20.
Fixture random_fixture(std::uint64_t index, long min_m = 2, long max_m = 5, long max_k = 18) {
  StreamReader r(CounterStream(kSeed, StreamTag::Fixture, index));
  const long m = min_m + static_cast<long>(r.next_below(static_cast<std::uint64_t>(max_m - min_m + 1)));
  long k = 2 + static_cast<long>(r.next_below(static_cast<std::uint64_t>(max_k - 1)));
  if (r.next_below(2)) k = -k;
  std::vector<long> slots(33);
  for (long i = 0; i < 33; ++i) slots[static_cast<std::size_t>(i)] = i;
  std::vector<ExactNumber> t;
  std::vector<mpq_class> w;
  mpq_class total = 0;
  for (long i = 0; i < m; ++i) {
    const std::size_t j = static_cast<std::size_t>(i) + r.next_below(slots.size() - static_cast<std::size_t>(i));
    std::swap(slots[static_cast<std::size_t>(i)], slots[j]);
    t.push_back(Q(slots[static_cast<std::size_t>(i)] - 16, 16));
    w.push_back(mpq_class(static_cast<long>(1 + r.next_below(20))));
    total += w.back();
  }
  for (auto& x : w) x /= total;
  return {EquicontractiveIFS(Q(k, 20), t), ProbVector(w)};
}

// Fixture of criteria 2-4, through the normalization pipeline: three maps, the first two separated at M = 1.
Fixture three_map() {
  const cli::IfsSpec n = cli::normalize_pipeline(
      {EquicontractiveIFS(Q(1, 5), {Q(0), Q(2, 5), Q(4, 5)}), ProbVector({mpq_class(1, 4), mpq_class(1, 4), mpq_class(1, 2)})});
  return {n.ifs, n.probs};
}

std::vector<mpq_class> corrupted_law(const ModelAlphabet& a, const ProbVector& p) {
  std::vector<mpq_class> law = a.q;
  law[ModelAlphabet::kPairBlock] = p[a.pair_first];
  mpq_class sum = 0;
  for (const auto& x : law) sum += x;
  for (auto& x : law) x /= sum;
  return law;
}

Json ks_json(const KsReport& k) {
  return {{"statistic", k.statistic}, {"critical", k.critical}, {"p_value", k.p_value}, {"n", k.n}, {"pass", k.pass}};
}

// ---------------------------------------------------------------------------

Outcome criterion1(unsigned) {
  const auto start = std::chrono::steady_clock::now();
  std::size_t bad_mu = 0, bad_model = 0, prefixes = 0;
  for (std::size_t f = 0; f < kC1Fixtures; ++f) {
    const Fixture fx = random_fixture(1000 + f);
    const std::size_t m = fx.p.size();
    StreamReader r(CounterStream(kSeed, StreamTag::Fixture, 5000 + f));
    const auto i1 = static_cast<std::uint32_t>(r.next_below(m));
    auto i2 = static_cast<std::uint32_t>(r.next_below(m - 1));
    if (i2 >= i1) ++i2;
    const ModelAlphabet a = build_alphabet(m, fx.p, i1, i2);
    for (std::size_t len = 0; len <= kC1MaxLength; ++len) {
      // Odometer over all words of length len.
      mpq_class total = 0;
      DigitWord word(len, 0);
      while (true) {
        fx.ifs.validate_word(word);
        total += cylinder_measure(fx.p, word);
        std::size_t pos = 0;
        while (pos < len && ++word[pos] == m) word[pos++] = 0;
        if (pos == len) break;
      }
      bad_mu += total != 1;
      std::vector<std::uint32_t> omega(len, 0);
      while (true) {
        ++prefixes;
        const ModelWord w = ModelWord::with_prefix(a, omega);
        mpq_class mass = 0;
        std::vector<std::size_t> choice(len, 0);
        while (true) {
          DigitWord cw(len);
          for (std::size_t n = 0; n < len; ++n) cw[n] = a.blocks[omega[n]][choice[n]];
          mass += model_cylinder_measure(ModelCylinder{w, cw}, fx.p, a);
          std::size_t pos = 0;
          while (pos < len && ++choice[pos] == a.blocks[omega[pos]].size()) choice[pos++] = 0;
          if (pos == len) break;
        }
        bad_model += mass != 1;
        std::size_t pos = 0;
        while (pos < len && ++omega[pos] == a.size()) omega[pos++] = 0;
        if (pos == len) break;
      }
    }
  }
  const double secs = seconds_since(start);
  const bool pass = bad_mu == 0 && bad_model == 0 && secs < kC1Seconds;
  return {pass,
          "fixtures=" + std::to_string(kC1Fixtures) + " word-length<=" + std::to_string(kC1MaxLength) +
              " mu_p sums!=1: " + std::to_string(bad_mu) + ", model sums!=1: " + std::to_string(bad_model) + " over " +
              std::to_string(prefixes) + " omega prefixes, " + fmt(secs, 3) + " s (limit " + fmt(kC1Seconds) + " s)",
          {}};
}

Outcome criterion2(unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  const Fixture fx = three_map();
  const SeparatedModel model = build_separated_model(fx.ifs, fx.p, 4);
  DisintegrationOptions opt;
  opt.alpha = kC2Alpha;
  opt.workers = workers;
  const KsReport ks = verify_disintegration(model.ifs, model.p, model.alphabet, kC2Samples, kSeed, opt);
  opt.omega_law = corrupted_law(model.alphabet, model.p);
  const KsReport control = verify_disintegration(model.ifs, model.p, model.alphabet, kC2Samples, kSeed, opt);
  const double secs = seconds_since(start);
  const bool pass = ks.pass && !control.pass && secs < kC2Seconds;
  return {pass,
          "N=" + std::to_string(kC2Samples) + " KS D=" + fmt(ks.statistic) + " <= crit " + fmt(ks.critical) +
              (ks.pass ? " (ok)" : " (EXCEEDED)") + "; corrupted control D=" + fmt(control.statistic) +
              (control.pass ? " passes (SHOULD FAIL)" : " fails as required") + ", " + fmt(secs, 3) + " s",
          {{"ks", ks_json(ks)}, {"control", ks_json(control)}}};
}

Outcome criterion3(unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  const Fixture fx = three_map();
  const SeparatedModel model = build_separated_model(fx.ifs, fx.p, 4);
  const ModelWord omega = ModelWord::with_prefix(model.alphabet, {0, 1, 0}, kSeed, 3);
  const std::vector<DigitWord> words = {{}, {1}, {0, 2}, {1, 2, 0}, {0, 2, 1}};
  DisintegrationOptions opt;
  opt.alpha = kC3Alpha;
  opt.workers = workers;
  bool ok = true;
  std::string worst;
  double worst_ratio = 0;
  Json per = Json::array();
  for (std::size_t i = 0; i < words.size(); ++i) {
    const RestrictionReport r = verify_restriction_identity(omega, words[i], model.ifs, model.p, model.alphabet,
                                                            kC3Samples, derive_seed(kSeed, 30 + i), opt);
    ok = ok && r.ks.pass && r.prefix_mismatches == 0;
    const double ratio = r.ks.statistic / r.ks.critical;
    if (ratio >= worst_ratio) {
      worst_ratio = ratio;
      std::string w;
      for (auto d : words[i]) w += (w.empty() ? "" : ",") + std::to_string(d);
      worst = "word {" + w + "} D/crit=" + fmt(ratio);
    }
    per.push_back({{"word", words[i]}, {"mass", r.mass.get_str()}, {"attempts", r.attempts},
                   {"prefix_mismatches", r.prefix_mismatches}, {"ks", ks_json(r.ks)}});
  }
  const double secs = seconds_since(start);
  const bool pass = ok && secs < kC3Seconds;
  return {pass,
          std::to_string(words.size()) + " words x " + std::to_string(kC3Samples) + " accepted samples, worst " + worst +
              (ok ? ", all pass" : ", SOME FAIL") + ", " + fmt(secs, 3) + " s",
          per};
}

Outcome criterion4(unsigned) {
  const Fixture fx = three_map();
  const SeparatedModel model = build_separated_model(fx.ifs, fx.p, 4);
  const ModelAlphabet& a = model.alphabet;
  std::size_t violations = 0, checks = 0;
  mpq_class tightest = 0;  // largest mass / bound
  for (std::size_t k = 0; k < kC4Prefixes; ++k) {
    const ModelWord omega(a, derive_seed(kSeed, 40), k);
    const auto prefix = omega.prefix(kC4Length);
    const mpq_class bound = atom_bound(prefix, model.p, a);
    StreamReader r(CounterStream(kSeed, StreamTag::Fixture, 40000 + k));
    for (std::size_t j = 0; j < kC4Words; ++j) {
      DigitWord word(kC4Length);
      for (std::size_t n = 0; n < kC4Length; ++n) {
        const auto& block = a.blocks[prefix[n]];
        word[n] = block[r.next_below(block.size())];
      }
      const mpq_class mass = model_cylinder_measure(ModelCylinder{omega, word}, model.p, a);
      ++checks;
      if (mass > bound) ++violations;
      tightest = std::max(tightest, mpq_class(mass / bound));
    }
  }
  return {violations == 0,
          std::to_string(checks) + " exact comparisons (prefix length " + std::to_string(kC4Length) +
              "), violations=" + std::to_string(violations) + ", max mass/bound=" + fmt(tightest.get_d()),
          {}};
}

Outcome criterion5(unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;
  for (const double lambda : {0.5, golden_reciprocal().to_double()}) {
    const Lemma32Sweep s = lemma32_sweep(kC5Measures, lambda, kSeed, workers);
    ok = ok && s.violations == 0;
    detail += "lambda=" + fmt(lambda) + ": " + std::to_string(s.checks) + " checks, violations=" +
              std::to_string(s.violations) + ", max lhs/rhs=" + fmt(s.max_ratio) + "; ";
  }
  const double secs = seconds_since(start);
  return {ok && secs < kC5Seconds, detail + fmt(secs, 3) + " s (limit " + fmt(kC5Seconds) + " s)", {}};
}

Outcome criterion6(unsigned workers) {
  std::size_t failures = 0;
  double worst = 0;
  Json per = Json::array();
  for (std::size_t k = 0; k < kC6Pairs; ++k) {
    const Fixture raw = random_fixture(6000 + k, 2, 4, 16);
    const cli::IfsSpec norm = cli::normalize_pipeline({raw.ifs, raw.p});
    StreamReader r(CounterStream(kSeed, StreamTag::Fixture, 7000 + k));
    const mpq_class xi(static_cast<long>(r.next_below(481)) - 240, 8);  // [-30, 30] step 1/8
    const FourierValue exact = fourier_product(norm.ifs, norm.probs, ExactNumber(xi), kC6TargetError);
    const PointSampler sampler(norm.ifs, norm.probs, derive_seed(kSeed, 60 + k));
    const std::size_t depth = double_depth(norm.ifs);
    const McEstimate mc = fourier_mc([&](std::uint64_t i) { return sampler.value(i, depth); }, xi.get_d(),
                                     kC6Samples, workers);
    const std::complex<double> diff(exact.value.re.mid_double() - mc.re, exact.value.im.mid_double() - mc.im);
    const double tol = kC6Sigmas * mc.stderr_modulus() + exact.tail_bound;
    const double ratio = std::abs(diff) / tol;
    worst = std::max(worst, ratio);
    failures += std::abs(diff) > tol;
    per.push_back({{"xi", xi.get_str()}, {"re", exact.value.re.mid_double()}, {"im", exact.value.im.mid_double()},
                   {"mc_re", mc.re}, {"mc_im", mc.im}, {"stderr", mc.stderr_modulus()}, {"tail", exact.tail_bound}});
  }
  return {failures == 0,
          std::to_string(kC6Pairs) + " (IFS, xi) pairs, N=" + std::to_string(kC6Samples) +
              ", failures=" + std::to_string(failures) + ", max |diff|/(4 se + tail)=" + fmt(worst),
          per};
}

// Power sums by the integer recurrence of the monic polynomial (Newton's identities for n < d).
std::vector<mpz_class> recurrence_power_sums(const std::vector<long>& c, std::size_t count) {
  const std::size_t d = c.size() - 1;
  std::vector<mpz_class> s(count + 1);
  s[0] = static_cast<long>(d);
  for (std::size_t n = 1; n <= count; ++n) {
    mpz_class v = 0;
    for (std::size_t k = 1; k <= std::min(n, d); ++k) {
      const mpz_class coef = c[d - k];
      v -= coef * (k == n ? mpz_class(static_cast<long>(n)) : s[n - k]);
    }
    s[n] = v;
  }
  return s;
}

// Conjugate roots (all roots but the largest real one) by Durand-Kerner in long double.
std::vector<std::complex<long double>> conjugates(const std::vector<long>& c) {
  const std::size_t d = c.size() - 1;
  std::vector<std::complex<long double>> z(d);
  for (std::size_t i = 0; i < d; ++i) z[i] = std::pow(std::complex<long double>(0.4L, 0.9L), static_cast<int>(i));
  auto p = [&](std::complex<long double> x) {
    std::complex<long double> v = 0;
    for (std::size_t k = d + 1; k-- > 0;) v = v * x + static_cast<long double>(c[k]);
    return v;
  };
  for (int it = 0; it < 500; ++it)
    for (std::size_t i = 0; i < d; ++i) {
      std::complex<long double> den = 1;
      for (std::size_t j = 0; j < d; ++j)
        if (j != i) den *= z[i] - z[j];
      z[i] -= p(z[i]) / den;
    }
  std::size_t top = 0;
  for (std::size_t i = 1; i < d; ++i)
    if (z[i].real() > z[top].real()) top = i;
  z.erase(z.begin() + static_cast<std::ptrdiff_t>(top));
  return z;
}

Outcome criterion7(unsigned) {
  struct Case {
    std::string name;
    std::vector<long> coeffs;
  };
  const std::vector<Case> cases = {{"golden", {-1, -1, 1}}, {"plastic", {-1, -1, 0, 1}}};
  std::size_t checks = 0, integer_mismatch = 0, oracle_mismatch = 0;
  std::vector<std::string> outside;
  for (const auto& cs : cases) {
    const Polynomial poly = Polynomial::from_integers(cs.coeffs);
    const auto oracle_sums = recurrence_power_sums(cs.coeffs, 2 * kC7MaxL);
    const auto conj = conjugates(cs.coeffs);
    for (unsigned long q = 1; q <= 2; ++q)
      for (unsigned long l = 1; l <= kC7MaxL; ++l) {
        ++checks;
        const mpz_class s = trace_power_sum(poly, l, q);
        integer_mismatch += s != oracle_sums[l * q];
        const ConjugateDefect d = conjugate_defect(poly, l, q);
        std::complex<long double> sum = 0;
        for (const auto& z : conj) sum += std::pow(z, static_cast<int>(l * q));
        const long double expect = std::abs(sum);
        const double mid = d.value.mid_double();
        if (std::fabs(mid - static_cast<double>(expect)) > 1e-9 * std::max(1.0, static_cast<double>(expect))) ++oracle_mismatch;
        if (l >= 2 && d.location != DefectLocation::InsideUnit)
          outside.push_back(cs.name + "(l=" + std::to_string(l) + ",q=" + std::to_string(q) + ", defect=" + fmt(mid) + ")");
      }
  }
  std::string list;
  for (const auto& o : outside) list += (list.empty() ? "" : " ") + o;
  const bool pass = integer_mismatch == 0 && oracle_mismatch == 0 && outside.empty();
  return {pass,
          std::to_string(checks) + " (poly, l, q) cases, integer mismatches=" + std::to_string(integer_mismatch) +
              ", oracle mismatches=" + std::to_string(oracle_mismatch) + ", defects outside (0,1) for l>=2: " +
              (outside.empty() ? "none" : list),
          {}};
}

Outcome criterion8(unsigned) {
  std::size_t bad = 0, floor_mismatch = 0;
  // (2, 1/3): exact. Oracle n' = max{k : 3^k <= 2^n}.
  {
    const RotationNumber rot(2, Q(1, 3));
    long k = 0;
    mpz_class three_k = 1, two_n = 1;
    for (long n = 1; n <= kC8MaxN; ++n) {
      two_n *= 2;
      while (three_k * 3 <= two_n) {
        three_k *= 3;
        ++k;
      }
      const BlowupFactor f = blowup_factor(rot, n);
      floor_mismatch += f.nprime != k;
      bad += !(f.exact && *f.exact > 1 && *f.exact < 3 && f.scale.certainly_greater(1) && f.scale.certainly_less(3));
    }
  }
  // (2, golden reciprocal): certified enclosure strictly inside (1, 1/lambda).
  {
    const ExactNumber g = golden_reciprocal();
    const RotationNumber rot(2, g);
    const Interval inv = g.inverse().approx(200);
    const long double theta = std::log(2.0L) / std::log((1.0L + std::sqrt(5.0L)) / 2.0L);
    for (long n = 1; n <= kC8MaxN; ++n) {
      const BlowupFactor f = blowup_factor(rot, n);
      const long double t = theta * static_cast<long double>(n);
      if (std::fabs(t - std::round(t)) > 1e-9L) floor_mismatch += f.nprime != static_cast<long>(std::floor(t));
      bad += !(f.scale.certainly_greater(1) && f.scale.certainly_less(inv));
    }
  }
  // (9, 1/3): theta = 2, so theta n is an integer for every n and the scale is exactly 1.
  const ThetaDecision d = theta_decide(9, Q(1, 3), 64);
  const bool rational = d.verdict == ThetaDecision::Verdict::Rational && d.p == 1 && d.q == 2;
  std::size_t not_one = 0;
  {
    const RotationNumber rot(9, Q(1, 3));
    for (long n = 1; n <= kC8MaxN; ++n) {
      if (!rot.is_exact_multiple(n, 2 * n)) ++not_one;
      const BlowupFactor f = blowup_factor(rot, n);
      not_one += !(f.exact && *f.exact == 1 && f.nprime == 2 * n);
    }
  }
  const bool pass = bad == 0 && floor_mismatch == 0 && rational && not_one == 0;
  return {pass,
          "n<=" + std::to_string(kC8MaxN) + ": scales outside (1, 1/lambda)=" + std::to_string(bad) +
              ", floor(theta n) mismatches=" + std::to_string(floor_mismatch) + "; (9, 1/3) verdict " +
              to_string(d.verdict) + " p=" + std::to_string(d.p) + " q=" + std::to_string(d.q) +
              ", exact scale != 1 cases=" + std::to_string(not_one),
          {}};
}

Outcome criterion9(unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  auto min_modulus = [](const std::vector<FrequencyScanEntry>& scan, bool upper) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& e : scan)
      if (e.n >= 1) m = std::min(m, upper ? e.value.modulus().hi_double() : e.value.modulus().lo_double());
    return m;
  };
  const auto golden = erdos_scan(golden_reciprocal(), kC9MaxN, kC9TargetError, kC9Bits, workers);
  const auto control = bernoulli_scan(Q(51, 100), kC9MaxN, kC9TargetError, kC9Bits, workers);
  const double g = min_modulus(golden, false), c = min_modulus(control, true);
  const double secs = seconds_since(start);
  const bool pass = g > kC9Threshold && kC9ControlRatio * c <= g && secs < kC9Seconds;
  return {pass,
          "min_{1<=n<=40} |F| golden >= " + fmt(g) + " (threshold " + fmt(kC9Threshold) + "), control 51/100 <= " +
              fmt(c) + " (ratio " + fmt(g / c) + ", need >= " + fmt(kC9ControlRatio) + "), " + std::to_string(kC9Bits) +
              " bits, " + fmt(secs, 3) + " s",
          {}};
}

Outcome criterion10(unsigned workers) {
  const EquicontractiveIFS cantor(Q(1, 3), {Q(0), Q(2, 3)});
  const PointSampler sampler(cantor, ProbVector::uniform(2), kSeed);
  std::vector<DigitStream> streams(kC10Points);
  parallel_for(kC10Points, workers, [&](std::size_t i) { streams[i] = extract_sample_digits(sampler, i, 3, kC10Digits); });
  std::size_t ones = 0, short_streams = 0, kgram_passes = 0;
  for (const auto& s : streams) {
    short_streams += s.size() != kC10Digits;
    ones += static_cast<std::size_t>(std::count(s.digits.begin(), s.digits.end(), 1u));
    const bool k1 = kgram_test(s, 1).pass, k2 = kgram_test(s, 2).pass;
    kgram_passes += k1 || k2;
  }
  const bool pass = ones == 0 && short_streams == 0 && kgram_passes == 0;
  return {pass,
          std::to_string(kC10Points) + " Cantor points x " + std::to_string(kC10Digits) +
              " certified base-3 digits: digit-1 count=" + std::to_string(ones) + ", incomplete streams=" +
              std::to_string(short_streams) + ", points passing k-gram (k=1 or 2)=" + std::to_string(kgram_passes) +
              " (must be 0)",
          {}};
}

Outcome criterion11(unsigned workers) {
  const auto start = std::chrono::steady_clock::now();
  std::ostringstream out, err;
  const int code = cli::run({"--no-timing", "--workers", std::to_string(workers), "bernoulli-pipeline", "--seed",
                             std::to_string(kSeed), "--base", "2", "--lambda-poly", "-1,1,1", "--points",
                             std::to_string(kC11Points), "--ndigits", std::to_string(kC11Digits)},
                            out, err);
  const double secs = seconds_since(start);
  if (out.str().empty()) return {false, "pipeline produced no report (exit " + std::to_string(code) + "): " + err.str(), {}};
  const Json rep = Json::parse(out.str());
  const Json& res = rep["results"];
  std::size_t mono = 0, kg = 0;
  std::vector<double> ds;
  for (const auto& p : res["per_point"]) {
    mono += std::fabs(p["monobit_z"].get<double>()) <= kC11MonobitZ;
    bool all = p["kgram"].size() == 3;
    for (const auto& k : p["kgram"]) all = all && k["p_value"].get<double>() >= kC11KgramAlpha;
    kg += all;
    ds.push_back(p["discrepancy"].get<double>());
  }
  std::sort(ds.begin(), ds.end());
  const double med = ds.empty() ? 1 : (ds.size() % 2 ? ds[ds.size() / 2] : 0.5 * (ds[ds.size() / 2 - 1] + ds[ds.size() / 2]));
  const bool pass = res["hypothesis_met"].get<bool>() && ds.size() == kC11Points && mono >= kC11MonobitPasses &&
                    kg >= kC11KgramPasses && med <= kC11MedianDiscrepancy && code == 0 && secs < kC11Seconds;
  Json payload = rep;
  return {pass,
          "golden Bernoulli, b=2, " + std::to_string(kC11Points) + " x " + std::to_string(kC11Digits) +
              " digits: monobit " + std::to_string(mono) + "/" + std::to_string(ds.size()) + " (need " +
              std::to_string(kC11MonobitPasses) + "), k-gram " + std::to_string(kg) + " (need " +
              std::to_string(kC11KgramPasses) + "), median D*=" + fmt(med) + " (<= " + fmt(kC11MedianDiscrepancy) +
              "), " + fmt(secs, 3) + " s",
          payload};
}

using CriterionFn = std::function<Outcome(unsigned)>;

const std::vector<CriterionFn>& criteria() {
  static const std::vector<CriterionFn> all = {criterion1, criterion2, criterion3, criterion4,  criterion5,  criterion6,
                                               criterion7, criterion8, criterion9, criterion10, criterion11};
  return all;
}

Outcome criterion12(unsigned) {
  std::string detail;
  bool ok = true;
  for (const int k : {2, 3, 6, 11}) {
    const Outcome one = criteria()[static_cast<std::size_t>(k - 1)](1);
    const Outcome four = criteria()[static_cast<std::size_t>(k - 1)](4);
    const bool same = one.report.dump() == four.report.dump() && !one.report.is_null();
    ok = ok && same;
    detail += "criterion " + std::to_string(k) + (same ? " identical" : " DIFFERS") + "; ";
  }
  return {ok, detail + "workers 1 vs 4", {}};
}

Outcome evaluate(int k) {
  if (k == 12) return criterion12(1);
  return criteria()[static_cast<std::size_t>(k - 1)](1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria", "acceptance"};
  std::vector<int> which;
  app.add_option("--criterion", which, "criterion number(s); all when omitted")->check(CLI::Range(1, 12));
  CLI11_PARSE(app, argc, argv);
  if (which.empty())
    for (int k = 1; k <= 12; ++k) which.push_back(k);
  bool all = true;
  for (const int k : which) {
    Outcome o;
    try {
      o = evaluate(k);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what(), {}};
    }
    all = all && o.pass;
    std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
