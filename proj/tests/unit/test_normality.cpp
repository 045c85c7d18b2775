#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "normalis/error.hpp"
#include "normalis/fourier.hpp"
#include "normalis/normality.hpp"

using namespace normalis;

namespace {

ExactNumber Q(long n, long d = 1) { return ExactNumber(mpq_class(n, d)); }

ExactNumber golden_reciprocal() {
  return ExactNumber::algebraic(Polynomial::from_integers({-1, 1, 1}), mpq_class(1, 2), mpq_class(1));
}

EquicontractiveIFS cantor() { return EquicontractiveIFS(Q(1, 3), {Q(0), Q(2, 3)}); }

std::string as_text(const DigitStream& s) {
  std::string out;
  for (auto d : s.digits) out += static_cast<char>('0' + d);
  return out;
}

DigitStream stream_of(long b, const std::vector<std::uint32_t>& digits) {
  DigitStream s;
  s.base = b;
  s.digits = digits;
  s.requested = digits.size();
  return s;
}

DigitStream sampled_stream(const EquicontractiveIFS& ifs, const ProbVector& p, long b, std::size_t N,
                           std::uint64_t seed, std::uint64_t index) {
  const PointSampler sampler(ifs, p, seed);
  return extract_digits([&](std::size_t depth, Bits bits) { return sampler.point(index, depth, bits); }, b, N,
                        extraction_budget(ifs, b, N));
}

}  // namespace

TEST(ExtractDigits, ExactRationals) {
  EXPECT_EQ(as_text(extract_digits(mpq_class(1, 3), 2, 6)), "010101");
  EXPECT_EQ(as_text(extract_digits(mpq_class(2, 3), 3, 4)), "2000");
  EXPECT_EQ(as_text(extract_digits(mpq_class(0), 5, 3)), "000");
  EXPECT_THROW(extract_digits(mpq_class(1), 2, 3), InputError);
}

TEST(ExtractDigits, CantorPointsAvoidDigitOne) {
  for (std::uint64_t i = 0; i < 3; ++i) {
    const auto s = sampled_stream(cantor(), ProbVector::uniform(2), 3, 1000, 7, i);
    ASSERT_EQ(s.size(), 1000u);
    EXPECT_FALSE(s.boundary);
    EXPECT_EQ(std::count(s.digits.begin(), s.digits.end(), 1u), 0);
    // Digit n of a Cantor sample is twice its symbolic digit.
    const auto sym = PointSampler(cantor(), ProbVector::uniform(2), 7).digits(i, 1000);
    for (std::size_t n = 0; n < 1000; ++n) EXPECT_EQ(s.digits[n], 2 * sym[n]);
  }
}

TEST(ExtractDigits, SampledDigitsLieInEnclosure) {
  const auto ifs = normalize_to_unit(bernoulli_ifs(golden_reciprocal()));
  const PointSampler sampler(ifs, ProbVector::uniform(2), 3);
  const auto s = sampled_stream(ifs, ProbVector::uniform(2), 2, 300, 3, 0);
  ASSERT_EQ(s.size(), 300u);
  const auto deep = sampler.point(0, 2000, 1200);
  const mpq_class lo = shifted_prefix(s, 0, 300);
  const mpq_class hi = lo + mpq_class(1, integer_power(2, 300));
  EXPECT_LE(lo, deep.enclosure.lo_rational());
  EXPECT_GT(hi, deep.enclosure.hi_rational());
}

TEST(ExtractDigits, BoundaryFlagForStraddlingEnclosure) {
  // Every refinement straddles 1/2: the stream stops with the boundary flag.
  const PointRefiner straddle = [](std::size_t, Bits bits) {
    CertifiedPoint pt;
    pt.enclosure = Interval::from_endpoints(mpq_class(1, 2) - mpq_class(1, 1000), mpq_class(1, 2), bits);
    return pt;
  };
  ExtractionBudget budget{8, 64, 2};
  const auto s = extract_digits(straddle, 2, 10, budget);
  EXPECT_TRUE(s.boundary);
  EXPECT_EQ(s.size(), 0u);
}

TEST(ExtractDigits, RejectsPointsOutsideUnitInterval) {
  const auto ifs = bernoulli_ifs(golden_reciprocal());
  EXPECT_THROW(sampled_stream(ifs, ProbVector::uniform(2), 2, 20, 1, 0), InputError);
}

TEST(ShiftedPrefix, MatchesExactMultiplyAndReduce) {
  for (const mpq_class x : {mpq_class(1, 7), mpq_class(5, 13), mpq_class(22, 23)}) {
    for (long b : {2L, 3L, 10L}) {
      const auto s = extract_digits(x, b, 120);
      for (std::size_t n : {0u, 1u, 17u, 60u}) {
        const std::size_t K = 40;
        // floor(b^K frac(b^n x)) / b^K by exact rational arithmetic.
        mpq_class y = x * mpq_class(integer_power(b, n));
        mpz_class f;
        mpz_fdiv_q(f.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
        y -= f;
        const mpq_class scaled = y * mpq_class(integer_power(b, K));
        mpz_fdiv_q(f.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
        mpq_class expect(f, integer_power(b, K));
        expect.canonicalize();
        EXPECT_EQ(shifted_prefix(s, n, K), expect);
      }
    }
  }
}

TEST(Weyl, PeriodTwoOrbit) {
  const auto s = extract_digits(mpq_class(2, 3), 2, 200);
  const auto w = weyl_sums(s, 1, {2, 4, 10, 100});
  for (const auto& a : w.averages) {
    EXPECT_NEAR(a.real(), -0.5, 1e-14);
    EXPECT_NEAR(a.imag(), 0.0, 1e-14);
  }
}

TEST(Weyl, FixedPointAndErrors) {
  const auto s = extract_digits(mpq_class(0), 3, 100);
  for (long l : {1L, -2L, 7L})
    for (const auto& a : weyl_sums(s, l, {1, 10, 50}).averages) EXPECT_EQ(a, std::complex<double>(1, 0));
  EXPECT_THROW(weyl_sums(s, 0, {10}), InputError);
  try {
    weyl_sums(s, 1, {90});
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(std::to_string(91 + weyl_guard_digits(3))), std::string::npos);
  }
}

TEST(Weyl, CantorPointBaseTwoDecays) {
  const auto s = sampled_stream(cantor(), ProbVector::uniform(2), 2, 4096 + 64, 11, 0);
  const auto w = weyl_sums(s, 1, {4096});
  EXPECT_LT(std::abs(w.averages[0]), 0.1);
}

TEST(Weyl, FourierBridge) {
  // Mean of e^{2 pi i l frac(b^n x)} over sampled x agrees with F_{l b^n}(mu_p).
  const auto ifs = normalize_to_unit(bernoulli_ifs(golden_reciprocal()));
  const ProbVector p = ProbVector::uniform(2);
  const long b = 2, l = 1;
  const std::size_t n = 3, M = 10000;
  std::vector<double> re(M), im(M);
  for (std::size_t j = 0; j < M; ++j) {
    const auto s = sampled_stream(ifs, p, b, n + 1 + weyl_guard_digits(b), 21, j);
    const double y = orbit_values(s, n + 1)[n];
    re[j] = std::cos(2 * std::numbers::pi * l * y);
    im[j] = std::sin(2 * std::numbers::pi * l * y);
  }
  const auto er = mean_and_stderr(re), ei = mean_and_stderr(im);
  const auto f = fourier_product(ifs, p, Interval(static_cast<long>(l << n), 128), 1e-12);
  EXPECT_NEAR(er.mean, f.value.re.mid_double(), 4 * er.standard_error + f.tail_bound);
  EXPECT_NEAR(ei.mean, f.value.im.mid_double(), 4 * ei.standard_error + f.tail_bound);
}

TEST(Discrepancy, Examples) {
  const std::size_t N = 1000;
  std::vector<double> grid(N);
  for (std::size_t i = 0; i < N; ++i) grid[i] = (2.0 * static_cast<double>(i + 1) - 1) / (2.0 * N);
  EXPECT_NEAR(star_discrepancy(grid), 1.0 / (2 * N), 1e-15);
  EXPECT_EQ(star_discrepancy(std::vector<double>(50, 0.0)), 1.0);
  std::vector<double> rot(N);
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (std::size_t i = 0; i < N; ++i) rot[i] = std::fmod(static_cast<double>(i + 1) * g, 1.0);
  // Brute-force oracle: sup over t of |#{x < t}/N - t|, checked at and just past every point.
  double oracle = 0;
  std::vector<double> sorted = rot;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < N; ++i) {
    const double t = sorted[i];
    const double below = static_cast<double>(std::count_if(rot.begin(), rot.end(), [&](double x) { return x < t; }));
    const double upto = static_cast<double>(std::count_if(rot.begin(), rot.end(), [&](double x) { return x <= t; }));
    oracle = std::max({oracle, std::fabs(below / N - t), std::fabs(upto / N - t)});
  }
  EXPECT_NEAR(star_discrepancy(rot), oracle, 1e-15);
  EXPECT_LE(star_discrepancy(rot), 0.01);
  std::reverse(rot.begin(), rot.end());
  EXPECT_EQ(star_discrepancy(rot), oracle);
  EXPECT_THROW(star_discrepancy({0.5, 1.0}), InputError);
  EXPECT_THROW(star_discrepancy({}), InputError);
}

TEST(KGram, Examples) {
  std::vector<std::uint32_t> alt(1000);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = static_cast<std::uint32_t>(i % 2);
  const auto r = kgram_test(stream_of(2, alt), 1);
  EXPECT_EQ(r.statistic, 0);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.dof, 1);
  EXPECT_FALSE(kgram_test(stream_of(2, alt), 2).pass);  // only 01 and 10 occur
  EXPECT_THROW(kgram_test(stream_of(2, std::vector<std::uint32_t>(39, 0)), 2), InputError);
  const auto cantor_stream = sampled_stream(cantor(), ProbVector::uniform(2), 3, 1000, 2, 0);
  EXPECT_FALSE(kgram_test(cantor_stream, 1).pass);
}

TEST(KGram, CountsMatchBruteForce) {
  const auto s = sampled_stream(cantor(), ProbVector::uniform(2), 2, 600, 9, 1);
  for (int k = 1; k <= 3; ++k) {
    std::vector<std::uint64_t> counts(1u << k, 0);
    for (std::size_t n = 0; n + k <= s.size(); ++n) {
      std::size_t v = 0;
      for (int j = 0; j < k; ++j) v = v * 2 + s.digits[n + j];
      ++counts[v];
    }
    EXPECT_DOUBLE_EQ(kgram_test(s, k).statistic, chi_square_uniform(counts, 0.001).statistic);
  }
}

TEST(Monobit, Examples) {
  std::vector<std::uint32_t> alt(1000);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = static_cast<std::uint32_t>(i % 2);
  EXPECT_EQ(monobit_test(stream_of(2, alt)).z, 0);
  const auto ones = monobit_test(stream_of(2, std::vector<std::uint32_t>(400, 1)));
  EXPECT_NEAR(ones.z, 20.0, 1e-12);
  EXPECT_FALSE(ones.pass);
}

TEST(RotationOrbit, RationalThetaIsPeriodic) {
  const auto o = rotation_orbit(9, Q(1, 3), 100);
  EXPECT_TRUE(o.periodic);
  EXPECT_EQ(o.period, 1);
  ASSERT_EQ(o.fractions.size(), 1u);
  EXPECT_TRUE(o.fractions[0].contains(mpq_class(0)));
  EXPECT_EQ(o.nprime[0], 2);
}

TEST(RotationOrbit, NPrimeSequenceAndInvariants) {
  const auto o = rotation_orbit(2, Q(1, 3), 10);
  EXPECT_FALSE(o.periodic);
  EXPECT_EQ(o.nprime, (std::vector<long>{0, 1, 1, 2, 3, 3, 4, 5, 5, 6}));
  for (std::size_t n = 0; n + 1 < o.fractions.size(); ++n) {
    // R^{n+1} 0 - R^n 0 - theta is an integer.
    const Interval diff = o.fractions[n + 1] - o.fractions[n] - o.theta;
    EXPECT_TRUE(diff.contains_integer());
    EXPECT_LT(diff.width(), 1e-20);
  }
  const RotationNumber rot(2, Q(1, 3));
  for (std::size_t n = 0; n < o.nprime.size(); ++n)
    EXPECT_EQ(o.nprime[n], blowup_factor(rot, static_cast<long>(n + 1)).nprime);
}

TEST(RotationOrbit, Equidistributes) {
  const auto o = rotation_orbit(2, Q(1, 3), 10000);
  EXPECT_LT(o.discrepancy, 0.01);
  const auto g = rotation_orbit(2, golden_reciprocal(), 2000);
  const RotationNumber rot(2, golden_reciprocal());
  for (long n = 1; n <= 2000; n += 97) EXPECT_EQ(g.nprime[static_cast<std::size_t>(n - 1)], blowup_factor(rot, n).nprime);
}

TEST(PartitionCell, PrefixesNestedAndSized) {
  const RotationNumber rot(2, Q(1, 3));
  const auto pt = sample_point(cantor(), ProbVector::uniform(2), 64, 5, 0);
  EXPECT_TRUE(partition_cell(pt, 0, rot).empty());
  EXPECT_TRUE(partition_cell(pt, 1, rot).empty());
  EXPECT_EQ(partition_cell(pt, 10, rot).size(), 6u);
  for (long m = 1; m < 60; ++m) {
    const auto a = partition_cell(pt, m, rot), b = partition_cell(pt, m + 1, rot);
    ASSERT_LE(a.size(), b.size());
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
    const auto cell = cylinder_interval(cantor(), a);
    EXPECT_EQ(cell.width(), Q(1, 3).pow(static_cast<long>(a.size())) * attractor_hull(cantor()).width());
  }
  EXPECT_THROW(partition_cell(pt, 200, rot), InputError);
}
