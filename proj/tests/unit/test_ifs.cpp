#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "normalis/error.hpp"
#include "normalis/ifs.hpp"
#include "normalis/stats.hpp"

using namespace normalis;

namespace {

ExactNumber Q(long n, long d = 1) { return ExactNumber(mpq_class(n, d)); }

EquicontractiveIFS cantor() { return EquicontractiveIFS(Q(1, 3), {Q(0), Q(2, 3)}); }

ExactNumber golden_reciprocal() {
  return ExactNumber::algebraic(Polynomial::from_integers({-1, 1, 1}), mpq_class(1, 2), mpq_class(1));
}

// A small deterministic generator for fixtures in this file.
struct Lcg {
  std::uint64_t s;
  std::uint64_t next() { return s = s * 6364136223846793005ull + 1442695040888963407ull; }
  long below(long n) { return static_cast<long>((next() >> 33) % static_cast<std::uint64_t>(n)); }
};

void for_each_word(std::size_t m, int len, const std::function<void(const DigitWord&)>& f) {
  DigitWord w(static_cast<std::size_t>(len), 0);
  for (;;) {
    f(w);
    int k = len - 1;
    for (; k >= 0; --k) {
      if (++w[static_cast<std::size_t>(k)] < m) break;
      w[static_cast<std::size_t>(k)] = 0;
    }
    if (k < 0) return;
  }
}

}  // namespace

TEST(ProbVector, ExactSumRequired) {
  EXPECT_NO_THROW(ProbVector({mpq_class(1, 3), mpq_class(2, 3)}));
  try {
    ProbVector({mpq_class(1, 3), mpq_class(1, 2)});
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("5/6"), std::string::npos);
  }
  EXPECT_THROW(ProbVector({mpq_class(-1, 2), mpq_class(3, 2)}), InputError);
}

TEST(Ifs, RejectsNonContraction) {
  EXPECT_THROW(EquicontractiveIFS(Q(5, 3), {Q(0), Q(1)}), InputError);
  EXPECT_THROW(EquicontractiveIFS(Q(-1), {Q(0), Q(1)}), InputError);
  EXPECT_THROW(EquicontractiveIFS(Q(0), {Q(0), Q(1)}), InputError);
}

TEST(TrimSupport, Examples) {
  EXPECT_THROW(trim_support(cantor(), ProbVector({mpq_class(1), mpq_class(0)})), InputError);
  const EquicontractiveIFS three(Q(1, 4), {Q(0), Q(1, 4), Q(1, 2)});
  const auto [ifs, p] = trim_support(three, ProbVector({mpq_class(1, 2), mpq_class(0), mpq_class(1, 2)}));
  ASSERT_EQ(ifs.size(), 2u);
  EXPECT_EQ(ifs.translations()[1], Q(1, 2));
  EXPECT_EQ(p[0], mpq_class(1, 2));
  const auto [same, q] = trim_support(cantor(), ProbVector::uniform(2));
  EXPECT_EQ(same.translations(), cantor().translations());
  EXPECT_EQ(q.weights(), ProbVector::uniform(2).weights());
  EXPECT_THROW(trim_support(EquicontractiveIFS(Q(1, 3), {Q(1), Q(1)}), ProbVector::uniform(2)), InputError);
}

TEST(SquareIfNegative, HandComposedMaps) {
  const EquicontractiveIFS neg(Q(-1, 2), {Q(0), Q(1)});
  const auto [sq, p] = square_if_negative(neg, ProbVector::uniform(2));
  EXPECT_EQ(sq.lambda(), Q(1, 4));
  // Oracle: compose phi_i(phi_j(x)) with exact rationals and read off the translation at x = 0.
  const mpq_class lam(-1, 2);
  const std::vector<mpq_class> t = {0, 1};
  std::size_t k = 0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j, ++k) {
      const mpq_class inner = lam * 0 + t[j];
      const mpq_class outer = lam * inner + t[i];
      EXPECT_EQ(sq.translations()[k].rational(), outer);
      EXPECT_EQ(p[k], mpq_class(1, 4));
    }
  const std::vector<mpq_class> expected = {0, mpq_class(-1, 2), 1, mpq_class(1, 2)};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(sq.translations()[i].rational(), expected[i]);

  const auto [unchanged, p2] = square_if_negative(cantor(), ProbVector::uniform(2));
  EXPECT_EQ(unchanged.lambda(), Q(1, 3));
  EXPECT_EQ(unchanged.translations(), cantor().translations());
  const auto [single, p3] = square_if_negative(EquicontractiveIFS(Q(-1, 2), {Q(0)}), ProbVector({mpq_class(1)}));
  EXPECT_EQ(single.lambda(), Q(1, 4));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single.translations()[0], Q(0));
}

TEST(SquareIfNegative, PreservesLawKs) {
  const EquicontractiveIFS neg(Q(-1, 2), {Q(0), Q(1)});
  const ProbVector p({mpq_class(1, 3), mpq_class(2, 3)});
  const auto [sq, p2] = square_if_negative(neg, p);
  const PointSampler a(neg, p, 101), b(sq, p2, 202);
  std::vector<double> xa, xb;
  for (std::uint64_t i = 0; i < 100000; ++i) {
    xa.push_back(a.value(i, 60));
    xb.push_back(b.value(i, 30));
  }
  const KsReport r = ks_two_sample(xa, xb, 0.01);
  EXPECT_TRUE(r.pass) << r.statistic << " vs " << r.critical;
}

TEST(AttractorHull, Examples) {
  const ExactInterval h = attractor_hull(cantor());
  EXPECT_EQ(h.lo, Q(0));
  EXPECT_EQ(h.hi, Q(1));
  const ExactInterval pt = attractor_hull(EquicontractiveIFS(Q(1, 2), {Q(0)}));
  EXPECT_EQ(pt.lo, Q(0));
  EXPECT_EQ(pt.hi, Q(0));
  const ExactNumber l = golden_reciprocal();
  const ExactInterval g = attractor_hull(EquicontractiveIFS(l, {Q(-1), Q(1)}));
  EXPECT_EQ(g.hi, (Q(1) - l).inverse());
  EXPECT_NEAR(g.lo.to_double(), -2.6180339887498949, 1e-14);
}

TEST(AttractorHull, ExactlyInvariant) {
  Lcg rng{7};
  for (int trial = 0; trial < 30; ++trial) {
    const long m = 2 + rng.below(4);
    std::vector<ExactNumber> t;
    for (long i = 0; i < m; ++i) t.push_back(Q(rng.below(41) - 20, 1 + rng.below(9)));
    const ExactNumber lam = Q(1 + rng.below(98), 100);
    const EquicontractiveIFS ifs(lam, t);
    const ExactInterval h = attractor_hull(ifs);
    ExactNumber lo = lam * h.lo + t[0], hi = lam * h.hi + t[0];
    for (const auto& ti : t) {
      if (lam * h.lo + ti < lo) lo = lam * h.lo + ti;
      if (lam * h.hi + ti > hi) hi = lam * h.hi + ti;
    }
    EXPECT_EQ(lo, h.lo);
    EXPECT_EQ(hi, h.hi);
  }
}

TEST(NormalizeToUnit, CantorConjugation) {
  const EquicontractiveIFS n = normalize_to_unit(cantor());
  EXPECT_EQ(n.lambda(), Q(1, 3));
  EXPECT_EQ(n.translations()[0], Q(0));
  EXPECT_EQ(n.translations()[1], Q(1, 3));
  const ExactInterval h = attractor_hull(n);
  EXPECT_EQ(h.lo, Q(0));
  EXPECT_EQ(h.hi, Q(1, 2));
  EXPECT_EQ(n.frame_scale(), Q(1, 2));
  EXPECT_TRUE(n.is_normalized());
  // Already inside [0,1/2]: same maps, identity recorded.
  const EquicontractiveIFS again = normalize_to_unit(n);
  EXPECT_EQ(again.translations(), n.translations());
  EXPECT_NE(again.provenance().back().find("identity"), std::string::npos);
  EXPECT_THROW(normalize_to_unit(EquicontractiveIFS(Q(1, 2), {Q(3), Q(3)})), InputError);
}

TEST(NormalizeToUnit, BernoulliIntoUnitInterval) {
  const EquicontractiveIFS b(golden_reciprocal(), {Q(-1), Q(1)});
  const EquicontractiveIFS n = normalize_to_unit(b);
  const ExactInterval h = attractor_hull(n);
  EXPECT_EQ(h.lo, Q(0));
  EXPECT_EQ(h.hi, Q(1, 2));
  // Frame map sends the old hull onto the new one.
  const ExactInterval old = attractor_hull(b);
  EXPECT_EQ(n.frame_scale() * old.lo + n.frame_shift(), h.lo);
  EXPECT_EQ(n.frame_scale() * old.hi + n.frame_shift(), h.hi);
}

TEST(CylinderInterval, Examples) {
  const ExactInterval a = cylinder_interval(cantor(), {0});
  EXPECT_EQ(a.lo, Q(0));
  EXPECT_EQ(a.hi, Q(1, 3));
  const ExactInterval b = cylinder_interval(cantor(), {1, 0});
  EXPECT_EQ(b.lo, Q(2, 3));
  EXPECT_EQ(b.hi, Q(7, 9));
  const ExactInterval e = cylinder_interval(cantor(), {});
  EXPECT_EQ(e.lo, Q(0));
  EXPECT_EQ(e.hi, Q(1));
  EXPECT_THROW(cylinder_interval(cantor(), {2}), InputError);
}

TEST(CylinderInterval, NestedAndScaled) {
  const EquicontractiveIFS ifs(golden_reciprocal(), {Q(0), Q(1, 5), Q(1, 3)});
  const ExactNumber diam = attractor_hull(ifs).width();
  for_each_word(3, 3, [&](const DigitWord& w) {
    const ExactInterval parent = cylinder_interval(ifs, w);
    EXPECT_EQ(parent.width(), ifs.lambda().pow(3) * diam);
    for (std::uint32_t j = 0; j < 3; ++j) {
      DigitWord ext = w;
      ext.push_back(j);
      const ExactInterval child = cylinder_interval(ifs, ext);
      EXPECT_TRUE(parent.contains(child));
      EXPECT_EQ(child.width(), parent.width() * ifs.lambda());
    }
  });
}

TEST(CylinderMeasure, ProductLawAndTotalMass) {
  EXPECT_EQ(cylinder_measure(ProbVector::uniform(2), {0, 1, 0}), mpq_class(1, 8));
  const ProbVector p({mpq_class(1, 4), mpq_class(1, 4), mpq_class(1, 2)});
  EXPECT_EQ(cylinder_measure(p, {2, 2}), mpq_class(1, 4));
  EXPECT_EQ(cylinder_measure(p, {}), mpq_class(1));
  for (int len = 0; len <= 5; ++len) {
    mpq_class total = 0;
    for_each_word(3, len, [&](const DigitWord& w) { total += cylinder_measure(p, w); });
    EXPECT_EQ(total, 1);
  }
}

TEST(SeparatedPair, Cantor) {
  const auto r = find_separated_pair(cantor(), 4);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->M, 1);
  EXPECT_EQ(r->first, DigitWord{0});
  EXPECT_EQ(r->second, DigitWord{1});
  EXPECT_TRUE(cylinder_interval(cantor(), r->first).disjoint_from(cylinder_interval(cantor(), r->second)));
}

TEST(SeparatedPair, TouchingIsNotSeparated) {
  // lambda = 1/2, t = (0, 1/2): level-1 images [0,1/2] and [1/2,1] touch.
  const EquicontractiveIFS ifs(Q(1, 2), {Q(0), Q(1, 2)});
  const auto r = find_separated_pair(ifs, 3);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->M, 2);
  EXPECT_EQ(r->first, (DigitWord{0, 0}));
  EXPECT_EQ(r->second, (DigitWord{1, 0}));
}

TEST(SeparatedPair, OverlappingMatchesExhaustiveOracle) {
  // lambda = 3/4, t = (0, 1/16): first-level images overlap heavily.
  const EquicontractiveIFS ifs(Q(3, 4), {Q(0), Q(1, 16)});
  const auto r = find_separated_pair(ifs, 8);
  // Oracle: exhaustive rational check, independent of the ExactNumber path.
  std::optional<std::tuple<int, DigitWord, DigitWord>> oracle;
  const mpq_class lam(3, 4), t1(1, 16), hull_hi = t1 / (1 - lam);
  for (int M = 1; M <= 8 && !oracle; ++M) {
    std::vector<DigitWord> words;
    for_each_word(2, M, [&](const DigitWord& w) { words.push_back(w); });
    auto interval = [&](const DigitWord& w) {
      mpq_class s = 0, pw = 1;
      for (auto d : w) {
        s += (d ? t1 : mpq_class(0)) * pw;
        pw *= lam;
      }
      return std::make_pair(s, mpq_class(s + pw * hull_hi));
    };
    for (std::size_t a = 0; a < words.size() && !oracle; ++a)
      for (std::size_t b = a + 1; b < words.size() && !oracle; ++b) {
        const auto ia = interval(words[a]), ib = interval(words[b]);
        if (ia.second < ib.first || ib.second < ia.first) oracle = std::make_tuple(M, words[a], words[b]);
      }
  }
  ASSERT_EQ(r.has_value(), oracle.has_value());
  if (r) {
    EXPECT_GT(r->M, 1);
    EXPECT_EQ(r->M, std::get<0>(*oracle));
    EXPECT_EQ(r->first, std::get<1>(*oracle));
    EXPECT_EQ(r->second, std::get<2>(*oracle));
  }
}

TEST(SeparatedPair, RepeatedTranslationNotFound) {
  EXPECT_FALSE(find_separated_pair(EquicontractiveIFS(Q(1, 3), {Q(1, 5), Q(1, 5)}), 5).has_value());
}

TEST(ComposePower, MatchesWordCylinders) {
  const ProbVector p({mpq_class(1, 4), mpq_class(3, 4)});
  const auto [c, pc] = compose_power(cantor(), p, 3);
  EXPECT_EQ(c.size(), 8u);
  EXPECT_EQ(c.lambda(), Q(1, 27));
  for_each_word(2, 3, [&](const DigitWord& w) {
    const std::uint32_t k = word_index(w, 2);
    EXPECT_EQ(pc[k], cylinder_measure(p, w));
    const ExactInterval cw = cylinder_interval(cantor(), w);
    const ExactInterval ck = cylinder_interval(c, {k});
    EXPECT_EQ(cw.lo, ck.lo);
    EXPECT_EQ(cw.hi, ck.hi);
  });
}

TEST(SamplePoint, DepthZeroIsFirstCylinder) {
  const CertifiedPoint pt = sample_point(cantor(), ProbVector::uniform(2), 0, 5, 0);
  ASSERT_EQ(pt.digits.size(), 1u);
  const ExactInterval c = cylinder_interval(cantor(), pt.digits);
  EXPECT_TRUE(pt.enclosure.contains(c.lo.rational()));
  EXPECT_TRUE(pt.enclosure.contains(c.hi.rational()));
  EXPECT_LE(pt.enclosure.width(), c.width().to_double() * (1 + 1e-12));
}

TEST(SamplePoint, ForcedDigitEnclosesFixedPoint) {
  const CertifiedPoint pt = sample_point(cantor(), ProbVector({mpq_class(1), mpq_class(0)}), 20, 1, 0);
  for (auto d : pt.digits) EXPECT_EQ(d, 0u);
  EXPECT_TRUE(pt.enclosure.contains(mpq_class(0)));
}

TEST(SamplePoint, EnclosureWidthAndDeterminism) {
  const EquicontractiveIFS ifs = normalize_to_unit(EquicontractiveIFS(golden_reciprocal(), {Q(-1), Q(1)}));
  const ProbVector p = ProbVector::uniform(2);
  const CertifiedPoint a = sample_point(ifs, p, 200, 77, 3, 256);
  const CertifiedPoint b = sample_point(ifs, p, 200, 77, 3, 256);
  EXPECT_EQ(a.digits, b.digits);
  const double bound = std::pow(0.6180339887498949, 201) * 0.5;
  EXPECT_LT(a.enclosure.width(), bound * (1 + 1e-6));
  // A deeper sample of the same point is nested inside the shallower one.
  const CertifiedPoint deep = sample_point(ifs, p, 400, 77, 3, 512);
  EXPECT_TRUE(a.enclosure.contains(deep.enclosure));
}

TEST(SamplePoint, MeanMatchesClosedForm) {
  const ProbVector p({mpq_class(1, 4), mpq_class(1, 4), mpq_class(1, 2)});
  const EquicontractiveIFS ifs(Q(1, 5), {Q(0), Q(2, 5), Q(4, 5)});
  const PointSampler s(ifs, p, 2024);
  std::vector<double> xs;
  for (std::uint64_t i = 0; i < 100000; ++i) xs.push_back(s.value(i, 30));
  const MeanEstimate m = mean_and_stderr(xs);
  const double et = 0.25 * 0 + 0.25 * 0.4 + 0.5 * 0.8;
  EXPECT_NEAR(m.mean, et / (1 - 0.2), 4 * m.standard_error);
}

TEST(DigitLaw, ThresholdsFollowCumulativeWeights) {
  const DigitLaw law({mpq_class(1, 4), mpq_class(1, 4), mpq_class(1, 2)});
  EXPECT_EQ(law.draw(0), 0u);
  EXPECT_EQ(law.draw(0x3fffffffu), 0u);
  EXPECT_EQ(law.draw(0x40000000u), 1u);
  EXPECT_EQ(law.draw(0x7fffffffu), 1u);
  EXPECT_EQ(law.draw(0x80000000u), 2u);
  EXPECT_EQ(law.draw(0xffffffffu), 2u);
  const DigitLaw forced({mpq_class(1), mpq_class(0)});
  EXPECT_EQ(forced.draw(0xffffffffu), 0u);
}
