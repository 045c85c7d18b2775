#include <gtest/gtest.h>

#include <cmath>

#include "normalis/error.hpp"
#include "normalis/interval.hpp"

using namespace normalis;

TEST(Interval, RationalEnclosureContainsValue) {
  const mpq_class third(1, 3);
  const Interval x(third, 64);
  EXPECT_TRUE(x.contains(third));
  EXPECT_TRUE(x.width_at_most_pow2(-60));
}

TEST(Interval, ArithmeticEnclosesExactResult) {
  const mpq_class a(2, 7), b(-5, 11);
  const Interval ia(a, 80), ib(b, 80);
  EXPECT_TRUE((ia + ib).contains(a + b));
  EXPECT_TRUE((ia - ib).contains(a - b));
  EXPECT_TRUE((ia * ib).contains(a * b));
  EXPECT_TRUE((ia / ib).contains(a / b));
}

TEST(Interval, DivisionByIntervalContainingZeroThrows) {
  const Interval num(1L, 64);
  const Interval den = Interval::from_endpoints(mpq_class(-1, 10), mpq_class(1, 10), 64);
  EXPECT_THROW(num / den, Error);
}

TEST(Interval, EvenPowerOfNegativeStraddlingInterval) {
  const Interval x = Interval::from_endpoints(mpq_class(-2), mpq_class(1), 64);
  const Interval sq = x.pow(2);
  EXPECT_TRUE(sq.contains(mpq_class(0)));
  EXPECT_TRUE(sq.contains(mpq_class(4)));
  EXPECT_FALSE(sq.contains(mpq_class(-1, 100)));
}

TEST(Interval, TranscendentalsAgreeWithLibm) {
  const Interval x(mpq_class(3, 10), 128);
  EXPECT_NEAR(x.exp().mid_double(), std::exp(0.3), 1e-15);
  EXPECT_NEAR(x.log().mid_double(), std::log(0.3), 1e-15);
  EXPECT_NEAR(x.cos().mid_double(), std::cos(0.3), 1e-15);
  EXPECT_NEAR(x.sin().mid_double(), std::sin(0.3), 1e-15);
  EXPECT_NEAR(Interval::pi(128).mid_double(), M_PI, 1e-15);
}

TEST(Interval, CommonFloorDetectsStraddle) {
  mpz_class k;
  EXPECT_TRUE(Interval::from_endpoints(mpq_class(21, 10), mpq_class(29, 10), 64).common_floor(k));
  EXPECT_EQ(k, 2);
  EXPECT_FALSE(Interval::from_endpoints(mpq_class(19, 10), mpq_class(21, 10), 64).common_floor(k));
}

TEST(ComplexInterval, UnitPhaseHasModulusOne) {
  const ComplexInterval z = ComplexInterval::expi(Interval(mpq_class(7, 5), 128));
  EXPECT_TRUE(z.abs().contains(mpq_class(1)));
  EXPECT_LT(z.abs().width(), 1e-30);
}
