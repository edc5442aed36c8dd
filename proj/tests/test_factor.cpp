#include <gtest/gtest.h>

#include <cmath>

#include "ibt/error.hpp"
#include "ibt/factor.hpp"
#include "support.hpp"

namespace ibt {
namespace {

const FactorMap& linear() { return testing::beta_map(1, 1).factor(); }

TEST(Factor, LinearCutClosedForms) {
  const FactorMap& fm = linear();
  EXPECT_NEAR(fm.A(), 0.5, 1e-15);
  EXPECT_NEAR(fm.A_quadrature(), 0.5, 1e-12);
  for (double x : {0.0, 0.1, 0.37, 0.8, 1.0}) {
    EXPECT_NEAR(fm.w0(x), x - x * x / 2, 1e-14);
    EXPECT_NEAR(fm.w1(x), 0.5 + x * x / 2, 1e-14);
  }
  EXPECT_NEAR(fm.f(0.375), 0.5, 1e-13);
  EXPECT_NEAR(fm.f(0.625), 0.5, 1e-13);
  EXPECT_NEAR(fm.Df(0.375), 2.0, 1e-12);
  EXPECT_NEAR(fm.Df(0.49), 1.0 / std::sqrt(1 - 0.98), 1e-9);
}

TEST(Factor, FixedPointsAndUnitSlope) {
  testing::Gen g(21);
  for (int i = 0; i < 5; ++i) {
    const FactorMap& fm = testing::beta_map(g.alpha(), g.alpha()).factor();
    EXPECT_EQ(fm.f(0.0), 0.0);
    EXPECT_EQ(fm.f(1.0), 1.0);
    EXPECT_NEAR(fm.Df(0.0), 1.0, 1e-15);
    EXPECT_NEAR(fm.Df(1.0), 1.0, 1e-15);
  }
}

TEST(Factor, SymmetricFamiliesCutAtHalf) {
  for (double a : {0.5, 2.0, 3.0}) {
    EXPECT_NEAR(testing::beta_map(a, a).factor().A(), 0.5, 1e-13) << a;
  }
}

TEST(Factor, AsymmetricCutArea) {
  const FactorMap& fm = testing::beta_map(2, 1).factor();
  EXPECT_NEAR(fm.A(), 2.0 / 3.0, 1e-13);
  EXPECT_NEAR(fm.A_quadrature(), 2.0 / 3.0, 1e-12);
}

TEST(Factor, BranchEndpoints) {
  for (auto [a0, a1] : {std::pair{1.0, 1.0}, std::pair{2.0, 1.0}, std::pair{0.5, 0.5}}) {
    const FactorMap& fm = testing::beta_map(a0, a1).factor();
    EXPECT_NEAR(fm.w0(0.0), 0.0, 1e-14);
    EXPECT_NEAR(fm.w0(1.0), fm.A(), 1e-14);
    EXPECT_NEAR(fm.w1(0.0), fm.A(), 1e-14);
    EXPECT_NEAR(fm.w1(1.0), 1.0, 1e-14);
  }
}

TEST(Factor, NearCutIsAnError) {
  const FactorMap& fm = linear();
  EXPECT_THROW((void)fm.Df(0.5), NearCutError);
  EXPECT_THROW((void)fm.Df(0.5 + 5e-13), NearCutError);
  EXPECT_NO_THROW((void)fm.Df(0.5 + 1e-9));
  EXPECT_THROW((void)fm.f(-0.1), DomainError);
}

TEST(Factor, OneSidedLimitsAtTheCut) {
  const FactorMap& fm = testing::beta_map(2, 2).factor();
  EXPECT_GT(fm.f(fm.A() - 1e-10), 0.999);
  EXPECT_LT(fm.f(fm.A() + 1e-10), 0.001);
}

TEST(FactorProperty, LeftInverseOfBothBranches) {
  testing::Gen g(22);
  for (int trial = 0; trial < 6; ++trial) {
    const FactorMap& fm = testing::beta_map(g.alpha(), g.alpha()).factor();
    for (int i = 0; i < 1000; ++i) {
      const double x = g.uniform();
      const double l = fm.w0(x);
      const double r = fm.w1(x);
      if (std::fabs(l - fm.A()) > 1e-11) ASSERT_NEAR(fm.f(l), x, 1e-10);
      if (std::fabs(r - fm.A()) > 1e-11) ASSERT_NEAR(fm.f(r), x, 1e-10);
    }
  }
}

TEST(FactorProperty, TabulatedInverseMatchesBisectionOracle) {
  testing::Gen g(23);
  for (int trial = 0; trial < 6; ++trial) {
    const FactorMap& fm = testing::beta_map(g.alpha(), g.alpha()).factor();
    for (int i = 0; i < 500; ++i) {
      const double x = g.away_from(fm.A(), 1e-9);
      ASSERT_NEAR(fm.f(x), fm.f_reference(x), 1e-12) << "x=" << x;
    }
  }
}

TEST(FactorProperty, BranchesAreStrictlyIncreasing) {
  testing::Gen g(24);
  for (int trial = 0; trial < 6; ++trial) {
    const FactorMap& fm = testing::beta_map(g.alpha(), g.alpha()).factor();
    double p0 = fm.w0(0.0);
    double p1 = fm.w1(0.0);
    for (int i = 1; i <= 2000; ++i) {
      const double x = i / 2000.0;
      ASSERT_GT(fm.w0(x), p0);
      ASSERT_GT(fm.w1(x), p1);
      p0 = fm.w0(x);
      p1 = fm.w1(x);
    }
  }
}

TEST(FactorProperty, PreimageLengthsSumToIntervalLength) {
  testing::Gen g(25);
  for (int trial = 0; trial < 6; ++trial) {
    const FactorMap& fm = testing::beta_map(g.alpha(), g.alpha()).factor();
    for (int i = 0; i < 1000; ++i) {
      double a = g.uniform();
      double b = g.uniform();
      if (a > b) std::swap(a, b);
      const double total = (fm.w0(b) - fm.w0(a)) + (fm.w1(b) - fm.w1(a));
      ASSERT_NEAR(total, b - a, 1e-9);
    }
  }
}

TEST(FactorProperty, Expanding) {
  testing::Gen g(26);
  for (int trial = 0; trial < 6; ++trial) {
    const FactorMap& fm = testing::beta_map(g.alpha(), g.alpha()).factor();
    for (int i = 0; i < 1000; ++i) {
      const double x = g.away_from(fm.A(), 1e-6);
      ASSERT_GE(fm.Df(x), 1.0 - 1e-12) << "x=" << x;
    }
  }
}

TEST(FactorProperty, DerivativeMatchesDifferenceQuotient) {
  testing::Gen g(27);
  for (int trial = 0; trial < 4; ++trial) {
    const FactorMap& fm = testing::beta_map(g.alpha(), g.alpha()).factor();
    for (int i = 0; i < 200; ++i) {
      const double x = g.away_from(fm.A(), 1e-2);
      if (x < 1e-3 || x > 1 - 1e-3) continue;
      const double h = 1e-7;
      const double fd = (fm.f_reference(x + h) - fm.f_reference(x - h)) / (2 * h);
      ASSERT_NEAR(fd, fm.Df(x), 1e-5 * fm.Df(x)) << "x=" << x;
    }
  }
}

TEST(FactorProperty, GapFunctionsAgreeWithBranches) {
  testing::Gen g(28);
  for (int trial = 0; trial < 4; ++trial) {
    const FactorMap& fm = testing::beta_map(g.alpha(), g.alpha()).factor();
    for (int i = 0; i < 200; ++i) {
      const double x = g.uniform(0.01, 0.99);
      ASSERT_NEAR(fm.w0_gap(x), x - fm.w0(x), 1e-13);
      ASSERT_NEAR(fm.w0_top_gap(x), fm.A() - fm.w0(1.0 - x), 1e-13);
      ASSERT_NEAR(fm.w1_top_gap(x), 1.0 - fm.w1(1.0 - x), 1e-13);
    }
  }
}

}  // namespace
}  // namespace ibt
