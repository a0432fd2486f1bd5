#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "buyback/core_model.hpp"
#include "oracles.hpp"

using namespace buyback;

namespace {

MarketParams<double> market(double i, double tax) { return {i, tax}; }

CompanyState<double> company(double O, double C, double N, double P) {
  CompanyState<double> s;
  s.trading_profit = O;
  s.cash = C;
  s.shares = N;
  s.price = P;
  return s;
}

} // namespace

TEST(Eps, DirectEvaluation) {
  EXPECT_DOUBLE_EQ(eps(company(80, 1000, 100, 10), market(0.02, 0.20)), 0.8);
  EXPECT_EQ(eps(company(0, 0, 1, 10), market(0.07, 0.3)), 0.0);

  auto consumed = company(100, 0, 10, 10);
  consumed.minority_charge = 100;
  EXPECT_EQ(eps(consumed, market(0.02, 0.0)), 0.0);
}

TEST(Eps, RejectsBrokenInvariants) {
  EXPECT_THROW(eps(company(1, 1, 0, 10), market(0.02, 0.2)), std::invalid_argument);
  EXPECT_THROW(eps(company(1, -1, 1, 10), market(0.02, 0.2)), std::invalid_argument);
  EXPECT_THROW(eps(company(1, 1, 1, 10), market(0.02, 1.0)), std::invalid_argument);
}

TEST(EpsPostBuyback, ZeroSpendIsIdentity) {
  auto s = company(80, 1000, 100, 30);
  s.dividend = 0.5;
  s.minority_charge = 3;
  EXPECT_EQ(eps_post_buyback(s, market(0.02, 0.2), 0.0), eps(s, market(0.02, 0.2)));
}

TEST(EpsPostBuyback, CriticalPriceIsAFixedPoint) {
  const auto mk = market(0.02, 0.20);
  auto s = company(80, 1000, 100, 1);
  const double e = eps(s, mk);
  s.price = critical_price(e, mk);
  EXPECT_DOUBLE_EQ(s.price, 50.0);
  // Algebra: (80 + 500*0.02)*0.8/(100 - 10) = 72/90 = 0.8.
  EXPECT_NEAR(eps_post_buyback(s, mk, 500.0), 0.8, 1e-15);
  for (double spend : {1.0, 10.0, 250.0, 999.0, 4000.0}) {
    EXPECT_NEAR(eps_post_buyback(s, mk, spend) / e, 1.0, 1e-12) << spend;
  }
}

TEST(EpsPostBuyback, BelowCriticalPriceIsAccretive) {
  const auto mk = market(0.02, 0.20);
  const auto s = company(80, 1000, 100, 25);
  EXPECT_GT(eps_post_buyback(s, mk, 500.0), eps(s, mk));
}

TEST(EpsPostBuyback, MatchesBalanceSheetWithDividend) {
  auto s = company(120, 800, 50, 40);
  s.dividend = 1.5;
  s.minority_charge = 4;
  const double expected =
      oracle::eps_from_balance_sheet(120, 800, 50, 40, 1.5, 4, 0.03, 0.25, 300);
  EXPECT_NEAR(eps_post_buyback(s, market(0.03, 0.25), 300.0), expected, 1e-14);
}

TEST(EpsPostBuyback, RejectsRetiringEveryShare) {
  const auto s = company(80, 1000, 100, 10);
  EXPECT_THROW(eps_post_buyback(s, market(0.02, 0.2), 1000.0), std::invalid_argument);
  EXPECT_THROW(eps_post_buyback(s, market(0.02, 0.2), 5000.0), std::invalid_argument);
  EXPECT_THROW(eps_post_buyback(s, market(0.02, 0.2), -1.0), std::invalid_argument);
}

TEST(CriticalPe, AnchorValues) {
  EXPECT_EQ(critical_pe(market(0.025, 0.20)), 50.0);
  EXPECT_EQ(critical_pe(market(1.0, 0.0)), 1.0);
  EXPECT_NEAR(critical_pe(market(0.02, 0.21)), 63.29113924050633, 1e-12);
}

TEST(CriticalPe, UndefinedAtNonPositiveRate) {
  EXPECT_THROW(critical_pe(market(0.0, 0.2)), std::domain_error);
  EXPECT_THROW(critical_pe(market(-0.01, 0.2)), std::domain_error);
  EXPECT_THROW(critical_price(1.0, market(0.0, 0.2)), std::domain_error);
}

TEST(CriticalPrice, AnchorValues) {
  EXPECT_EQ(critical_price(1.0, market(0.025, 0.20)), 50.0);
  EXPECT_EQ(critical_price(0.0, market(0.025, 0.20)), 0.0);
  EXPECT_DOUBLE_EQ(critical_price(2.0, market(0.05, 0.5)), 80.0);
  EXPECT_LT(critical_price(-1.0, market(0.05, 0.5)), 0.0);
}

TEST(IsAccretive, WeakInequalityAtBoundary) {
  const auto mk = market(0.025, 0.20);
  const auto boundary = is_accretive(50.0, mk);
  EXPECT_TRUE(boundary.accretive);
  EXPECT_EQ(boundary.margin, 0.0);
  EXPECT_TRUE(is_accretive(49.99, mk).accretive);
  const auto above = is_accretive(60.0, mk);
  EXPECT_FALSE(above.accretive);
  EXPECT_DOUBLE_EQ(above.margin, -10.0);
}

TEST(IsAccretive, NegativeEarningsNeverAccretive) {
  const auto mk = market(0.025, 0.20);
  EXPECT_FALSE(is_accretive(-12.0, mk).accretive);

  auto loss_maker = company(-200, 1000, 100, 5);
  EXPECT_LT(eps(loss_maker, mk), 0.0);
  EXPECT_LT(critical_price(eps(loss_maker, mk), mk), 0.0);
  EXPECT_FALSE(is_accretive(loss_maker, mk).accretive);
  EXPECT_LT(eps_post_buyback(loss_maker, mk, 100.0), eps(loss_maker, mk));
}

TEST(InstantaneousEnhancement, Examples) {
  EXPECT_EQ(instantaneous_enhancement(0.3, 0.0), 0.0);
  EXPECT_EQ(instantaneous_enhancement(1.0, 0.1), 0.0);
  EXPECT_NEAR(instantaneous_enhancement(0.25, 0.01), 0.007575757575757576, 1e-17);
  EXPECT_GT(instantaneous_enhancement(0.5, 0.1), 0.0);
  EXPECT_LT(instantaneous_enhancement(1.5, 0.1), 0.0);
  EXPECT_THROW(instantaneous_enhancement(0.5, 1.0), std::invalid_argument);
}

TEST(InstantaneousEnhancementApprox, Examples) {
  EXPECT_EQ(instantaneous_enhancement_approx(0.4, 0.0), 0.0);
  EXPECT_EQ(instantaneous_enhancement_approx(1.0, 0.02), 0.0);
  EXPECT_NEAR(instantaneous_enhancement_approx(0.25, 0.0025), 0.0075, 1e-17);
  EXPECT_LE(instantaneous_enhancement_approx(0.25, 0.0025),
            instantaneous_enhancement(0.25, 0.01));
  EXPECT_THROW(instantaneous_enhancement_approx(0.0, 0.01), std::invalid_argument);
}

TEST(InstantaneousEnhancement, ApproximationIsConservativeWithQuadraticGap) {
  double worst = 0.0;
  for (int a = 1; a < 100; ++a) {
    for (int b = 1; b < 100; ++b) {
      const double m = a / 100.0;
      const double gamma = b / 100.0;
      const double exact = instantaneous_enhancement(m, gamma);
      const double approx = instantaneous_enhancement_approx(m, m * gamma);
      ASSERT_LE(approx, exact) << m << " " << gamma;
      worst = std::max(worst, (exact - approx) / (gamma * gamma));
    }
  }
  // gap / gamma^2 = (1 - m)/(1 - gamma) stays bounded on the grid.
  EXPECT_LT(worst, 100.0);
  EXPECT_GT(worst, 0.0);
}

TEST(InstantaneousEnhancement, Monotonicity) {
  for (int a = 1; a < 50; ++a) {
    for (int b = 1; b < 50; ++b) {
      const double m = a / 50.0;
      const double g = b / 50.0;
      EXPECT_GT(instantaneous_enhancement(m, g), instantaneous_enhancement(m + 0.01, g));
      if (m < 1.0) {
        EXPECT_LT(instantaneous_enhancement(m, g), instantaneous_enhancement(m, g + 0.01));
      }
    }
  }
}

TEST(HorizonEnhancement, RecoversInstantaneousAtZero) {
  const BuybackPolicy<double> p{0.02, 0.1, 0.10, 0.02, 1.0};
  EXPECT_NEAR(horizon_enhancement(p, 0.0), 1.0183673469387755, 1e-15);
  EXPECT_NEAR(horizon_enhancement(p, 0.0), 1.0 + instantaneous_enhancement(0.1, 0.02),
              1e-15);
}

TEST(HorizonEnhancement, ConstantWhenGrowthMatchesInterest) {
  const BuybackPolicy<double> p{0.03, 0.4, 0.05, 0.05, 1.0};
  for (double T : {0.0, 1.0, 7.5, 40.0}) {
    EXPECT_NEAR(horizon_enhancement(p, T), horizon_enhancement(p, 0.0), 1e-15);
  }
}

TEST(HorizonEnhancement, FiveYearValue) {
  const BuybackPolicy<double> p{0.02, 0.1, 0.10, 0.02, 1.0};
  EXPECT_NEAR(horizon_enhancement(p, 5.0), 1.0190090871161486, 1e-15);
}

TEST(HorizonEnhancement, LimitsAndFirstOrder) {
  const BuybackPolicy<double> p{0.02, 0.1, 0.10, 0.02, 1.0};
  const auto limits = horizon_boost_limits(p);
  EXPECT_DOUBLE_EQ(limits.exact, 0.02 / 0.98);
  EXPECT_DOUBLE_EQ(limits.first_order, 0.02);
  EXPECT_NEAR(horizon_enhancement(p, 2000.0) - 1.0, limits.exact, 1e-15);
  EXPECT_NEAR(horizon_boost_first_order(p, 2000.0), limits.first_order, 1e-15);
  for (double T : {0.0, 1.0, 5.0, 20.0}) {
    EXPECT_LE(horizon_boost_first_order(p, T), horizon_enhancement(p, T) - 1.0);
  }
  EXPECT_THROW(horizon_boost_limits(BuybackPolicy<double>{0.02, 0.1, 0.02, 0.02, 1.0}),
               std::invalid_argument);
}

TEST(FutureEps, Examples) {
  EXPECT_EQ(future_eps(1.3, 1.0, 0.4, 0.0, 1.05), 1.3);
  EXPECT_NEAR(future_eps(1.1, 1.0, 0.5, 0.01, 1.02), 1.105959595959596, 1e-15);
  EXPECT_THROW(future_eps(1.0, 1.0, 0.5, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(future_eps(1.0, 1.0, 0.5, 0.1, 0.0), std::invalid_argument);
}

TEST(FutureEps, RiskFreeReinvestmentLowerBound) {
  for (double m : {0.0 + 1e-3, 0.25, 0.5, 0.9, 1.0}) {
    for (double g : {0.001, 0.01, 0.05, 0.2}) {
      for (double I : {1.0, 1.02, 1.3}) {
        const double Et = 2.0;
        const double ET = I * Et;
        const double rel = (future_eps(ET, Et, m, g, I) - ET) / ET;
        EXPECT_GE(rel, (1.0 - m) * g - 1e-15);
        EXPECT_LE(future_eps_first_order(ET, Et, m, g, I), future_eps(ET, Et, m, g, I));
      }
    }
  }
}

TEST(FutureEps, ReducesToInstantaneousForm) {
  const double m = 0.3, g = 0.04, Et = 1.7;
  EXPECT_NEAR(future_eps(Et, Et, m, g, 1.0), (1 - m * g) / (1 - g) * Et, 1e-15);
}

TEST(ProgramSeries, SingleBuybackConventions) {
  const BuybackPolicy<double> p{0.02, 0.4, 0.07, 0.02, 0.25};
  const auto rec = program_series(p, 0, ProgramMode::Recursive);
  const auto lit = program_series(p, 0, ProgramMode::PaperLiteral);
  ASSERT_EQ(rec.size(), 1);
  EXPECT_NEAR(rec.enhanced(0), (1 - 0.008) / 0.98, 1e-15);
  EXPECT_NEAR(lit.enhanced(0), 1 - 0.008, 1e-15);
  EXPECT_EQ(rec.natural(0), 1.0);
}

TEST(ProgramSeries, QuarterlyExampleMatchesCompoundingOracle) {
  const BuybackPolicy<double> p{0.01, 0.5, 0.10, 0.02, 0.25};
  const auto s = program_series(p, 20);
  EXPECT_NEAR(s.enhanced(20), 1.8219657370433797, 1e-13);
  for (long n = 0; n <= 20; ++n) {
    EXPECT_NEAR(s.enhanced(n) / oracle::compounded(0.5, 0.01, 0.10, 0.02, 0.25, n), 1.0,
                1e-13);
    EXPECT_GT(s.enhanced(n), s.natural(n));
    EXPECT_NEAR(s.natural(n), std::pow(1.10, 0.25 * n), 1e-14);
  }
}

TEST(ProgramSeries, LiteralDiffersByOneInflationFactor) {
  const BuybackPolicy<double> p{0.03, 0.6, 0.05, 0.01, 0.5};
  const auto rec = program_series(p, 60, ProgramMode::Recursive);
  const auto lit = program_series(p, 60, ProgramMode::PaperLiteral);
  for (Eigen::Index n = 0; n < rec.size(); ++n) {
    EXPECT_NEAR(rec.enhanced(n) * (1 - 0.03) / lit.enhanced(n), 1.0, 1e-13);
  }
}

TEST(ProgramSeries, ZeroSpendEqualsNatural) {
  const BuybackPolicy<double> p{0.0, 0.5, 0.08, 0.02, 0.25};
  const auto s = program_series(p, 40);
  EXPECT_EQ(s.enhanced, s.natural);
}

TEST(ProgramSeries, LogSpaceAgreesWithDirectProduct) {
  const BuybackPolicy<double> p{0.01, 0.5, 0.10, 0.02, 0.25};
  const auto shortrun = program_series(p, 1000);
  const auto longrun = program_series(p, 1500);
  for (Eigen::Index n = 0; n <= 1000; n += 50) {
    EXPECT_NEAR(longrun.enhanced(n) / shortrun.enhanced(n), 1.0, 1e-11);
  }
}

TEST(ProgramSeries, RejectsNonPositiveFactor) {
  // Interest outgrowing earnings with an expensive buyback eventually breaks
  // the product.
  const BuybackPolicy<double> p{0.5, 3.0, 0.0, 0.5, 1.0};
  EXPECT_THROW(program_series(p, 10), std::domain_error);
}

TEST(ProgramSeries, DominatesFirstOrderGeometricBound) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int trial = 0; trial < 200; ++trial) {
    const double m = u(rng), g = 0.2 * u(rng);
    const double iota = 0.05 * u(rng);
    const double xi = iota + 0.2 * u(rng);
    const double c = 0.25 + u(rng);
    const BuybackPolicy<double> p{g, m, xi, iota, c};
    const double d = 1.0 - m * std::pow((1 + iota) / (1 + xi), c);
    const auto s = program_series(p, 80);
    for (Eigen::Index n = 0; n < s.size(); ++n) {
      EXPECT_GE(s.enhanced(n), s.natural(n) * std::pow(1 + d * g, n) * (1 - 1e-12));
    }
  }
}

TEST(AsymptoticLogGrowth, Examples) {
  const BuybackPolicy<double> none{0.0, 0.5, 0.10, 0.02, 0.25};
  EXPECT_NEAR(asymptotic_log_growth(none), 0.25 * std::log(1.10), 1e-15);
  EXPECT_NEAR(natural_log_growth(none), 0.25 * std::log(1.10), 1e-15);

  const BuybackPolicy<double> pure{0.01, 0.5, 0.0, 0.0, 1.0};
  EXPECT_NEAR(asymptotic_log_growth(pure), 0.01005033585350145, 1e-16);

  const BuybackPolicy<double> p{0.01, 0.5, 0.10, 0.02, 0.25};
  const auto s = program_series(p, 10000);
  EXPECT_NEAR(std::log(s.enhanced(10000)) / 10000.0, asymptotic_log_growth(p), 1e-3);
}

TEST(SeriesIdentity, PartialSumsConverge) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_real_distribution<double> ratio(-0.9, 0.9);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = coef(rng), b = coef(rng), x = ratio(rng);
    const double closed = (a - b * x) / (1 - x);
    EXPECT_NEAR(oracle::series_partial_sum(a, b, x, 600), closed,
                1e-12 * (1 + std::abs(closed)));
    // The first-order truncation is what future_eps_first_order uses.
    EXPECT_NEAR(future_eps(a, b, 1.0, std::abs(x), 1.0),
                oracle::series_partial_sum(a, b, std::abs(x), 600),
                1e-12 * (1 + std::abs(closed)) * 10);
  }
}

template <typename Scalar> class ScalarTypes : public ::testing::Test {};
using Scalars = ::testing::Types<float, double, long double>;
TYPED_TEST_SUITE(ScalarTypes, Scalars);

TYPED_TEST(ScalarTypes, FormulasInstantiateForEachScalar) {
  using S = TypeParam;
  const MarketParams<S> mk{S(0.025), S(0.2)};
  EXPECT_NEAR(static_cast<double>(critical_pe(mk)), 50.0, 1e-4);
  const BuybackPolicy<S> p{S(0.01), S(0.5), S(0.1), S(0.02), S(0.25)};
  const auto s = program_series(p, 20);
  EXPECT_NEAR(static_cast<double>(s.enhanced(20)), 1.8219657370433797, 1e-5);
  EXPECT_NEAR(static_cast<double>(instantaneous_enhancement(S(0.25), S(0.01))),
              0.007575757575757576, 1e-7);
}
