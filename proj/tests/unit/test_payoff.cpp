#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "volterra/errors.hpp"
#include "volterra/payoff.hpp"

using namespace volterra;

TEST(Payoff, CallAndPut) {
  const auto c = Payoff::call(1.0);
  EXPECT_EQ(c(1.5), 0.5);
  EXPECT_EQ(c(0.5), 0.0);
  ASSERT_EQ(c.kinks().size(), 1u);
  EXPECT_EQ(c.kinks()[0].location, 1.0);
  EXPECT_EQ(c.kinks()[0].jump, 1.0);
  const auto p = Payoff::put(1.0);
  EXPECT_EQ(p(0.25), 0.75);
  EXPECT_EQ(p.kinks()[0].jump, 1.0);
}

TEST(Payoff, GaussianExpectationOfCallIsBachelier) {
  const auto c = Payoff::call(0.2);
  const double kink = 0.2;
  for (double x : {-1.0, 0.0, 0.2, 0.7}) {
    for (double s : {0.05, 0.5, 1.3}) {
      const double got = gaussian_expectation([&](double y) { return c(y); }, x, s, std::span<const double>(&kink, 1));
      EXPECT_NEAR(got, oracle::bachelier_call(x, 0.2, s), 1e-10) << x << " " << s;
    }
  }
}

TEST(Payoff, SecondDerivativeExpectationIsDensity) {
  const auto c = Payoff::call(0.2);
  EXPECT_NEAR(gaussian_expectation_second(c, 0.5, 0.4), oracle::phi((0.5 - 0.2) / 0.4) / 0.4, 1e-12);
}

TEST(Payoff, SmoothPowers) {
  const auto g = Payoff::power(4);
  EXPECT_NEAR(gaussian_expectation([&](double y) { return g(y); }, 0.0, 2.0), 3.0 * 16.0, 1e-9);
  EXPECT_EQ(g.second(2.0), 48.0);
}

TEST(Payoff, GrowthGuardRejectsExplosiveIntegrands) {
  EXPECT_THROW(gaussian_expectation([](double y) { return std::exp(y * y); }, 0.0, 1.0), EvaluationError);
}

TEST(Payoff, TabulatedReproducesLinearData) {
  const auto g = Payoff::tabulated({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
  EXPECT_NEAR(g(1.5), 4.0, 1e-12);
  EXPECT_NEAR(g(5.0), 11.0, 1e-12);
  EXPECT_NEAR(g.first(2.5), 2.0, 1e-12);
  EXPECT_THROW(Payoff::tabulated({0.0, 0.0}, {1.0, 2.0}), ConfigError);
}

TEST(Payoff, TabulatedCsv) {
  const auto path = std::filesystem::temp_directory_path() / "volterra_payoff_test.csv";
  {
    std::ofstream out(path);
    out << "x,g\n0,0\n1,1\n2,4\n3,9\n";
  }
  const auto g = Payoff::load_tabulated_csv(path);
  EXPECT_NEAR(g(2.0), 4.0, 1e-12);
  std::filesystem::remove(path);
}

TEST(Payoff, RunningSquare) {
  const auto f = RunningCost::square();
  EXPECT_EQ(f(0.3, 2.0), 4.0);
  EXPECT_EQ(f.dx(0.3, 2.0), 4.0);
  EXPECT_EQ(f.dxx(0.3, 2.0), 2.0);
  EXPECT_TRUE(RunningCost::zero().is_zero());
}

TEST(Payoff, TrigonometricDerivatives) {
  const auto g = Payoff::trigonometric({{0.5, 2.0, 0.3}, {-1.0, 0.7, 0.0}});
  const double x = 0.4;
  EXPECT_NEAR(g(x), 0.5 * std::sin(0.8 + 0.3) - std::sin(0.28), 1e-15);
  EXPECT_NEAR(g.first(x), std::cos(1.1) - 0.7 * std::cos(0.28), 1e-14);
  EXPECT_NEAR(g.second(x), -2.0 * std::sin(1.1) + 0.49 * std::sin(0.28), 1e-14);
  EXPECT_THROW(Payoff::trigonometric({}), ConfigError);
}
