#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "volterra/errors.hpp"
#include "volterra/kernel.hpp"

using namespace volterra;

TEST(Kernel, RiemannLiouvilleValue) {
  const auto k = KernelSpec::riemann_liouville(0.3, 2.0);
  EXPECT_NEAR(k(1.0, 0.75), 2.0 * std::sqrt(0.6) * std::pow(0.25, -0.2), 1e-14);
  EXPECT_TRUE(k.singular());
  EXPECT_EQ(k.family(), KernelFamily::RiemannLiouvilleNormalized);
}

TEST(Kernel, ConstantIsBrownian) {
  const KernelSpec k;
  EXPECT_EQ(k(0.7, 0.1), 1.0);
  EXPECT_EQ(k.hurst(), 0.5);
  EXPECT_FALSE(k.singular());
}

TEST(Kernel, NormalizedVariance) {
  for (double h : {0.1, 0.3, 0.5, 0.7}) {
    const auto k = KernelSpec::riemann_liouville(h);
    EXPECT_NEAR(k.square_integral(1.0, 0.0, 1.0), 1.0, 1e-12) << h;
    EXPECT_NEAR(k.square_integral(0.5, 0.0, 0.5), std::pow(0.5, 2 * h), 1e-12) << h;
  }
}

TEST(Kernel, CumulativeVarianceClosedForm) {
  const auto k = KernelSpec::riemann_liouville(0.3);
  EXPECT_NEAR(cumulative_variance(k, 0.25, 1.0), std::pow(0.75, 0.6), 1e-12);
  EXPECT_NEAR(cumulative_variance(KernelSpec{}, 0.25, 1.0), 0.75, 1e-14);
}

TEST(Kernel, ProductIntegralMatchesOracle) {
  for (double h : {0.3, 0.7}) {
    const auto k = KernelSpec::riemann_liouville(h);
    EXPECT_NEAR(k.product_integral(0.5, 1.0), oracle::rl_product(h, 0.5, 1.0), 1e-6) << h;
    EXPECT_NEAR(k.product_integral(1.0, 1.0), 1.0, 1e-10) << h;
  }
  EXPECT_NEAR(KernelSpec{}.product_integral(0.3, 0.8), 0.3, 1e-14);
}

TEST(Kernel, DomainErrors) {
  const auto k = KernelSpec::riemann_liouville(0.3);
  EXPECT_THROW(k(0.5, 0.5), DomainError);
  EXPECT_THROW(k(0.5, 0.7), DomainError);
  EXPECT_THROW(k(0.5, 0.5 - 1e-14), DomainError);
  EXPECT_THROW(k(NAN, 0.1), DomainError);
  EXPECT_THROW(KernelSpec::riemann_liouville(1.2), ConfigError);
  EXPECT_THROW(KernelSpec::riemann_liouville(0.3, 0.0), ConfigError);
}

TEST(Kernel, TruncationFreezesNearDiagonal) {
  const auto k = KernelSpec::riemann_liouville(0.3);
  const auto kt = k.truncated(0.125);
  EXPECT_DOUBLE_EQ(kt(0.51, 0.5), k(0.625, 0.5));
  EXPECT_DOUBLE_EQ(kt(0.9, 0.5), k(0.9, 0.5));
  TruncationConfig cfg = TruncationConfig::dyadic(4, 10);
  ASSERT_EQ(cfg.dyadic_sequence.size(), 7u);
  EXPECT_DOUBLE_EQ(cfg.dyadic_sequence.back(), std::ldexp(1.0, -10));
  EXPECT_DOUBLE_EQ(eval_kernel_truncated(k, cfg, 0.51, 0.5), k(0.5625, 0.5));
}

TEST(Kernel, GapTableInterpolatesLogLog) {
  // A pure power law is reproduced exactly by log-log interpolation.
  std::vector<double> gaps, values;
  for (double g = 1e-4; g < 2.0; g *= 2.0) {
    gaps.push_back(g);
    values.push_back(std::pow(g, -0.2));
  }
  const auto k = KernelSpec::from_gap_table(0.3, gaps, values);
  EXPECT_NEAR(k(1.0, 0.7), std::pow(0.3, -0.2), 1e-12);
  EXPECT_NEAR(k(1.0, 1.0 - 1e-6), std::pow(1e-6, -0.2), 1e-9);
  EXPECT_TRUE(k.convolution());
}

TEST(Kernel, CellWeightsReproduceVariance) {
  const auto k = KernelSpec::riemann_liouville(0.3);
  const TimeGrid grid(1.0, 16);
  const CellWeights w(k, grid);
  // sum over cells of rms^2 dt is the exact variance of the column.
  for (std::size_t j : {1u, 5u, 16u}) {
    double s = 0.0;
    for (std::size_t r = 0; r < j; ++r) s += w.rms(j, r) * w.rms(j, r) * grid.dt();
    EXPECT_NEAR(s, std::pow(grid.time(j), 0.6), 1e-10) << j;
  }
  // mean weight times dt is the exact kernel integral over the cell.
  const double exact = std::sqrt(0.6) * (std::pow(1.0, 0.8) - std::pow(15.0 / 16.0, 0.8)) / 0.8;
  EXPECT_NEAR(w.mean(16, 0) * grid.dt(), exact, 1e-12);
  EXPECT_TRUE(CellWeights(KernelSpec{}, grid).flat());
}
