#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "volterra/diagnostics.hpp"
#include "volterra/errors.hpp"

using namespace volterra;

namespace {

/// E max_k sup_j |W_{k,j}|^8 over 2^level independent Brownian pieces with
/// variance dt per step: the law of the sup of W minus its dyadic freezing
/// on the grid. The freezing re-anchors at each piece's right end, so a piece
/// of L steps contributes its first L - 1 nodes after the anchor.
oracle::Mean brownian_freeze_moment(std::size_t grid_steps, int level, std::size_t samples, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(1.0 / static_cast<double>(grid_steps)));
  const std::size_t pieces = std::size_t{1} << level;
  const std::size_t steps = grid_steps / pieces;
  std::vector<double> values(samples);
  for (auto& v : values) {
    double worst = 0.0;
    for (std::size_t k = 0; k < pieces; ++k) {
      double w = 0.0;
      for (std::size_t j = 0; j + 1 < steps; ++j) {
        w += normal(gen);
        worst = std::max(worst, std::abs(w));
      }
    }
    v = std::pow(worst, 8);
  }
  return oracle::mean_se(values);
}

std::vector<std::pair<std::size_t, std::size_t>> gaps_from(std::size_t start, std::initializer_list<std::size_t> gaps) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t g : gaps) out.emplace_back(start, start + g);
  return out;
}

}  // namespace

TEST(Moments, DeterministicPathHasExactMoments) {
  CoefficientSpec c = CoefficientSpec::brownian(-1.5);
  c.diffusion = [](double, const PathView&, std::span<double> out) { out[0] = 0.0; };
  const auto table = moment_scan(c, {TimeGrid(1.0, 8), TimeGrid(1.0, 16)}, 10, 1);
  ASSERT_EQ(table.estimates.size(), 2u);
  for (std::size_t g = 0; g < 2; ++g) {
    EXPECT_DOUBLE_EQ(table.at(g, 0).mean, 2.25);
    EXPECT_DOUBLE_EQ(table.at(g, 1).mean, std::pow(1.5, 4));
    EXPECT_DOUBLE_EQ(table.at(g, 2).mean, std::pow(1.5, 8));
    EXPECT_EQ(table.at(g, 2).std_error, 0.0);
  }
  EXPECT_TRUE(table.stable);
  EXPECT_FALSE(table.diverged);
}

TEST(Moments, BrownianSupSatisfiesDoob) {
  // E W_T^2 <= E sup W^2 <= 4 E W_T^2.
  const auto table = moment_scan(CoefficientSpec::brownian(), {TimeGrid(1.0, 64), TimeGrid(1.0, 128)}, 20000, 2, {2});
  const double m = table.at(1, 0).mean;
  EXPECT_GT(m, 1.0);
  EXPECT_LT(m, 4.0);
  EXPECT_TRUE(table.stable);
}

TEST(Covariance, BrownianIsMinimum) {
  const auto rep = covariance_check(KernelSpec::constant(), TimeGrid(1.0, 100), 40000, 3);
  ASSERT_EQ(rep.entries.size(), 25u);
  for (const auto& e : rep.entries) EXPECT_NEAR(e.oracle, std::min(e.s, e.t), 1e-12);
  EXPECT_LT(rep.max_abs_t_stat, 4.5);
}

TEST(Covariance, RiemannLiouvilleMatchesProductOracle) {
  const double h = 0.3;
  const auto rep = covariance_check(KernelSpec::riemann_liouville(h), TimeGrid(1.0, 100), 40000, 4);
  for (const auto& e : rep.entries) {
    EXPECT_NEAR(e.oracle, oracle::rl_product(h, e.s, e.t), 1e-8) << e.s << " " << e.t;
    if (e.s == e.t) EXPECT_NEAR(e.oracle, std::pow(e.s, 2.0 * h), 1e-10);
  }
  EXPECT_LT(rep.max_abs_t_stat, 4.5);
}

TEST(TwoTimeScaling, BrownianSlopeIsTwo) {
  // The difference path is W_s - W_t on [t, t']: its sup to the fourth power scales as |t' - t|^2.
  const TimeGrid grid(1.0, 512);
  const auto res = two_time_scaling(CoefficientSpec::brownian(), grid, 4000, 5, gaps_from(100, {2, 4, 8, 16, 32, 64}));
  EXPECT_NEAR(res.fit.slope, 2.0, 0.15);
  EXPECT_EQ(res.moments.size(), 6u);
}

TEST(TwoTimeScaling, RoughKernelSlopeIsFourH) {
  const double h = 0.3;
  const auto coeff = CoefficientSpec::gaussian(KernelSpec::riemann_liouville(h));
  const TimeGrid fine(1.0, 1024);
  const auto res = two_time_scaling(coeff, fine, 2000, 6, gaps_from(200, {8, 16, 32, 64, 128, 256}));
  EXPECT_NEAR(res.fit.slope, 4.0 * h, 0.25);
}

TEST(TwoTimeScaling, DegenerateInputs) {
  const TimeGrid grid(1.0, 64);
  auto pairs = gaps_from(10, {2, 4, 8, 32});
  pairs.emplace_back(5, 5);
  const auto res = two_time_scaling(CoefficientSpec::brownian(), grid, 200, 7, pairs);
  EXPECT_EQ(res.moments.back().mean, 0.0);
  EXPECT_EQ(res.fit.abscissae.size(), 4u);
  EXPECT_THROW(two_time_scaling(CoefficientSpec::brownian(), grid, 200, 7, gaps_from(10, {2, 3, 4, 5})), ConfigError);
}

TEST(FreezeRate, BrownianSlopeIsMinusFour) {
  const TimeGrid grid(1.0, 1024);
  const auto res = freeze_rate(CoefficientSpec::brownian(), grid, 2000, 8, {3, 4, 5, 6, 7});
  // The maximum over 2^n pieces adds a logarithmic factor, so the fitted
  // slope sits above the asymptotic -4 at these levels.
  EXPECT_GT(res.fit.slope, -4.0);
  EXPECT_LT(res.fit.slope, -3.0);
  for (std::size_t k = 0; k < res.moments.size(); ++k) {
    const int level = static_cast<int>(res.fit.abscissae[k]);
    const auto ref = brownian_freeze_moment(1024, level, 4000, 100 + level);
    const auto& m = res.moments[k];
    EXPECT_NEAR(m.mean, ref.mean, 4.0 * std::hypot(m.std_error, ref.se)) << level;
  }
  EXPECT_THROW(freeze_rate(CoefficientSpec::brownian(), grid, 10, 8, {3, 4, 5}), ConfigError);
  EXPECT_THROW(freeze_rate(CoefficientSpec::brownian(), TimeGrid(1.0, 100), 10, 8, {3, 4, 5, 6}), ConfigError);
}

TEST(FreezeRate, RoughKernelSlopeIsMinusEightH) {
  const double h = 0.3;
  const auto coeff = CoefficientSpec::gaussian(KernelSpec::riemann_liouville(h));
  const auto res = freeze_rate(coeff, TimeGrid(1.0, 1024), 1000, 9, {3, 4, 5, 6, 7});
  EXPECT_GT(res.fit.slope, -8.0 * h);
  EXPECT_LT(res.fit.slope, -8.0 * h + 0.8);
}
