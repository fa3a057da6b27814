#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "volterra/errors.hpp"
#include "volterra/parallel.hpp"
#include "volterra/quadrature.hpp"
#include "volterra/rng.hpp"
#include "volterra/stats.hpp"

using namespace volterra;

TEST(Rng, PhiloxKnownAnswer) {
  // Published Philox4x32-10 test vector for zero key and counter.
  const Philox4x32 gen(0);
  const auto out = gen({0, 0, 0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  const NormalStream a(42), b(42), c(43);
  EXPECT_EQ(a.single(3, 7), b.single(3, 7));
  EXPECT_NE(a.single(3, 7), c.single(3, 7));
  EXPECT_NE(a.single(3, 7), a.single(3, 8));
  EXPECT_NE(a.single(3, 7), a.single(4, 7));
  EXPECT_NE(mix_seed(1, 2, 3), mix_seed(1, 3, 2));
}

TEST(Rng, NormalMoments) {
  const NormalStream s(7);
  std::vector<double> v(200000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s.single(i, 0);
  const auto m = estimate_mean(v);
  EXPECT_LT(std::abs(m.mean), 4.0 * m.std_error);
  std::vector<double> sq(v.size()), q4(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    sq[i] = v[i] * v[i];
    q4[i] = sq[i] * sq[i];
  }
  EXPECT_TRUE(estimate_mean(sq).within(1.0, 4.0));
  EXPECT_TRUE(estimate_mean(q4).within(3.0, 4.0));
}

TEST(Quadrature, GaussHermiteMoments) {
  const auto& r = gauss_hermite(64);
  double w = 0.0, m2 = 0.0, m4 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    w += r.weights[i];
    m2 += r.weights[i] * std::pow(r.nodes[i], 2);
    m4 += r.weights[i] * std::pow(r.nodes[i], 4);
  }
  EXPECT_NEAR(w, 1.0, 1e-13);
  EXPECT_NEAR(m2, 1.0, 1e-12);
  EXPECT_NEAR(m4, 3.0, 1e-11);
}

TEST(Quadrature, LegendreAndAdaptive) {
  EXPECT_NEAR(integrate_gl([](double x) { return std::exp(x); }, 0.0, 1.0), std::numbers::e - 1.0, 1e-14);
  EXPECT_NEAR(integrate_adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value, 2.0, 1e-10);
  const auto r = integrate_right_singular([](double x) { return std::pow(1.0 - x, -0.4); }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 1.0 / 0.6, 1e-8);
}

TEST(Quadrature, LeftPowerWeight) {
  // int_0^1 cos(s) s^-0.3 ds against a brute-force substitution s = w^(1/0.7).
  const double got = integrate_left_power([](double s) { return std::cos(s); }, 0.0, 1.0, -0.3);
  const double ref = oracle::simpson(
      [](double w) { return std::cos(std::pow(w, 1.0 / 0.7)) / 0.7; }, 0.0, 1.0, 20000);
  EXPECT_NEAR(got, ref, 1e-9);
}

TEST(Stats, FitLineExact) {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
  EXPECT_NEAR(quantile({1, 2, 3, 4, 5}, 0.5), 3.0, 1e-15);
}

TEST(Parallel, LowestChunkExceptionWins) {
  ThreadCountGuard g(4);
  try {
    parallel_for(100, [](std::size_t b, std::size_t) { throw ConfigError(std::to_string(b)); });
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_STREQ(e.what(), "0");
  }
}
