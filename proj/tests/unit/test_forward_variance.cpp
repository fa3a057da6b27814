#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "volterra/errors.hpp"
#include "volterra/forward_variance.hpp"

using namespace volterra;

namespace {

RelaxationParams params(double h = 0.1, double rate = 0.3, double level = 0.04) {
  RelaxationParams p;
  p.hurst = h;
  p.rate = rate;
  p.level = level;
  return p;
}

/// hat for a constant theta: level + (theta - level) E_alpha(-lambda (s - t)^alpha).
double constant_theta_hat(const RelaxationParams& p, double theta, double gap) {
  return p.level + (theta - p.level) * oracle::mittag_leffler(p.alpha(), -p.rate * std::pow(gap, p.alpha()));
}

}  // namespace

TEST(ProductWeights, IntegrateLinearFunctionsExactly) {
  const std::vector<double> nodes{0.0, 0.1, 0.35, 0.5, 1.0};
  const double beta = 0.6;
  const ProductWeights w(nodes, beta);
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const double sk = nodes[k];
    // phi(r) = r: int_0^sk (sk - r)^(beta-1) r dr = sk^(beta+1) / (beta (beta + 1)).
    double sum = 0.0;
    const auto row = w.row(k);
    for (std::size_t m = 0; m <= k; ++m) sum += row[m] * nodes[m];
    EXPECT_NEAR(sum, std::pow(sk, beta + 1.0) / (beta * (beta + 1.0)), 1e-13);
    EXPECT_NEAR(w.total(k), std::pow(sk, beta) / beta, 1e-13);
  }
}

TEST(ForwardVariance, RoundTripIsExact) {
  const auto p = params();
  const auto nodes = graded_nodes(0.2, 1.0, 199, 2.0 / p.alpha());
  std::vector<double> theta(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) theta[k] = 0.04 + 0.02 * std::sin(5.0 * nodes[k]);
  const auto hat = theta_to_hat(nodes, theta, p);
  const auto back = hat_to_theta(nodes, hat, p);
  for (std::size_t k = 0; k < nodes.size(); ++k) EXPECT_NEAR(back[k], theta[k], 1e-8);
  EXPECT_EQ(hat[0], theta[0]);
}

TEST(ForwardVariance, ConstantThetaIsMittagLeffler) {
  for (double h : {0.1, 0.3}) {
    const auto p = params(h, 1.5, 0.04);
    const double t = 0.25, theta = 0.09;
    const auto nodes = graded_nodes(t, 1.25, 400, 2.0 / p.alpha());
    const std::vector<double> flat(nodes.size(), theta);
    const auto hat = theta_to_hat(nodes, flat, p);
    for (std::size_t k = 0; k < nodes.size(); k += 40) {
      const double ref = constant_theta_hat(p, theta, nodes[k] - t);
      EXPECT_NEAR(hat[k], ref, 1e-5 * theta) << h << " " << k;
      const auto series = theta_to_hat_series(nodes, flat, p, k);
      EXPECT_TRUE(series.converged);
      EXPECT_NEAR(series.value, ref, 1e-12) << h << " " << k;
    }
  }
}

TEST(ForwardVariance, ZeroRateIsIdentity) {
  const auto p = params(0.1, 0.0, 0.04);
  const auto nodes = graded_nodes(0.0, 1.0, 20, 1.0);
  std::vector<double> theta(nodes.size(), 0.05);
  theta[3] = 0.07;
  EXPECT_EQ(theta_to_hat(nodes, theta, p), theta);
}

TEST(ForwardVariance, CheckedTransformAgreesWithSeries) {
  const auto p = params(0.1, 0.3, 0.04);
  const auto nodes = graded_nodes(0.0, 1.0, 400, 2.0 / p.alpha());
  std::vector<double> theta(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) theta[k] = 0.04 + 0.01 * nodes[k];
  const std::vector<std::size_t> idx{50, 200, 400};
  const auto hat = theta_to_hat_checked(nodes, theta, p, idx);
  for (std::size_t k : idx) {
    const auto s = theta_to_hat_series(nodes, theta, p, k);
    EXPECT_NEAR(hat[k], s.value, 1e-6 * std::abs(s.value));
  }
  // Too coarse a grid cannot meet a tight tolerance.
  const auto coarse = graded_nodes(0.0, 1.0, 4, 1.0);
  std::vector<double> ct(coarse.size());
  for (std::size_t k = 0; k < coarse.size(); ++k) ct[k] = 0.04 + 0.01 * coarse[k];
  const std::vector<std::size_t> last{4};
  EXPECT_THROW(theta_to_hat_checked(coarse, ct, params(0.1, 3.0, 0.2), last, 1e-9), TransformError);
}

TEST(ForwardVariance, InvalidInputsThrow) {
  EXPECT_THROW(params(1.2).validate(), ConfigError);
  EXPECT_THROW(params(0.1, -1.0).validate(), ConfigError);
  const std::vector<double> bad_nodes{0.0, 0.5, 0.4};
  const std::vector<double> theta(3, 0.04);
  EXPECT_THROW(theta_to_hat(bad_nodes, theta, params()), ConfigError);
}
