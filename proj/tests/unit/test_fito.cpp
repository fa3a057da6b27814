#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "oracles.hpp"
#include "volterra/errors.hpp"
#include "volterra/fito.hpp"
#include "volterra/gauss.hpp"

using namespace volterra;

namespace {

std::vector<double> dyadic(int lo, int hi) {
  std::vector<double> d;
  for (int n = lo; n <= hi; ++n) d.push_back(std::ldexp(1.0, -n));
  return d;
}

/// u(t, omega) = omega(T)^2 with closed derivatives.
Functional terminal_square(double horizon) {
  Functional u;
  u.eval = [horizon](double, const Path& w) { return w(horizon) * w(horizon); };
  u.closed_derivatives = [horizon](double, const Path& w) {
    DerivativeBundle b;
    const double x = w(horizon);
    b.first = [x, horizon](const Direction& e) { return 2.0 * x * e(horizon); };
    b.second = [horizon](const Direction& a, const Direction& c) { return 2.0 * a(horizon) * c(horizon); };
    return b;
  };
  return u;
}

}  // namespace

TEST(FitPairing, RecoversPowerLawAndLimit) {
  const auto d = dyadic(4, 10);
  std::vector<double> v;
  for (double x : d) v.push_back(1.5 + 0.7 * std::pow(x, 0.8));
  const auto fit = fit_pairing_sequence(d, v, PairingKind::Diffusion);
  EXPECT_NEAR(fit.observed_rate, 0.8, 1e-10);
  EXPECT_NEAR(fit.extrapolated, 1.5, 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  const auto second = fit_pairing_sequence(d, v, PairingKind::Second);
  EXPECT_NEAR(second.observed_rate, 0.4, 1e-10);
  EXPECT_NEAR(second.fitted_exponent, 0.8, 1e-10);
}

TEST(FitPairing, ConstantTailIsExact) {
  const auto d = dyadic(4, 10);
  std::vector<double> v(d.size(), 2.0);
  v[0] = 2.5;
  const auto fit = fit_pairing_sequence(d, v, PairingKind::Drift);
  EXPECT_TRUE(fit.exact);
  EXPECT_EQ(fit.extrapolated, 2.0);
}

TEST(FitPairing, DivergentOrNoisySequencesAreRejected) {
  const auto d = dyadic(4, 10);
  std::vector<double> grow, noisy;
  for (std::size_t i = 0; i < d.size(); ++i) {
    grow.push_back(std::pow(d[i], -0.3));
    noisy.push_back(1.0 + ((i * 7919) % 5) * 1e-3);
  }
  EXPECT_THROW(fit_pairing_sequence(d, grow, PairingKind::Diffusion), NonConvergenceError);
  EXPECT_THROW(fit_pairing_sequence(d, noisy, PairingKind::Diffusion), NonConvergenceError);
  try {
    fit_pairing_sequence(d, grow, PairingKind::Diffusion);
  } catch (const NonConvergenceError& e) {
    EXPECT_EQ(e.values().size(), d.size());
  }
}

TEST(FiniteDifferences, DirectionalDerivativesOfSquare) {
  const Functional u = terminal_square(1.0);
  const Path w = Path::constant(1.0, 0.4);
  FDConfig fd;
  EXPECT_NEAR(directional_derivative(u, 0.5, w, Direction::constant(1.0), fd), 0.8, 1e-8);
  EXPECT_NEAR(second_directional(u, 0.5, w, Direction::constant(1.0), Direction::constant(1.0), fd), 2.0, 1e-5);
  fd.epsilon = 1.0;
  EXPECT_THROW(fd.validate(), ConfigError);
  EXPECT_THROW(right_time_derivative(u, 0.5, w, FDConfig{}), ConfigError);
}

TEST(FiniteDifferences, SingularDirectionIsRejected) {
  const Functional u = terminal_square(1.0);
  const Path w = Path::constant(1.0, 0.4);
  EXPECT_THROW(directional_derivative(u, 0.5, w, Direction::power(0.5, -0.2), FDConfig{}), DerivativeError);
}

TEST(ItoCertify, ClassicalItoForBrownianSquare) {
  // W_T^2 - sum (2 W dW + dt) = sum (dW^2 - dt): mean zero, rms sqrt(2 T^2 / N).
  const auto coeff = CoefficientSpec::brownian();
  const auto ens = simulate_ensemble(coeff, TimeGrid(1.0, 64), 4000, 5);
  ItoOptions opts;
  opts.use_closed = true;
  opts.coarsen_factors = {1, 2, 4, 8};
  const auto rep = ito_certify(terminal_square(1.0), coeff, ens, opts);
  ASSERT_EQ(rep.levels.size(), 4u);
  for (const auto& lv : rep.levels) {
    EXPECT_NEAR(lv.rms, std::sqrt(2.0 / lv.n_steps), 0.1 * std::sqrt(2.0 / lv.n_steps)) << lv.n_steps;
    EXPECT_LT(std::abs(lv.mismatch.t_stat()), 4.0);
  }
  ASSERT_TRUE(rep.order.has_value());
  EXPECT_NEAR(rep.order->slope, 0.5, 0.1);
}

TEST(ItoCertify, FiniteDifferencesMatchClosedForm) {
  const auto coeff = CoefficientSpec::brownian();
  const auto ens = simulate_ensemble(coeff, TimeGrid(1.0, 16), 50, 6);
  ItoOptions closed, fd;
  closed.use_closed = true;
  const auto a = ito_certify(terminal_square(1.0), coeff, ens, closed);
  const auto b = ito_certify(terminal_square(1.0), coeff, ens, fd);
  EXPECT_NEAR(a.levels[0].rms, b.levels[0].rms, 1e-4);
}

TEST(ItoCertify, GaussFunctionalRegularKernel) {
  LinearProblem p;
  p.terminal = Payoff::call(0.0);
  p.kernel = KernelSpec::riemann_liouville(0.7);
  auto fnl = std::make_shared<const GaussFunctional>(p);
  const auto coeff = CoefficientSpec::gaussian(p.kernel);
  const auto ens = simulate_ensemble(coeff, TimeGrid(1.0, 64), 400, 8);
  ItoOptions opts;
  opts.use_closed = true;
  opts.coarsen_factors = {1, 2, 4};
  const auto rep = ito_certify(make_functional(fnl), coeff, ens, opts);
  ASSERT_TRUE(rep.order.has_value());
  EXPECT_GE(rep.order->slope, 0.5);
  EXPECT_LT(rep.levels[0].rms, rep.levels[2].rms);
}

TEST(SingularPairing, RunningCostGivesRateHPlusHalf) {
  // With f(x) = x^2 the diffusion pairing is E[g'] K_delta(T, t) plus
  // int E[f_x] K_delta(s, t) ds; the truncation changes the integral by
  // order delta^(H + 1/2) and leaves the terminal term alone.
  for (double h : {0.2, 0.3, 0.4}) {
    LinearProblem p;
    p.terminal = Payoff::call(0.0);
    p.running = RunningCost::square();
    p.kernel = KernelSpec::riemann_liouville(h);
    auto fnl = std::make_shared<const GaussFunctional>(p);
    const auto coeff = CoefficientSpec::gaussian(p.kernel);
    const Path w = Path::constant(1.0, 0.3);
    const auto sp = singular_pairing(make_functional(fnl), 0.25, w, coeff, PairingKind::Diffusion);
    EXPECT_NEAR(sp.observed_rate, h + 0.5, 0.05) << h;
    EXPECT_GE(sp.r_squared, 0.9);
  }
}

TEST(SingularPairing, TerminalOnlyFunctionalConvergesExactly) {
  LinearProblem p;
  p.terminal = Payoff::call(0.0);
  p.kernel = KernelSpec::riemann_liouville(0.3);
  auto fnl = std::make_shared<const GaussFunctional>(p);
  const auto coeff = CoefficientSpec::gaussian(p.kernel);
  const auto sp =
      singular_pairing(make_functional(fnl), 0.25, Path::constant(1.0, 0.1), coeff, PairingKind::Diffusion);
  EXPECT_TRUE(sp.exact);
  const double k = std::sqrt(0.6) * std::pow(0.75, -0.2);
  EXPECT_NEAR(sp.extrapolated, k * oracle::cdf(0.1 / std::pow(0.75, 0.3)), 1e-10);
}
