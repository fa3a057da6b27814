#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "volterra/bsde.hpp"
#include "volterra/forward_variance.hpp"
#include "volterra/gauss.hpp"
#include "volterra/parallel.hpp"
#include "volterra/roughvol.hpp"
#include "volterra/simulate.hpp"

using namespace volterra;

namespace {

void BM_SimulateRiemannLiouville(benchmark::State& state) {
  const ThreadCountGuard single(1);  // comparable across machines
  const TimeGrid grid(1.0, static_cast<std::size_t>(state.range(0)));
  const auto coeff = CoefficientSpec::gaussian(KernelSpec::riemann_liouville(0.3));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ensemble(coeff, grid, 100, 1));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_SimulateRiemannLiouville)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_ThetaToHat(benchmark::State& state) {
  const RelaxationParams p{0.1, 0.3, 0.04};
  const auto nodes = graded_nodes(0.0, 1.0, static_cast<std::size_t>(state.range(0)), 2.0 / p.alpha());
  std::vector<double> theta(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) theta[k] = 0.04 + 0.02 * std::sin(5.0 * nodes[k]);
  for (auto _ : state) benchmark::DoNotOptimize(theta_to_hat(nodes, theta, p));
}
BENCHMARK(BM_ThetaToHat)->Arg(200)->Arg(800)->Arg(3200)->Unit(benchmark::kMicrosecond);

void BM_EvalConditionalValue(benchmark::State& state) {
  LinearProblem lp;
  lp.terminal = Payoff::call(0.0);
  lp.running = RunningCost::square();
  lp.kernel = KernelSpec::riemann_liouville(0.3);
  const GaussFunctional fnl(lp);
  const TimeGrid grid(1.0, 256);
  const auto coeff = CoefficientSpec::gaussian(lp.kernel);
  const auto ens = simulate_ensemble(coeff, grid, 1, 2);
  const auto path = concat(theta_field(ens, coeff, 0), 128).to_path();
  for (auto _ : state) benchmark::DoNotOptimize(eval_u(fnl, 0.5, path));
}
BENCHMARK(BM_EvalConditionalValue)->Unit(benchmark::kMicrosecond);

void BM_LsmcDiscount(benchmark::State& state) {
  const ThreadCountGuard single(1);  // comparable across machines
  const TimeGrid grid(1.0, 32);
  auto coeff = CoefficientSpec::brownian(100.0);
  coeff.diffusion = [](double, const PathView& p, std::span<double> out) { out[0] = 0.2 * p.current()[0]; };
  BSDEProblem problem;
  problem.coeff = coeff;
  problem.terminal = [](const PathView& p) { return std::max(p.current()[0] - 100.0, 0.0); };
  problem.driver = [](double, const PathView&, double y, std::span<const double>) { return -0.05 * y; };
  problem.lipschitz_bound = 0.05;
  const auto ens = simulate_ensemble(coeff, grid, static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lsmc(problem, ens));
}
BENCHMARK(BM_LsmcDiscount)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_RoughHestonNestedPrice(benchmark::State& state) {
  const ThreadCountGuard single(1);  // comparable across machines
  RoughHestonParams p;
  const auto model = VolatilityModel::heston(p, TimeGrid(0.5, 100));
  const auto ens = model.simulate(1, 4);
  const auto row = model.theta_row(ens, 0, 50);
  Claim claim;
  claim.terminal = Payoff::call(100.0);
  PricingConfig cfg;
  cfg.n_paths = 500;
  cfg.method = state.range(0) ? PricingMethod::Conditional : PricingMethod::FullMonteCarlo;
  for (auto _ : state) benchmark::DoNotOptimize(price_claim(model, claim, 50, ens.state(0, 50, 0), row, cfg));
}
BENCHMARK(BM_RoughHestonNestedPrice)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
