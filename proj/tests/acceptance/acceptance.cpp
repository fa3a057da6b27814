// Acceptance suite: one pass/fail line per criterion.
//
//   acceptance          runs every criterion
//   acceptance N [M..]  runs the listed criteria
//
// The exit status is zero when every criterion that ran passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "volterra/bsde.hpp"
#include "volterra/diagnostics.hpp"
#include "volterra/fito.hpp"
#include "volterra/forward_variance.hpp"
#include "volterra/gauss.hpp"
#include "volterra/gauss_checks.hpp"
#include "volterra/hedging.hpp"
#include "volterra/roughvol.hpp"
#include "volterra/simulate.hpp"
#include "volterra_cli/app.hpp"
#include "volterra_cli/catalog.hpp"

namespace fs = std::filesystem;
using namespace volterra;

namespace {

/// Accumulates the sub-checks of one criterion.
class Verdict {
 public:
  void check(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    if (!detail_.empty()) detail_ += "; ";
    detail_ += (ok ? "" : "FAILED ") + what;
  }
  void note(const std::string& what) {
    if (!detail_.empty()) detail_ += "; ";
    detail_ += what;
  }
  bool ok() const noexcept { return ok_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  bool ok_ = true;
  std::string detail_;
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

LinearProblem linear_problem(double hurst, Payoff g, RunningCost f = RunningCost::zero(), double horizon = 1.0) {
  LinearProblem lp;
  lp.terminal = std::move(g);
  lp.running = std::move(f);
  lp.kernel = hurst == 0.5 ? KernelSpec::constant() : KernelSpec::riemann_liouville(hurst);
  lp.horizon = horizon;
  return lp;
}

CoefficientSpec gaussian_coeff(double hurst) {
  return hurst == 0.5 ? CoefficientSpec::brownian() : CoefficientSpec::gaussian(KernelSpec::riemann_liouville(hurst));
}

// ---------------------------------------------------------------------------

Verdict conditional_expectation() {
  Verdict v;
  const TimeGrid grid(1.0, 256);
  double worst = 0.0, worst_closed = 0.0;
  for (double h : {0.3, 0.5, 0.7}) {
    for (bool square : {false, true}) {
      const GaussFunctional fnl(
          linear_problem(h, Payoff::call(0.0), square ? RunningCost::square() : RunningCost::zero()));
      TowerOptions opts;
      opts.outer_paths = 1;
      opts.inner_paths = 100000;
      opts.seed = mix_seed(101, static_cast<std::uint64_t>(h * 10), square);
      const auto rep = tower_check(fnl, grid, opts);
      worst = std::max(worst, rep.max_abs_t_stat);
      v.check(rep.points.size() == 3 && rep.max_abs_t_stat < 3.0,
              "H=" + fmt(h) + (square ? " f=x^2" : " f=0") + " max|t|=" + fmt(rep.max_abs_t_stat, 3));

      // With f = 0 the value is a Bachelier price at Theta^t_T with variance (T - t)^(2H).
      if (!square) {
        const auto ens = simulate_ensemble(gaussian_coeff(h), grid, 1, opts.seed);
        const auto field = theta_field(ens, gaussian_coeff(h), 0);
        for (std::size_t i : {64u, 128u, 192u}) {
          const auto path = concat(field, i).to_path();
          const double t = grid.time(i);
          const double closed = oracle::bachelier_call(path.terminal(), 0.0, std::pow(1.0 - t, h));
          worst_closed = std::max(worst_closed, std::abs(eval_u(fnl, t, path) - closed));
        }
      }
    }
  }
  v.check(worst_closed < 1e-8, "f=0 Bachelier closed form max error " + fmt(worst_closed, 3));
  return v;
}

Verdict martingale_dichotomy() {
  Verdict v;
  const TimeGrid grid(1.0, 256);
  const GaussFunctional fnl(linear_problem(0.3, Payoff::call(0.0)));
  const auto rep = martingale_drift(fnl, grid, 100000, 202, grid.n_steps() / 2, grid.n_steps());
  v.check(std::abs(rep.functional.t_stat()) < 3.0, "path functional |t|=" + fmt(std::abs(rep.functional.t_stat()), 3));
  v.check(std::abs(rep.markovian.t_stat()) > 3.0, "Markovian comparator |t|=" + fmt(std::abs(rep.markovian.t_stat()), 3));
  return v;
}

/// u(t, omega) = omega(T)^2.
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

Verdict ito_certification() {
  Verdict v;
  const TimeGrid grid(1.0, 512);
  ItoOptions opts;
  opts.use_closed = true;
  opts.coarsen_factors = {1, 2, 4, 8};

  const double h = 0.7;
  const auto coeff = gaussian_coeff(h);
  const auto fnl = std::make_shared<const GaussFunctional>(linear_problem(h, Payoff::call(0.0)));
  const auto gauss = ito_certify(make_functional(fnl), coeff, simulate_ensemble(coeff, grid, 200, 303), opts);
  v.check(gauss.order && gauss.order->slope >= 0.5, "gauss functional H=0.7 order " +
                                                        fmt(gauss.order ? gauss.order->slope : std::nan("")));

  const auto bm = CoefficientSpec::brownian();
  const auto classical = ito_certify(terminal_square(1.0), bm, simulate_ensemble(bm, grid, 2000, 20240601), opts);
  v.check(classical.order && classical.order->slope >= 0.5,
          "Brownian W_T^2 order " + fmt(classical.order ? classical.order->slope : std::nan("")));
  // Classical Ito for W^2 leaves sum (dW^2 - dt), whose RMS is sqrt(2 T^2 / N).
  double worst = 0.0;
  for (const auto& lv : classical.levels) {
    const double expected = std::sqrt(2.0 / static_cast<double>(lv.n_steps));
    worst = std::max(worst, std::abs(lv.rms / expected - 1.0));
  }
  v.check(worst < 0.1, "Brownian RMS vs sqrt(2T^2/N) max relative error " + fmt(worst, 3));
  return v;
}

Verdict singular_rate() {
  Verdict v;
  for (double h : {0.2, 0.3, 0.4}) {
    const auto fnl =
        std::make_shared<const GaussFunctional>(linear_problem(h, Payoff::call(0.0), RunningCost::square()));
    PairingOptions opts;
    opts.n_min = 4;
    opts.n_max = 10;
    try {
      const auto sp = singular_pairing(make_functional(fnl), 0.25, Path::constant(1.0, 0.3), gaussian_coeff(h),
                                       PairingKind::Diffusion, opts);
      v.check(std::abs(sp.observed_rate - h) <= 0.1 && sp.r_squared >= 0.9,
              "H=" + fmt(h) + " rate " + fmt(sp.observed_rate, 3) + " r2 " + fmt(sp.r_squared, 4));
    } catch (const std::exception& e) {
      v.check(false, "H=" + fmt(h) + " " + e.what());
    }
  }
  return v;
}

Verdict ppde_residuals() {
  Verdict v;
  const double h = 0.3;
  const TimeGrid grid(1.0, 256);
  std::mt19937_64 gen(505);
  std::uniform_real_distribution<double> amp(0.3, 1.0), freq(0.5, 3.0), phase(-3.0, 3.0), when(0.1, 0.9);
  std::vector<TrigTerm> terms(3);
  for (auto& t : terms) t = {amp(gen), freq(gen), phase(gen)};
  const GaussFunctional fnl(linear_problem(h, Payoff::trigonometric(terms)));
  const auto coeff = gaussian_coeff(h);
  const std::size_t samples = 20;
  const auto ens = simulate_ensemble(coeff, grid, samples, 506);

  double closed = 0.0, fd = 0.0;
  ResidualOptions closed_opts, fd_opts;
  fd_opts.mode = DerivativeMode::FiniteDifference;
  for (std::size_t k = 0; k < samples; ++k) {
    const std::size_t i = std::clamp<std::size_t>(grid.nearest_index(when(gen)), 1, grid.n_steps() - 1);
    const auto omega = concat(theta_field(ens, coeff, k), i).to_path();
    closed = std::max(closed, std::abs(ppde_residual(fnl, grid.time(i), omega, closed_opts)));
    fd = std::max(fd, std::abs(ppde_residual(fnl, grid.time(i), omega, fd_opts)));
  }
  v.check(closed < 1e-4, "closed-form max|residual| " + fmt(closed, 3));
  v.check(fd < 1e-2, "finite-difference max|residual| " + fmt(fd, 3));
  return v;
}

std::vector<std::pair<std::size_t, std::size_t>> gaps_from(std::size_t start, std::initializer_list<std::size_t> gaps) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t g : gaps) out.emplace_back(start, start + g);
  return out;
}

Verdict scalings() {
  Verdict v;
  const TimeGrid grid(1.0, 1024);
  const auto pairs = gaps_from(200, {8, 16, 32, 64, 128, 256});
  const std::vector<int> levels{3, 4, 5, 6, 7};

  const auto bm = CoefficientSpec::brownian();
  const auto two_bm = two_time_scaling(bm, grid, 4000, 606, pairs);
  v.check(two_bm.fit.slope >= 0.8 && two_bm.fit.r_squared >= 0.9,
          "two-time Brownian slope " + fmt(two_bm.fit.slope, 3) + " r2 " + fmt(two_bm.fit.r_squared, 3));
  const auto rough = gaussian_coeff(0.3);
  const auto two_rough = two_time_scaling(rough, grid, 2000, 607, pairs);
  v.check(two_rough.fit.slope >= 0.8 && two_rough.fit.r_squared >= 0.9,
          "two-time H=0.3 slope " + fmt(two_rough.fit.slope, 3) + " r2 " + fmt(two_rough.fit.r_squared, 3));

  const auto freeze_bm = freeze_rate(bm, grid, 2000, 608, levels);
  v.check(freeze_bm.fit.slope <= -0.8 && freeze_bm.fit.r_squared >= 0.9,
          "freeze Brownian slope " + fmt(freeze_bm.fit.slope, 3) + " r2 " + fmt(freeze_bm.fit.r_squared, 3));
  const auto freeze_rough = freeze_rate(rough, grid, 1000, 609, levels);
  v.note("freeze H=0.3 slope " + fmt(freeze_rough.fit.slope, 3) + " r2 " + fmt(freeze_rough.fit.r_squared, 3) +
         " (reported)");
  return v;
}

Verdict bsde() {
  Verdict v;
  // Zero driver: Y_0 is the conditional-expectation value at t = 0, a Bachelier price.
  const TimeGrid coarse(1.0, 32);
  for (double h : {0.3, 0.5, 0.7}) {
    const auto coeff = gaussian_coeff(h);
    BSDEProblem problem;
    problem.coeff = coeff;
    problem.terminal = [](const PathView& p) { return std::max(p.current()[0], 0.0); };
    const auto sol = solve_lsmc(problem, simulate_ensemble(coeff, coarse, 20000, mix_seed(707, h * 10)));
    const double ref = oracle::bachelier_call(0.0, 0.0, 1.0);
    v.check(sol.y0.within(ref, 3.0), "f=0 H=" + fmt(h) + " t=" + fmt(sol.y0.t_stat(ref), 3));
  }

  // f = -r y on a lognormal stock: discounted Black-Scholes.
  {
    const double r = 0.05, sigma = 0.2, s0 = 100.0, strike = 100.0;
    auto coeff = CoefficientSpec::brownian(s0);
    coeff.diffusion = [sigma](double, const PathView& p, std::span<double> out) { out[0] = sigma * p.current()[0]; };
    BSDEProblem problem;
    problem.coeff = coeff;
    problem.terminal = [strike](const PathView& p) { return std::max(p.current()[0] - strike, 0.0); };
    problem.driver = [r](double, const PathView&, double y, std::span<const double>) { return -r * y; };
    problem.lipschitz_bound = r;
    const auto sol = solve_lsmc(problem, simulate_ensemble(coeff, coarse, 200000, 708));
    const double ref = std::exp(-r) * oracle::bs_call(s0, strike, sigma * sigma);
    const double rel = std::abs(sol.y0.mean - ref) / ref;
    v.check(rel < 0.01, "discount driver relative error " + fmt(rel, 3));
  }

  // Feynman-Kac: the claimed functional is accepted and a rescaled kernel is rejected.
  {
    const double h = 0.7;
    const auto coeff = gaussian_coeff(h);
    BSDEProblem problem;
    problem.coeff = coeff;
    problem.terminal = [](const PathView& p) { return std::max(p.current()[0], 0.0); };
    const auto ens = simulate_ensemble(coeff, coarse, 1500, 709);
    FeynmanKacOptions opts;
    opts.ito.use_closed = true;
    auto lp = linear_problem(h, Payoff::call(0.0));
    const auto good = feynman_kac_check(problem, make_functional(std::make_shared<const GaussFunctional>(lp)), ens, opts);
    lp.kernel = KernelSpec::riemann_liouville(h, 1.3);
    const auto bad = feynman_kac_check(problem, make_functional(std::make_shared<const GaussFunctional>(lp)), ens, opts);
    v.check(std::abs(good.residual.t_stat()) < 3.0, "claimed |t|=" + fmt(std::abs(good.residual.t_stat()), 3));
    v.check(std::abs(bad.residual.t_stat()) > 3.0, "perturbed |t|=" + fmt(std::abs(bad.residual.t_stat()), 3));
  }
  return v;
}

Verdict forward_variance() {
  Verdict v;
  {
    RelaxationParams p{0.1, 0.3, 0.04};
    const auto nodes = graded_nodes(0.0, 1.0, 199, 2.0 / p.alpha());
    std::vector<double> theta(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) theta[k] = 0.04 + 0.02 * std::sin(5.0 * nodes[k]);
    const auto back = hat_to_theta(nodes, theta_to_hat(nodes, theta, p), p);
    double worst = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) worst = std::max(worst, std::abs(back[k] - theta[k]));
    v.check(nodes.size() == 200 && worst < 1e-8, "round trip on 200 nodes max error " + fmt(worst, 3));
  }
  // Constant Theta has hat = level + (theta - level) E_alpha(-lambda (s - t)^alpha).
  constexpr std::size_t kNodes = 3200;
  double worst_ml = 0.0, worst_series = 0.0;
  for (double h : {0.1, 0.3}) {
    for (double rate : {0.5, 1.0, 2.0}) {
      const RelaxationParams p{h, rate, 0.04};
      const auto nodes = graded_nodes(0.0, 1.0, kNodes, 2.0 / p.alpha());
      const std::vector<double> flat(nodes.size(), 0.09);
      const auto hat = theta_to_hat(nodes, flat, p);
      for (std::size_t k = 0; k < nodes.size(); k += 16) {
        const double ref = 0.04 + 0.05 * oracle::mittag_leffler(p.alpha(), -rate * std::pow(nodes[k], p.alpha()));
        worst_ml = std::max(worst_ml, std::abs(hat[k] - ref) / ref);
      }
      std::vector<double> theta(nodes.size());
      for (std::size_t k = 0; k < nodes.size(); ++k) theta[k] = 0.05 + 0.03 * std::cos(3.0 * nodes[k]);
      const auto curved = theta_to_hat(nodes, theta, p);
      for (std::size_t k = kNodes / 8; k <= kNodes; k += kNodes / 8) {
        const auto s = theta_to_hat_series(nodes, theta, p, k);
        worst_series = std::max(worst_series, std::abs(curved[k] - s.value) / std::abs(s.value));
      }
    }
  }
  v.check(worst_ml < 1e-6, "constant Theta vs Mittag-Leffler max relative error " + fmt(worst_ml, 3));
  v.check(worst_series < 1e-6, "series vs grid solver max relative error " + fmt(worst_series, 3));
  return v;
}

Claim call_claim(double strike) {
  Claim c;
  c.terminal = Payoff::call(strike);
  return c;
}

Verdict heston_pricing() {
  Verdict v;
  const TimeGrid grid(1.0, 256);
  {
    RoughHestonParams p;
    p.v0 = 0.06;
    p.hurst = 0.2;
    p.mean_rev_rate = 1.5;
    p.mean_rev_level = 0.03;
    p.vol_of_vol = 0.0;
    p.correlation = 0.0;
    const auto model = VolatilityModel::heston(p, grid);
    const auto row = model.theta_row(model.simulate(1, 901), 0, 0);
    PricingConfig cfg;
    cfg.n_paths = 100000;
    cfg.seed = 902;
    cfg.method = PricingMethod::FullMonteCarlo;
    const auto est = price_claim(model, call_claim(100.0), 0, p.s0, row, cfg);
    // Deterministic variance V_t = level + (v0 - level) E_alpha(-lambda t^alpha).
    const double alpha = p.hurst + 0.5;
    const double iv = oracle::simpson(
        [&](double t) {
          return p.mean_rev_level +
                 (p.v0 - p.mean_rev_level) * oracle::mittag_leffler(alpha, -p.mean_rev_rate * std::pow(t, alpha));
        },
        0.0, 1.0, 4000);
    const double ref = oracle::bs_call(p.s0, 100.0, iv);
    v.check(std::abs(est.price - ref) <= 3.0 * est.std_error,
            "nu=0 MC " + fmt(est.price, 6) + " vs BS " + fmt(ref, 6) + " (SE " + fmt(est.std_error, 3) + ")");
  }
  {
    RoughHestonParams p;
    p.correlation = 0.0;
    const auto model = VolatilityModel::heston(p, grid);
    const auto row = model.theta_row(model.simulate(1, 903), 0, 0);
    PricingConfig full;
    full.n_paths = 100000;
    full.seed = 904;
    full.method = PricingMethod::FullMonteCarlo;
    PricingConfig mixing = full;
    mixing.seed = 905;
    mixing.method = PricingMethod::Conditional;
    const auto a = price_claim(model, call_claim(100.0), 0, p.s0, row, full);
    const auto b = price_claim(model, call_claim(100.0), 0, p.s0, row, mixing);
    const double se = std::hypot(a.std_error, b.std_error);
    v.check(std::abs(a.price - b.price) <= 3.0 * se,
            "rho=0 MC " + fmt(a.price, 6) + " vs mixing " + fmt(b.price, 6) + " (SE " + fmt(se, 3) + ")");
  }
  return v;
}

Verdict hedging() {
  Verdict v;
  RoughHestonParams p;
  p.hurst = 0.1;
  p.mean_rev_rate = 0.3;
  p.mean_rev_level = 0.04;
  p.vol_of_vol = 0.3;
  p.correlation = -0.7;
  const auto model = VolatilityModel::heston(p, TimeGrid(0.5, 100));
  HedgeExperimentConfig cfg;
  cfg.n_paths = 200;
  cfg.seed = 1001;
  cfg.rebalance_counts = {25, 50, 100};
  cfg.ratios.pricing.n_paths = 500;
  cfg.ratios.pricing.method = PricingMethod::Conditional;
  cfg.initial_price_paths = 100000;
  const auto reports = pnl_experiment(model, call_claim(100.0), cfg);

  std::map<std::pair<HedgeMode, std::size_t>, double> sd;
  for (const auto& r : reports) sd[{r.mode, r.rebalance_count}] = r.summary.std_dev;
  const double un = sd[{HedgeMode::Unhedged, 50}];
  const double st = sd[{HedgeMode::StockOnly, 50}];
  const double fv = sd[{HedgeMode::StockAndForwardVariance, 50}];
  v.check(fv < 0.5 * st && 0.5 * st < un,
          "at 50 dates std unhedged " + fmt(un) + ", stock " + fmt(st) + ", stock+fv " + fmt(fv));
  for (HedgeMode m : {HedgeMode::StockOnly, HedgeMode::StockAndForwardVariance}) {
    const double a = sd[{m, 25}], b = sd[{m, 50}], c = sd[{m, 100}];
    v.check(b < a && c < b, to_string(m) + " std over 25/50/100 dates " + fmt(a) + " > " + fmt(b) + " > " + fmt(c));
  }
  return v;
}

Verdict bergomi() {
  Verdict v;
  const TimeGrid grid(1.0, 64);
  RoughBergomiParams p;
  p.hurst = 0.1;
  p.vol_of_vol = 1.5;
  const auto model = VolatilityModel::bergomi(p, grid);
  const auto ens = model.simulate(40000, 1101);

  // hat^t_s = V0 exp(Theta^t_s + lambda^2 ((s - t)^(2H) - s^(2H)) / 2) on every node, and hat^t_t = V_t.
  double worst = 0.0, worst_spot = 0.0;
  for (std::size_t q = 0; q < 8; ++q) {
    for (std::size_t i = 0; i < grid.n_steps(); i += 7) {
      const auto row = model.theta_row(ens, q, i);
      const auto curve = bergomi_curve(model, row, i);
      const double t = grid.time(i);
      for (std::size_t j = 0; j < row.size(); ++j) {
        const double s = grid.time(i + j);
        const double ref = p.v0 * std::exp(row[j] + 0.5 * p.vol_of_vol * p.vol_of_vol *
                                                         (std::pow(s - t, 2.0 * p.hurst) - std::pow(s, 2.0 * p.hurst)));
        worst = std::max(worst, std::abs(curve.hat_values[j] - ref) / ref);
      }
      const double spot = model.variance(ens.state(q, i, 1), i);
      worst_spot = std::max(worst_spot, std::abs(curve.hat_values[0] - spot) / spot);
    }
  }
  v.check(worst < 1e-13, "hat identity max relative error " + fmt(worst, 3));
  v.check(worst_spot < 1e-13, "hat^t_t vs spot variance max relative error " + fmt(worst_spot, 3));

  for (std::size_t i : {16u, 32u, 64u}) {
    std::vector<double> var(ens.path_count);
    for (std::size_t q = 0; q < ens.path_count; ++q) var[q] = model.variance(ens.state(q, i, 1), i);
    const auto m = estimate_mean(var);
    v.check(m.within(p.v0, 3.0), "E[V_t] at t=" + fmt(grid.time(i)) + " t-stat " + fmt(m.t_stat(p.v0), 3));
  }

  RoughBergomiParams flat = p;
  flat.vol_of_vol = 0.0;
  const auto flat_model = VolatilityModel::bergomi(flat, grid);
  PricingConfig cfg;
  cfg.n_paths = 100000;
  cfg.seed = 1102;
  cfg.method = PricingMethod::FullMonteCarlo;
  const auto est =
      price_claim(flat_model, call_claim(110.0), 0, p.s0, flat_model.theta_row(flat_model.simulate(1, 1103), 0, 0), cfg);
  const double ref = oracle::bs_call(p.s0, 110.0, p.v0 * grid.horizon());
  v.check(std::abs(est.price - ref) <= 3.0 * est.std_error,
          "lambda=0 MC " + fmt(est.price, 6) + " vs BS " + fmt(ref, 6) + " (SE " + fmt(est.std_error, 3) + ")");
  return v;
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Caps Monte Carlo budgets so every catalog scenario runs in seconds.
void shrink(nlohmann::json& node, const std::string& key = "") {
  if (node.is_object()) {
    for (auto& [k, child] : node.items()) shrink(child, k);
    return;
  }
  if (node.is_array()) {
    for (auto& child : node) shrink(child, key);
    return;
  }
  if (!node.is_number_unsigned()) return;
  static const std::map<std::string, std::uint64_t> caps{
      {"paths", 200}, {"inner_paths", 500}, {"outer_paths", 2}, {"initial_price_paths", 2000}, {"samples", 3}};
  if (const auto it = caps.find(key); it != caps.end()) node = std::min(node.get<std::uint64_t>(), it->second);
}

Verdict determinism() {
  Verdict v;
  const fs::path scenarios = VOLTERRA_SCENARIO_DIR;
  const auto root = fs::temp_directory_path() / "volterra_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  for (const auto& entry : volterra::cli::scenario_catalog()) {
    auto doc = nlohmann::json::parse(slurp(scenarios / (entry.name + ".json")));
    shrink(doc);
    if (doc["command"] == "verify-ito") doc["grid"]["steps"] = 64;
    const auto config = root / (entry.name + ".json");
    std::ofstream(config) << doc.dump(2);

    std::vector<std::string> csvs;
    std::vector<int> codes;
    for (const char* threads : {"1", "2", "8"}) {
      const auto out = root / (entry.name + "_" + threads);
      std::ostringstream sink_out, sink_err;
      codes.push_back(volterra::cli::run_cli(
          {"volterra", doc["command"].get<std::string>(), "--config", config.string(), "--out", out.string(),
           "--threads", threads},
          sink_out, sink_err));
      std::string all;
      if (fs::exists(out)) {
        std::vector<fs::path> files;
        for (const auto& f : fs::directory_iterator(out))
          if (f.path().extension() == ".csv") files.push_back(f.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) all += f.filename().string() + "\n" + slurp(f);
      }
      csvs.push_back(all);
    }
    const bool ran = (codes[0] == 0 || codes[0] == 1) && !csvs[0].empty();
    const bool same = codes[0] == codes[1] && codes[0] == codes[2] && csvs[0] == csvs[1] && csvs[0] == csvs[2];
    if (!ran || !same)
      v.check(false, entry.name + " exit codes " + std::to_string(codes[0]) + "/" + std::to_string(codes[1]) + "/" +
                         std::to_string(codes[2]) + (same ? "" : " with differing CSVs"));
  }
  fs::remove_all(root);
  if (v.ok())
    v.note(std::to_string(volterra::cli::scenario_catalog().size()) + " scenarios byte-identical under 1, 2, 8 threads");
  return v;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Verdict()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "conditional-expectation representation", conditional_expectation},
      {2, "martingale dichotomy", martingale_dichotomy},
      {3, "functional Ito certification", ito_certification},
      {4, "singular pairing rate", singular_rate},
      {5, "linear PPDE residual", ppde_residuals},
      {6, "path regularity scalings", scalings},
      {7, "BSDE solver", bsde},
      {8, "forward-variance transforms", forward_variance},
      {9, "rough Heston pricing oracles", heston_pricing},
      {10, "hedging experiment", hedging},
      {11, "rough Bergomi identities", bergomi},
      {12, "determinism", determinism},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int k = 1; k < argc; ++k) {
    try {
      wanted.push_back(std::stoi(argv[k]));
    } catch (const std::exception&) {
      std::cerr << "usage: acceptance [criterion...]\n";
      return 2;
    }
  }
  bool all_ok = true;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (v.ok() ? "[PASS]" : "[FAIL]") << " criterion " << c.id << " (" << c.title << "): " << v.detail()
              << " [" << fmt(secs, 3) << " s]" << std::endl;
    all_ok = all_ok && v.ok();
  }
  return all_ok ? 0 : 1;
}
