#include <cmath>
#include <memory>

#include "volterra/bsde.hpp"
#include "volterra/gauss.hpp"
#include "volterra/rng.hpp"
#include "volterra/roughvol.hpp"
#include "volterra/simulate.hpp"
#include "volterra_cli/commands.hpp"

namespace volterra::cli {
namespace {

enum class DriverKind { Zero, Discount, Linear };

struct DriverConfig {
  DriverKind kind = DriverKind::Zero;
  double a = 0.0;  ///< coefficient of y (minus the rate for discounting)
  double b = 0.0;  ///< coefficient of z
};

struct FeynmanKacSection {
  std::size_t paths = 0;
  double perturbed_normalization = 0.0;  ///< 0 skips the negative control
  std::size_t ppde_samples = 4;
  ThresholdSpec th;
};

/// Closed-form Y_0 for drivers a y + b z: Girsanov shifts the noise by b dt
/// and the linear term discounts at rate -a.
double reference_value(const ProcessModel& m, const Payoff& g, const DriverConfig& d, double horizon) {
  const double growth = std::exp(d.a * horizon);
  if (m.gaussian()) {
    const double sd = std::sqrt(m.kernel.square_integral(horizon, 0.0, horizon));
    const double shift = d.b * m.kernel.integral(horizon, 0.0, horizon);
    std::vector<double> kinks;
    for (const auto& k : g.kinks()) kinks.push_back(k.location);
    return growth * gaussian_expectation([&g](double x) { return g(x); }, m.x0 + shift, sd, kinks);
  }
  const double spot = m.x0 * std::exp(m.sigma * d.b * horizon);
  return growth * lognormal_expectation(g, spot, m.sigma * m.sigma * horizon);
}

}  // namespace

Job parse_solve_bsde(const Node& root, const ParseContext& pctx) {
  const TimeGrid grid = parse_grid(root.child("grid"));
  const auto model_node = root.child("model");
  const ProcessModel model = parse_process(model_node, pctx);
  const std::size_t paths = root.count("paths");
  if (paths < 2) root.fail("paths", "need at least two paths");
  const Payoff payoff = parse_payoff(root.child("payoff"), pctx);

  DriverConfig driver;
  if (const auto n = root.optional_child("driver")) {
    const auto type = n->choice("type", {"zero", "discount", "linear"});
    if (type == "discount") {
      driver.kind = DriverKind::Discount;
      driver.a = -n->number("rate");
    } else if (type == "linear") {
      driver.kind = DriverKind::Linear;
      driver.a = n->number("y_coefficient", 0.0);
      driver.b = n->number("z_coefficient", 0.0);
    }
    n->finish();
  }

  FeatureSpec features;
  LsmcOptions lsmc;
  if (const auto n = root.optional_child("features")) {
    features.theta_fractions = n->numbers("theta_fractions", features.theta_fractions);
    features.degree = static_cast<int>(n->count("degree", 2));
    try {
      features.validate();
    } catch (const ConfigError& e) {
      n->fail("", e.what());
    }
    n->finish();
  }
  if (const auto n = root.optional_child("lsmc")) {
    lsmc.picard_iterations = static_cast<int>(n->count("picard_iterations", 2));
    lsmc.ridge = n->number("ridge", lsmc.ridge);
    n->finish();
  }

  std::optional<FeynmanKacSection> fk;
  if (const auto n = root.optional_child("feynman_kac")) {
    if (!model.gaussian()) n->fail("", "the Feynman-Kac check needs a Gaussian model");
    if (driver.kind != DriverKind::Zero) n->fail("", "the Feynman-Kac check needs the zero driver");
    FeynmanKacSection s;
    s.paths = n->count("paths");
    s.perturbed_normalization = n->positive("perturbed_normalization", 0.0);
    s.ppde_samples = n->count("ppde_samples", 4);
    if (s.perturbed_normalization > 0.0 && model.kernel.family() == KernelFamily::UserTabulated)
      n->fail("perturbed_normalization", "tabulated kernels cannot be rescaled");
    if (s.paths < 2) n->fail("paths", "need at least two paths");
    s.th = parse_thresholds(*n, {"max_t_stat", "max_ppde_residual", "min_perturbed_t_stat"});
    if (s.th.get("min_perturbed_t_stat") && s.perturbed_normalization == 0.0)
      n->fail("thresholds", "min_perturbed_t_stat needs perturbed_normalization");
    n->finish();
    fk = s;
  }
  const auto th = parse_thresholds(root, {"max_t_stat", "max_relative_error"});

  BSDEProblem problem;
  problem.coeff = model.coeff;
  problem.terminal = [payoff](const PathView& v) { return payoff(v.current()[0]); };
  if (driver.kind != DriverKind::Zero) {
    const double a = driver.a, b = driver.b;
    problem.driver = [a, b](double, const PathView&, double y, std::span<const double> z) { return a * y + b * z[0]; };
    problem.lipschitz_bound = std::abs(a) + std::abs(b);
  }
  const double reference = reference_value(model, payoff, driver, grid.horizon());

  return [=](RunContext& ctx) {
    const auto ens = in_module("simulate", [&] { return simulate_ensemble(model.coeff, grid, paths, ctx.seed()); });
    const auto sol = in_module("bsde", [&] { return solve_lsmc(problem, ens, features, lsmc); });

    CsvTable steps({"step", "time", "y_mean", "y_std_error", "z_mean", "condition_number", "active_features"});
    std::vector<double> ys(paths), zs(paths);
    for (std::size_t i = 0; i <= grid.n_steps(); ++i) {
      for (std::size_t p = 0; p < paths; ++p) {
        ys[p] = sol.y(p, i);
        zs[p] = i < grid.n_steps() ? sol.z(p, i) : 0.0;
      }
      const auto y = estimate_mean(ys);
      auto row = steps.row();
      row << i << grid.time(i) << y.mean << y.std_error;
      if (i < grid.n_steps())
        row << estimate_mean(zs).mean << sol.condition_numbers[i] << sol.active_features[i];
      else
        row << "" << "" << "";
    }
    ctx.add_csv("bsde_steps.csv", steps);

    const double t = sol.y0.t_stat(reference);
    const double rel = std::abs(sol.y0.mean - reference) / std::max(std::abs(reference), 1e-300);
    auto& r = ctx.report();
    r["y0"] = {{"mean", sol.y0.mean}, {"std_error", sol.y0.std_error}};
    r["reference"] = reference;
    r["t_stat"] = t;
    r["relative_error"] = rel;
    r["basis"] = sol.basis;
    r["warnings"] = sol.warnings;
    check_max(ctx, "abs_t_stat", std::abs(t), th.get("max_t_stat"));
    check_max(ctx, "relative_error", rel, th.get("max_relative_error"));

    if (!fk) return;
    LinearProblem lp;
    lp.terminal = payoff;
    lp.kernel = model.kernel;
    lp.horizon = grid.horizon();
    FeynmanKacOptions opts;
    opts.ito.use_closed = true;
    opts.ppde_samples = fk->ppde_samples;
    const auto fk_ens =
        in_module("simulate", [&] { return simulate_ensemble(model.coeff, grid, fk->paths, mix_seed(ctx.seed(), 5)); });
    const auto good = in_module("bsde", [&] {
      return feynman_kac_check(problem, make_functional(std::make_shared<const GaussFunctional>(lp)), fk_ens, opts);
    });
    CsvTable fk_csv({"functional", "residual_mean", "residual_std_error", "t_stat", "max_ppde_residual"});
    fk_csv.row() << "claimed" << good.residual.mean << good.residual.std_error << good.residual.t_stat()
                 << good.max_ppde_residual;
    r["feynman_kac"] = {{"t_stat", good.residual.t_stat()}, {"max_ppde_residual", good.max_ppde_residual}};
    check_max(ctx, "feynman_kac.abs_t_stat", std::abs(good.residual.t_stat()), fk->th.get("max_t_stat"));
    check_max(ctx, "feynman_kac.max_ppde_residual", good.max_ppde_residual, fk->th.get("max_ppde_residual"));
    if (fk->perturbed_normalization > 0.0) {
      LinearProblem wrong = lp;
      const double norm = model.kernel.normalization() * fk->perturbed_normalization;
      wrong.kernel = model.kernel.family() == KernelFamily::Constant
                         ? KernelSpec::constant(norm)
                         : KernelSpec::riemann_liouville(model.kernel.hurst(), norm);
      const auto bad = in_module("bsde", [&] {
        return feynman_kac_check(problem, make_functional(std::make_shared<const GaussFunctional>(wrong)), fk_ens, opts);
      });
      fk_csv.row() << "perturbed" << bad.residual.mean << bad.residual.std_error << bad.residual.t_stat()
                   << bad.max_ppde_residual;
      r["feynman_kac"]["perturbed_t_stat"] = bad.residual.t_stat();
      check_min(ctx, "feynman_kac.perturbed_abs_t_stat", std::abs(bad.residual.t_stat()),
                fk->th.get("min_perturbed_t_stat"));
    }
    ctx.add_csv("feynman_kac.csv", fk_csv);
  };
}

}  // namespace volterra::cli
