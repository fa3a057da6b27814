#include <algorithm>
#include <cmath>
#include <memory>

#include "volterra/fito.hpp"
#include "volterra/gauss.hpp"
#include "volterra_cli/commands.hpp"

namespace volterra::cli {
namespace {

/// u(t, omega) = omega(T)^2: along X (x)_t Theta^t it is (Theta^t_T)^2.
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

Job parse_verify_ito(const Node& root, const ParseContext& pctx) {
  const TimeGrid grid = parse_grid(root.child("grid"));
  const auto model_node = root.child("model");
  const ProcessModel model = parse_process(model_node, pctx);
  const std::size_t paths = root.count("paths");
  if (paths < 2) root.fail("paths", "need at least two paths");

  const auto fnode = root.child("functional");
  const auto ftype = fnode.choice("type", {"gauss", "terminal-square"});
  std::shared_ptr<const GaussFunctional> gauss;
  if (ftype == "gauss") {
    if (!model.gaussian()) model_node.fail("type", "the gauss functional needs a Gaussian model");
    LinearProblem lp;
    lp.terminal = parse_payoff(fnode.child("payoff"), pctx);
    lp.running = parse_running(fnode, "running");
    lp.kernel = model.kernel;
    lp.horizon = grid.horizon();
    try {
      lp.validate();
    } catch (const ConfigError& e) {
      fnode.fail("payoff", e.what());
    }
    gauss = std::make_shared<const GaussFunctional>(lp);
  }
  fnode.finish();

  ItoOptions opts;
  opts.use_closed = root.choice("derivatives", {"closed", "finite-difference"}, "closed") == "closed";
  opts.singular_limit = root.flag("singular_limit", true);
  opts.max_paths = root.count("max_paths", 0);
  opts.coarsen_factors.clear();
  for (auto f : root.counts("coarsen_factors", {1})) {
    if (f == 0 || grid.n_steps() % f != 0) root.fail("coarsen_factors", "every factor must divide the step count");
    opts.coarsen_factors.push_back(f);
  }
  const auto th = parse_thresholds(root, {"min_order", "max_finest_rms", "max_mismatch_t_stat"});

  return [=](RunContext& ctx) {
    const Functional u = gauss ? make_functional(gauss) : terminal_square(grid.horizon());
    const auto ens = in_module("simulate", [&] { return simulate_ensemble(model.coeff, grid, paths, ctx.seed()); });
    const auto rep = in_module("fito", [&] { return ito_certify(u, model.coeff, ens, opts); });

    CsvTable levels({"n_steps", "dt", "rms", "mismatch_mean", "mismatch_std_error"});
    double worst_t = 0.0;
    for (const auto& lv : rep.levels) {
      levels.row() << lv.n_steps << lv.dt << lv.rms << lv.mismatch.mean << lv.mismatch.std_error;
      worst_t = std::max(worst_t, std::abs(lv.mismatch.t_stat()));
    }
    ctx.add_csv("ito_levels.csv", levels);

    auto& r = ctx.report();
    r["functional"] = ftype;
    r["levels"] = rep.levels.size();
    const auto finest = std::min_element(rep.levels.begin(), rep.levels.end(),
                                         [](const ItoLevel& a, const ItoLevel& b) { return a.dt < b.dt; });
    if (finest != rep.levels.end()) r["finest_rms"] = finest->rms;
    r["max_mismatch_t_stat"] = worst_t;
    if (rep.order) {
      r["order"] = {{"slope", rep.order->slope}, {"r_squared", rep.order->r_squared},
                    {"half_width", rep.order->half_width}};
      check_min(ctx, "min_order", rep.order->slope, th.get("min_order"));
    } else if (th.get("min_order")) {
      ctx.check_at_least("min_order", std::nan(""), *th.get("min_order"));
    }
    if (!rep.pairing_rates.empty()) r["pairing_rates"] = rep.pairing_rates;
    if (finest != rep.levels.end()) check_max(ctx, "max_finest_rms", finest->rms, th.get("max_finest_rms"));
    check_max(ctx, "max_mismatch_t_stat", worst_t, th.get("max_mismatch_t_stat"));
  };
}

}  // namespace volterra::cli
