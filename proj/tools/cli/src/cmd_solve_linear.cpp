#include <cmath>
#include <memory>
#include <random>

#include "volterra/fito.hpp"
#include "volterra/gauss.hpp"
#include "volterra/gauss_checks.hpp"
#include "volterra/rng.hpp"
#include "volterra/simulate.hpp"
#include "volterra_cli/commands.hpp"

namespace volterra::cli {
namespace {

struct TowerSection {
  TowerOptions opts;
  ThresholdSpec th;
};

struct DriftSection {
  std::size_t paths = 0;
  std::size_t from_step = 0;
  std::size_t to_step = 0;
  ThresholdSpec th;
};

struct PpdeSection {
  std::size_t samples = 20;
  double t_min = 0.1;
  double t_max = 0.9;
  ResidualOptions opts;
  ThresholdSpec th;
};

struct PairingSection {
  double time = 0.25;
  double path_value = 0.0;
  PairingOptions opts;
  ThresholdSpec th;
};

std::size_t step_of(const Node& node, const std::string& key, const TimeGrid& grid, double fallback) {
  const double f = node.number(key, fallback);
  if (!(f >= 0.0 && f <= 1.0)) node.fail(key, "expected a fraction of the horizon in [0, 1]");
  return grid.nearest_index(f * grid.horizon());
}

void run_tower(RunContext& ctx, const GaussFunctional& fnl, const TimeGrid& grid, TowerSection sec) {
  sec.opts.seed = mix_seed(ctx.seed(), 1);
  const auto rep = in_module("gauss", [&] { return tower_check(fnl, grid, sec.opts); });
  CsvTable csv({"outer_path", "step", "time", "functional", "nested_mean", "nested_std_error", "t_stat"});
  for (const auto& p : rep.points)
    csv.row() << p.outer_path << p.step << p.time << p.functional << p.nested.mean << p.nested.std_error
              << p.nested.t_stat(p.functional);
  ctx.add_csv("tower.csv", csv);
  ctx.report()["tower"] = {{"points", rep.points.size()}, {"max_abs_t_stat", rep.max_abs_t_stat}};
  check_max(ctx, "tower.max_abs_t_stat", rep.max_abs_t_stat, sec.th.get("max_abs_t_stat"));
}

void run_drift(RunContext& ctx, const GaussFunctional& fnl, const TimeGrid& grid, const DriftSection& sec) {
  const auto rep = in_module("gauss", [&] {
    return martingale_drift(fnl, grid, sec.paths, mix_seed(ctx.seed(), 2), sec.from_step, sec.to_step);
  });
  CsvTable csv({"quantity", "from_time", "to_time", "mean", "std_error", "t_stat"});
  csv.row() << "functional" << grid.time(rep.from_step) << grid.time(rep.to_step) << rep.functional.mean
            << rep.functional.std_error << rep.functional.t_stat();
  csv.row() << "markovian" << grid.time(rep.from_step) << grid.time(rep.to_step) << rep.markovian.mean
            << rep.markovian.std_error << rep.markovian.t_stat();
  ctx.add_csv("drift.csv", csv);
  const double tf = std::abs(rep.functional.t_stat()), tm = std::abs(rep.markovian.t_stat());
  ctx.report()["drift"] = {{"functional_t_stat", rep.functional.t_stat()}, {"markovian_t_stat", rep.markovian.t_stat()}};
  check_max(ctx, "drift.functional_abs_t_stat", tf, sec.th.get("max_functional_t_stat"));
  check_min(ctx, "drift.markovian_abs_t_stat", tm, sec.th.get("min_markovian_t_stat"));
}

void run_ppde(RunContext& ctx, const GaussFunctional& fnl, const CoefficientSpec& coeff, const TimeGrid& grid,
              const PpdeSection& sec) {
  // Each sample is a simulated path cut at a random node: omega = X (x)_t Theta^t.
  const auto ens = in_module("simulate", [&] { return simulate_ensemble(coeff, grid, sec.samples, mix_seed(ctx.seed(), 3)); });
  std::mt19937_64 gen(mix_seed(ctx.seed(), 4));
  std::uniform_real_distribution<double> uniform(sec.t_min, sec.t_max);
  CsvTable csv({"sample", "step", "time", "omega_at_t", "omega_at_T", "residual"});
  double worst = 0.0;
  for (std::size_t k = 0; k < sec.samples; ++k) {
    std::size_t i = grid.nearest_index(uniform(gen) * grid.horizon());
    i = std::clamp<std::size_t>(i, 1, grid.n_steps() - 1);
    const Path omega = concat(theta_field(ens, coeff, k), i).to_path();
    const double t = grid.time(i);
    const double res = in_module("gauss", [&] { return ppde_residual(fnl, t, omega, sec.opts); });
    csv.row() << k << i << t << omega(t) << omega.terminal() << res;
    worst = std::max(worst, std::abs(res));
  }
  ctx.add_csv("ppde.csv", csv);
  ctx.report()["ppde"] = {{"samples", sec.samples},
                          {"derivatives", sec.opts.mode == DerivativeMode::ClosedForm ? "closed" : "finite-difference"},
                          {"max_abs_residual", worst}};
  check_max(ctx, "ppde.max_abs_residual", worst, sec.th.get("max_abs_residual"));
}

void run_pairing(RunContext& ctx, std::shared_ptr<const GaussFunctional> fnl, const CoefficientSpec& coeff,
                 const TimeGrid& grid, const PairingSection& sec) {
  const Path omega = Path::constant(grid.horizon(), sec.path_value);
  const auto sp = in_module("fito", [&] {
    return singular_pairing(make_functional(fnl), sec.time, omega, coeff, PairingKind::Diffusion, sec.opts);
  });
  CsvTable csv({"delta", "pairing"});
  for (std::size_t k = 0; k < sp.deltas.size(); ++k) csv.row() << sp.deltas[k] << sp.values[k];
  ctx.add_csv("pairing.csv", csv);
  ctx.report()["pairing"] = {{"observed_rate", sp.observed_rate}, {"r_squared", sp.r_squared},
                             {"extrapolated", sp.extrapolated}, {"exact", sp.exact}};
  if (const auto target = sec.th.get("target_rate"))
    check_max(ctx, "pairing.rate_error", std::abs(sp.observed_rate - *target), sec.th.get("max_rate_error"));
  check_min(ctx, "pairing.r_squared", sp.r_squared, sec.th.get("min_r_squared"));
}

}  // namespace

Job parse_solve_linear(const Node& root, const ParseContext& pctx) {
  const TimeGrid grid = parse_grid(root.child("grid"));
  const auto model_node = root.child("model");
  const ProcessModel model = parse_process(model_node, pctx);
  if (!model.gaussian()) model_node.fail("type", "solve-linear needs a Gaussian model");
  if (model.x0 != 0.0) model_node.fail("x0", "solve-linear works with processes started at zero");
  LinearProblem lp;
  lp.terminal = parse_payoff(root.child("payoff"), pctx);
  lp.running = parse_running(root, "running");
  lp.kernel = model.kernel;
  lp.horizon = grid.horizon();
  try {
    lp.validate();
  } catch (const ConfigError& e) {
    root.fail("payoff", e.what());
  }

  std::optional<TowerSection> tower;
  if (const auto n = root.optional_child("tower")) {
    TowerSection s;
    s.opts.outer_paths = n->count("outer_paths", 1);
    s.opts.inner_paths = n->count("inner_paths");
    s.opts.time_fractions = n->numbers("time_fractions", s.opts.time_fractions);
    if (s.opts.outer_paths == 0 || s.opts.inner_paths < 2) n->fail("inner_paths", "need outer and inner paths");
    for (double f : s.opts.time_fractions)
      if (!(f > 0.0 && f < 1.0)) n->fail("time_fractions", "fractions must lie in (0, 1)");
    s.th = parse_thresholds(*n, {"max_abs_t_stat"});
    n->finish();
    tower = s;
  }
  std::optional<DriftSection> drift;
  if (const auto n = root.optional_child("drift")) {
    if (!lp.running.is_zero()) n->fail("", "the drift check needs a zero running cost");
    DriftSection s;
    s.paths = n->count("paths");
    s.from_step = step_of(*n, "from_fraction", grid, 0.5);
    s.to_step = step_of(*n, "to_fraction", grid, 1.0);
    if (s.paths < 2) n->fail("paths", "need at least two paths");
    if (s.from_step >= s.to_step) n->fail("to_fraction", "the window is empty on this grid");
    s.th = parse_thresholds(*n, {"max_functional_t_stat", "min_markovian_t_stat"});
    n->finish();
    drift = s;
  }
  std::optional<PpdeSection> ppde;
  if (const auto n = root.optional_child("ppde")) {
    PpdeSection s;
    s.samples = n->count("samples", 20);
    const auto range = n->numbers("time_range", {0.1, 0.9});
    if (range.size() != 2 || !(0.0 < range[0] && range[0] < range[1] && range[1] < 1.0))
      n->fail("time_range", "expected [lo, hi] with 0 < lo < hi < 1");
    s.t_min = range[0];
    s.t_max = range[1];
    s.opts.mode = n->choice("derivatives", {"closed", "finite-difference"}, "closed") == "closed"
                      ? DerivativeMode::ClosedForm
                      : DerivativeMode::FiniteDifference;
    s.opts.fd.time_step = n->number("fd_time_step", 0.0);
    s.opts.fd.epsilon = n->number("fd_epsilon", 0.0);
    try {
      s.opts.fd.validate();
    } catch (const ConfigError& e) {
      n->fail("fd_epsilon", e.what());
    }
    if (s.samples == 0) n->fail("samples", "need at least one sample");
    s.th = parse_thresholds(*n, {"max_abs_residual"});
    n->finish();
    ppde = s;
  }
  std::optional<PairingSection> pairing;
  if (const auto n = root.optional_child("pairing")) {
    PairingSection s;
    s.time = n->number("time", 0.25);
    if (!(s.time > 0.0 && s.time < grid.horizon())) n->fail("time", "pairing time must lie inside the horizon");
    s.path_value = n->number("path_value", 0.0);
    s.opts.n_min = static_cast<int>(n->count("n_min", 4));
    s.opts.n_max = static_cast<int>(n->count("n_max", 10));
    s.opts.min_r_squared = n->number("fit_min_r_squared", s.opts.min_r_squared);
    if (s.opts.n_max < s.opts.n_min + 4) n->fail("n_max", "need at least five truncation levels");
    s.th = parse_thresholds(*n, {"target_rate", "max_rate_error", "min_r_squared"});
    if (s.th.get("max_rate_error") && !s.th.get("target_rate"))
      n->fail("thresholds", "max_rate_error needs target_rate");
    n->finish();
    pairing = s;
  }
  if (!tower && !drift && !ppde && !pairing) root.fail("", "solve-linear needs at least one of tower, drift, ppde, pairing");

  auto fnl = std::make_shared<const GaussFunctional>(lp);
  const CoefficientSpec coeff = model.coeff;
  return [=](RunContext& ctx) {
    ctx.report()["hurst"] = model.kernel.hurst();
    if (tower) run_tower(ctx, *fnl, grid, *tower);
    if (drift) run_drift(ctx, *fnl, grid, *drift);
    if (ppde) run_ppde(ctx, *fnl, coeff, grid, *ppde);
    if (pairing) run_pairing(ctx, fnl, coeff, grid, *pairing);
  };
}

}  // namespace volterra::cli
