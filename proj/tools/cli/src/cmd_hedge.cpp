#include <algorithm>
#include <cmath>
#include <map>

#include "volterra/hedging.hpp"
#include "volterra_cli/commands.hpp"

namespace volterra::cli {

Job parse_hedge(const Node& root, const ParseContext& pctx) {
  const TimeGrid grid = parse_grid(root.child("grid"));
  const VolModelConfig model_cfg = parse_vol_model(root.child("model"));
  const Claim claim = parse_claim(root.child("claim"), pctx);

  HedgeExperimentConfig cfg;
  cfg.n_paths = root.count("outer_paths");
  cfg.rebalance_counts.clear();
  for (auto c : root.counts("rebalance_counts")) cfg.rebalance_counts.push_back(c);
  cfg.modes.clear();
  for (const auto& m : root.texts("modes", {"unhedged", "stock_only", "stock_and_fv"})) {
    if (m == "unhedged")
      cfg.modes.push_back(HedgeMode::Unhedged);
    else if (m == "stock_only")
      cfg.modes.push_back(HedgeMode::StockOnly);
    else if (m == "stock_and_fv")
      cfg.modes.push_back(HedgeMode::StockAndForwardVariance);
    else
      root.fail("modes", "unknown hedge mode \"" + m + "\" (expected unhedged, stock_only, stock_and_fv)");
  }
  const auto nested = root.child("nested");
  cfg.ratios.pricing.n_paths = nested.count("paths");
  cfg.ratios.pricing.method =
      nested.choice("method", {"conditional", "full-monte-carlo"}, "conditional") == "conditional"
          ? PricingMethod::Conditional
          : PricingMethod::FullMonteCarlo;
  if (cfg.ratios.pricing.method == PricingMethod::Conditional && !claim.running.is_zero())
    nested.fail("method", "the conditional estimator needs a zero running cost");
  cfg.ratios.stock_bump = nested.positive("stock_bump", cfg.ratios.stock_bump);
  cfg.ratios.curve_bump = nested.positive("curve_bump", cfg.ratios.curve_bump);
  nested.finish();
  cfg.initial_price_paths = root.count("initial_price_paths", cfg.initial_price_paths);
  try {
    cfg.validate(grid.n_steps());
  } catch (const ConfigError& e) {
    root.fail("rebalance_counts", e.what());
  }
  const auto th = parse_thresholds(root, {"at_rebalance_count", "max_fv_to_stock_ratio", "max_stock_to_unhedged_ratio",
                                          "max_doubling_ratio"});
  std::size_t at = *std::max_element(cfg.rebalance_counts.begin(), cfg.rebalance_counts.end());
  if (const auto a = th.get("at_rebalance_count")) {
    at = static_cast<std::size_t>(*a);
    if (std::find(cfg.rebalance_counts.begin(), cfg.rebalance_counts.end(), at) == cfg.rebalance_counts.end())
      root.fail("thresholds", "at_rebalance_count is not one of the rebalance counts");
  }

  return [=](RunContext& ctx) {
    HedgeExperimentConfig run = cfg;
    run.seed = ctx.seed();
    const auto model = in_module("roughvol", [&] { return model_cfg.build(grid); });
    const auto reports = in_module("hedging", [&] { return pnl_experiment(model, claim, run); });

    CsvTable pnl({"mode", "rebalance_count", "path", "pnl"});
    CsvTable summary({"mode", "rebalance_count", "mean", "std_dev", "q05", "q50", "q95", "unstable_ratios", "initial_price"});
    CsvTable positions({"mode", "rebalance_count", "time", "delta_stock", "delta_fv"});
    std::map<std::pair<HedgeMode, std::size_t>, double> stds;
    for (const auto& rep : reports) {
      const auto mode = to_string(rep.mode);
      for (std::size_t p = 0; p < rep.pnl_paths.size(); ++p) pnl.row() << mode << rep.rebalance_count << p << rep.pnl_paths[p];
      const auto& s = rep.summary;
      summary.row() << mode << rep.rebalance_count << s.mean << s.std_dev << s.q05 << s.q50 << s.q95
                    << rep.unstable_ratios << rep.initial_price;
      for (std::size_t k = 0; k < rep.delta_stock.size(); ++k)
        positions.row() << mode << rep.rebalance_count << rep.times[k] << rep.delta_stock[k] << rep.delta_fv[k];
      stds[{rep.mode, rep.rebalance_count}] = s.std_dev;
    }
    ctx.add_csv("pnl.csv", pnl);
    ctx.add_csv("summary.csv", summary);
    ctx.add_csv("positions.csv", positions);

    auto& r = ctx.report();
    r["model"] = model_cfg.type();
    r["initial_price"] = reports.empty() ? 0.0 : reports.front().initial_price;
    for (const auto& [key, sd] : stds) r["std_dev"][to_string(key.first)][std::to_string(key.second)] = sd;

    auto sd = [&](HedgeMode m) -> std::optional<double> {
      const auto it = stds.find({m, at});
      return it == stds.end() ? std::nullopt : std::optional(it->second);
    };
    const auto un = sd(HedgeMode::Unhedged), so = sd(HedgeMode::StockOnly), fv = sd(HedgeMode::StockAndForwardVariance);
    if (so && fv) {
      r["fv_to_stock_ratio"] = *fv / *so;
      check_max(ctx, "fv_to_stock_ratio", *fv / *so, th.get("max_fv_to_stock_ratio"));
    }
    if (un && so) {
      r["stock_to_unhedged_ratio"] = *so / *un;
      check_max(ctx, "stock_to_unhedged_ratio", *so / *un, th.get("max_stock_to_unhedged_ratio"));
    }
    if (th.get("max_doubling_ratio")) {
      std::vector<std::size_t> counts = run.rebalance_counts;
      std::sort(counts.begin(), counts.end());
      for (HedgeMode m : run.modes) {
        if (m == HedgeMode::Unhedged) continue;
        double worst = 0.0;
        for (std::size_t k = 1; k < counts.size(); ++k) worst = std::max(worst, stds[{m, counts[k]}] / stds[{m, counts[k - 1]}]);
        check_max(ctx, "doubling_ratio." + to_string(m), worst, th.get("max_doubling_ratio"));
      }
    }
  };
}

}  // namespace volterra::cli
