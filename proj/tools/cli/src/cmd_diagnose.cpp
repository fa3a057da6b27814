#include <cmath>

#include "volterra/diagnostics.hpp"
#include "volterra/rng.hpp"
#include "volterra_cli/commands.hpp"

namespace volterra::cli {
namespace {

struct MomentsSection {
  std::size_t paths = 0;
  std::vector<TimeGrid> grids;
  std::vector<int> powers;
  ThresholdSpec th;
};

struct TwoTimeSection {
  std::size_t paths = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  ThresholdSpec th;
};

struct FreezeSection {
  std::size_t paths = 0;
  std::vector<int> levels;
  ThresholdSpec th;
};

struct CovarianceSection {
  std::size_t paths = 0;
  ThresholdSpec th;
};

std::size_t paths_of(const Node& n) {
  const auto p = n.count("paths");
  if (p < 2) n.fail("paths", "need at least two paths");
  return p;
}

nlohmann::json fit_json(const SlopeFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"half_width", f.half_width}};
}

}  // namespace

Job parse_diagnose(const Node& root, const ParseContext& pctx) {
  const TimeGrid grid = parse_grid(root.child("grid"));
  const auto model_node = root.child("model");
  const ProcessModel model = parse_process(model_node, pctx);

  std::optional<MomentsSection> moments;
  if (const auto n = root.optional_child("moments")) {
    MomentsSection s;
    s.paths = paths_of(*n);
    for (auto steps : n->counts("grid_steps")) {
      if (steps == 0) n->fail("grid_steps", "grids need at least one step");
      s.grids.emplace_back(grid.horizon(), steps);
    }
    if (s.grids.empty()) n->fail("grid_steps", "need at least one grid");
    for (auto p : n->counts("powers", {2, 4, 8})) s.powers.push_back(static_cast<int>(p));
    s.th = parse_thresholds(*n, {"max_relative_change"});
    n->finish();
    moments = s;
  }
  std::optional<TwoTimeSection> two_time;
  if (const auto n = root.optional_child("two_time")) {
    TwoTimeSection s;
    s.paths = paths_of(*n);
    const auto start = n->count("start_step");
    for (auto gap : n->counts("gap_steps")) {
      if (start + gap > grid.n_steps()) n->fail("gap_steps", "start_step + gap exceeds the grid");
      s.pairs.emplace_back(start, start + gap);
    }
    s.th = parse_thresholds(*n, {"min_slope", "max_slope", "min_r_squared"});
    n->finish();
    two_time = s;
  }
  std::optional<FreezeSection> freeze;
  if (const auto n = root.optional_child("freeze")) {
    FreezeSection s;
    s.paths = paths_of(*n);
    for (auto l : n->counts("levels")) s.levels.push_back(static_cast<int>(l));
    s.th = parse_thresholds(*n, {"min_slope", "max_slope", "min_r_squared"});
    n->finish();
    freeze = s;
  }
  std::optional<CovarianceSection> covariance;
  if (const auto n = root.optional_child("covariance")) {
    if (!model.gaussian()) n->fail("", "the covariance check needs a Gaussian model");
    CovarianceSection s;
    s.paths = paths_of(*n);
    s.th = parse_thresholds(*n, {"max_abs_t_stat"});
    n->finish();
    covariance = s;
  }
  if (!moments && !two_time && !freeze && !covariance)
    root.fail("", "diagnose needs at least one of moments, two_time, freeze, covariance");

  return [=](RunContext& ctx) {
    auto& r = ctx.report();
    if (moments) {
      const auto table = in_module("diagnostics", [&] {
        return moment_scan(model.coeff, moments->grids, moments->paths, mix_seed(ctx.seed(), 1), moments->powers);
      });
      CsvTable csv({"grid_steps", "power", "mean", "std_error"});
      for (std::size_t g = 0; g < table.grid_sizes.size(); ++g)
        for (std::size_t k = 0; k < table.powers.size(); ++k)
          csv.row() << table.grid_sizes[g] << static_cast<std::size_t>(table.powers[k]) << table.at(g, k).mean
                    << table.at(g, k).std_error;
      ctx.add_csv("moments.csv", csv);
      double change = 0.0;
      if (table.grid_sizes.size() >= 2) {
        const std::size_t a = table.grid_sizes.size() - 2, b = a + 1;
        for (std::size_t k = 0; k < table.powers.size(); ++k)
          change = std::max(change, std::abs(table.at(b, k).mean - table.at(a, k).mean) / std::abs(table.at(b, k).mean));
      }
      r["moments"] = {{"stable", table.stable}, {"diverged", table.diverged}, {"max_relative_change", change}};
      check_max(ctx, "moments.max_relative_change", change, moments->th.get("max_relative_change"));
    }
    if (two_time) {
      const auto res = in_module("diagnostics", [&] {
        return two_time_scaling(model.coeff, grid, two_time->paths, mix_seed(ctx.seed(), 2), two_time->pairs);
      });
      CsvTable csv({"start_step", "end_step", "gap", "mean", "std_error"});
      for (std::size_t k = 0; k < res.moments.size(); ++k) {
        const auto [a, b] = two_time->pairs[k];
        csv.row() << a << b << grid.time(b) - grid.time(a) << res.moments[k].mean << res.moments[k].std_error;
      }
      ctx.add_csv("two_time.csv", csv);
      r["two_time"] = fit_json(res.fit);
      check_min(ctx, "two_time.slope", res.fit.slope, two_time->th.get("min_slope"));
      check_max(ctx, "two_time.slope", res.fit.slope, two_time->th.get("max_slope"));
      check_min(ctx, "two_time.r_squared", res.fit.r_squared, two_time->th.get("min_r_squared"));
    }
    if (freeze) {
      const auto res = in_module("diagnostics", [&] {
        return freeze_rate(model.coeff, grid, freeze->paths, mix_seed(ctx.seed(), 3), freeze->levels);
      });
      CsvTable csv({"level", "mean", "std_error", "log2_mean"});
      for (std::size_t k = 0; k < res.moments.size(); ++k)
        csv.row() << static_cast<std::size_t>(freeze->levels[k]) << res.moments[k].mean << res.moments[k].std_error
                  << std::log2(res.moments[k].mean);
      ctx.add_csv("freeze.csv", csv);
      r["freeze"] = fit_json(res.fit);
      check_min(ctx, "freeze.slope", res.fit.slope, freeze->th.get("min_slope"));
      check_max(ctx, "freeze.slope", res.fit.slope, freeze->th.get("max_slope"));
      check_min(ctx, "freeze.r_squared", res.fit.r_squared, freeze->th.get("min_r_squared"));
    }
    if (covariance) {
      const auto rep = in_module("diagnostics", [&] {
        return covariance_check(model.kernel, grid, covariance->paths, mix_seed(ctx.seed(), 4));
      });
      CsvTable csv({"s", "t", "estimate", "std_error", "oracle"});
      for (const auto& e : rep.entries) csv.row() << e.s << e.t << e.estimate.mean << e.estimate.std_error << e.oracle;
      ctx.add_csv("covariance.csv", csv);
      r["covariance"] = {{"max_abs_error", rep.max_abs_error}, {"max_abs_t_stat", rep.max_abs_t_stat}};
      check_max(ctx, "covariance.max_abs_t_stat", rep.max_abs_t_stat, covariance->th.get("max_abs_t_stat"));
    }
  };
}

}  // namespace volterra::cli
