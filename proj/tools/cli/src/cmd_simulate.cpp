#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "volterra/ensemble_io.hpp"
#include "volterra/simulate.hpp"
#include "volterra/stats.hpp"
#include "volterra_cli/commands.hpp"

namespace volterra::cli {
namespace {

/// Exact variance of the simulated state at node i. The Gaussian scheme
/// matches the column variance of the kernel; the lognormal Euler scheme
/// multiplies by (1 + sigma dW) each step.
double scheme_variance(const ProcessModel& m, const TimeGrid& g, std::size_t i) {
  if (i == 0) return 0.0;
  if (m.gaussian()) return m.kernel.square_integral(g.time(i), 0.0, g.time(i));
  return m.x0 * m.x0 * (std::pow(1.0 + m.sigma * m.sigma * g.dt(), static_cast<double>(i)) - 1.0);
}

std::string binary_bytes(const PathEnsemble& ens) {
  const auto tmp = std::filesystem::temp_directory_path() /
                   ("volterra-ensemble-" + std::to_string(std::hash<std::string>{}(std::to_string(ens.seed))) + ".bin");
  write_ensemble_binary(ens, tmp);
  std::ifstream in(tmp, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  std::filesystem::remove(tmp);
  return bytes;
}

}  // namespace

Job parse_simulate(const Node& root, const ParseContext& pctx) {
  const TimeGrid grid = parse_grid(root.child("grid"));
  const ProcessModel model = parse_process(root.child("model"), pctx);
  const std::size_t paths = root.count("paths");
  if (paths < 2) root.fail("paths", "need at least two paths");
  bool write_csv = true, write_binary = false;
  if (const auto out = root.optional_child("outputs")) {
    write_csv = out->flag("ensemble_csv", true);
    write_binary = out->flag("ensemble_binary", false);
    out->finish();
  }
  const auto th = parse_thresholds(root, {"max_mean_t_stat", "max_variance_relative_error"});

  return [=](RunContext& ctx) {
    const auto ens = in_module("simulate", [&] { return simulate_ensemble(model.coeff, grid, paths, ctx.seed()); });

    CsvTable summary({"step", "time", "mean", "std_error", "variance", "scheme_variance"});
    double worst_t = 0.0, worst_rel = 0.0;
    std::vector<double> column(paths);
    for (std::size_t i = 0; i <= grid.n_steps(); ++i) {
      for (std::size_t p = 0; p < paths; ++p) column[p] = ens.state(p, i);
      const auto est = estimate_mean(column);
      const double var = est.std_dev * est.std_dev;
      const double exact = scheme_variance(model, grid, i);
      summary.row() << i << grid.time(i) << est.mean << est.std_error << var << exact;
      if (i == 0) continue;
      worst_t = std::max(worst_t, std::abs(est.t_stat(model.x0)));
      worst_rel = std::max(worst_rel, std::abs(var - exact) / exact);
    }
    ctx.add_csv("summary.csv", summary);
    if (write_csv) {
      std::ostringstream out;
      write_ensemble_csv(ens, out);
      ctx.add_artifact("ensemble.csv", out.str());
    }
    if (write_binary) ctx.add_artifact("ensemble.bin", binary_bytes(ens));

    ctx.report()["paths"] = paths;
    ctx.report()["steps"] = grid.n_steps();
    ctx.report()["max_mean_t_stat"] = worst_t;
    ctx.report()["max_variance_relative_error"] = worst_rel;
    check_max(ctx, "max_mean_t_stat", worst_t, th.get("max_mean_t_stat"));
    check_max(ctx, "max_variance_relative_error", worst_rel, th.get("max_variance_relative_error"));
  };
}

}  // namespace volterra::cli
