#include "volterra/hedging.hpp"

#include <algorithm>
#include <cmath>

#include "volterra/errors.hpp"
#include "volterra/parallel.hpp"
#include "volterra/rng.hpp"
#include "volterra/stats.hpp"

namespace volterra {

std::string to_string(HedgeMode mode) {
  switch (mode) {
    case HedgeMode::Unhedged:
      return "unhedged";
    case HedgeMode::StockOnly:
      return "stock_only";
    case HedgeMode::StockAndForwardVariance:
      return "stock_and_fv";
  }
  return "unknown";
}

void HedgeExperimentConfig::validate(std::size_t n_steps) const {
  if (n_paths == 0) throw ConfigError("hedging needs at least one outer path");
  if (rebalance_counts.empty() || modes.empty()) throw ConfigError("hedging needs modes and rebalance counts");
  for (std::size_t r : rebalance_counts)
    if (r == 0 || n_steps % r != 0)
      throw ConfigError("rebalance count " + std::to_string(r) + " does not divide " + std::to_string(n_steps) +
                        " steps");
  // Coarser schedules reuse the ratios of the finest one.
  const std::size_t finest = *std::max_element(rebalance_counts.begin(), rebalance_counts.end());
  for (std::size_t r : rebalance_counts)
    if (finest % r != 0)
      throw ConfigError("rebalance count " + std::to_string(r) + " does not divide the finest count " +
                        std::to_string(finest));
  if (ratios.pricing.n_paths == 0) throw ConfigError("hedging needs nested paths");
}

HedgeSummary summarize_pnl(const std::vector<double>& pnl) {
  HedgeSummary s;
  if (pnl.empty()) return s;
  const auto est = estimate_mean(pnl);
  s.mean = est.mean;
  s.std_dev = est.std_dev;
  s.q05 = quantile(pnl, 0.05);
  s.q50 = quantile(pnl, 0.5);
  s.q95 = quantile(pnl, 0.95);
  return s;
}

namespace {

struct OuterPath {
  std::vector<double> spot;       // S at every grid step
  std::vector<double> fv;         // hat^{t_i}_T at every grid step
  std::vector<HedgeRatios> ratio; // at the finest rebalancing dates
  double payoff = 0.0;
};

double forward_variance_T(const VolatilityModel& model, std::size_t i, std::span<const double> row) {
  const TimeGrid& g = model.grid();
  if (model.kind() == VolModelKind::RoughBergomi)
    return bergomi_forward_variance(*model.bergomi_params(), g.time(i), g.horizon(), row.back());
  if (row.size() == 1) return std::max(row[0], 0.0);
  std::vector<double> nodes(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) nodes[j] = g.time(i + j);
  return theta_to_hat(nodes, row, model.heston_params()->relaxation()).back();
}

}  // namespace

std::vector<HedgeReport> pnl_experiment(const VolatilityModel& model, const Claim& claim,
                                        const HedgeExperimentConfig& cfg) {
  const TimeGrid& g = model.grid();
  const std::size_t n = g.n_steps();
  cfg.validate(n);
  const std::size_t finest = *std::max_element(cfg.rebalance_counts.begin(), cfg.rebalance_counts.end());
  const std::size_t fine_step = n / finest;
  bool need_ratios = false;
  for (auto m : cfg.modes) need_ratios = need_ratios || m != HedgeMode::Unhedged;

  std::vector<double> row0(n + 1, model.kind() == VolModelKind::RoughHeston ? model.v0() : 0.0);
  PricingConfig initial = cfg.ratios.pricing;
  initial.n_paths = cfg.initial_price_paths;
  initial.seed = mix_seed(cfg.seed, 0xC0FFEE);
  if (!claim.running.is_zero()) initial.method = PricingMethod::FullMonteCarlo;
  const double price0 = price_claim(model, claim, 0, model.s0(), row0, initial).price;

  std::vector<OuterPath> outer(cfg.n_paths);
  const NormalStream stream(mix_seed(cfg.seed, 0x0DE7));
  parallel_for(cfg.n_paths, [&](std::size_t begin, std::size_t end) {
    std::vector<double> noise(2 * n), states(2 * (n + 1));
    std::vector<std::vector<double>> rows(n + 1);
    const VolterraStepper::RowCallback keep = [&](std::size_t i, std::span<const double> r) {
      rows[i].assign(r.begin(), r.end());
    };
    for (std::size_t p = begin; p < end; ++p) {
      fill_increments(stream, g, 2, p, 0, n, noise);
      model.run_path(noise, states, p, &keep);
      OuterPath& op = outer[p];
      op.spot.resize(n + 1);
      op.fv.resize(n + 1);
      double running = 0.0;
      for (std::size_t i = 0; i <= n; ++i) {
        op.spot[i] = states[2 * i];
        op.fv[i] = forward_variance_T(model, i, rows[i]);
        if (i > 0 && !claim.running.is_zero())
          running += 0.5 * g.dt() * (claim.running(g.time(i - 1), op.spot[i - 1]) + claim.running(g.time(i), op.spot[i]));
      }
      op.payoff = claim.terminal(op.spot[n]) + running;
      if (!need_ratios) continue;
      op.ratio.resize(finest);
      for (std::size_t k = 0; k < finest; ++k) {
        const std::size_t i = k * fine_step;
        HedgeRatioConfig rc = cfg.ratios;
        rc.pricing.seed = mix_seed(cfg.seed, p + 1, i + 1);
        op.ratio[k] = hedge_ratios(model, claim, i, op.spot[i], rows[i], rc);
      }
    }
  });

  std::vector<HedgeReport> reports;
  for (HedgeMode mode : cfg.modes) {
    for (std::size_t count : cfg.rebalance_counts) {
      HedgeReport rep;
      rep.mode = mode;
      rep.rebalance_count = count;
      rep.initial_price = price0;
      const std::size_t step = n / count;
      const std::size_t stride = finest / count;
      for (std::size_t k = 0; k < count; ++k) rep.times.push_back(g.time(k * step));
      rep.pnl_paths.resize(cfg.n_paths);
      for (std::size_t p = 0; p < cfg.n_paths; ++p) {
        const OuterPath& op = outer[p];
        double gains = 0.0;
        if (mode != HedgeMode::Unhedged) {
          for (std::size_t k = 0; k < count; ++k) {
            const std::size_t i = k * step, next = i + step;
            const HedgeRatios& r = op.ratio[k * stride];
            if (r.unstable) ++rep.unstable_ratios;
            gains += r.delta_stock * (op.spot[next] - op.spot[i]);
            if (mode == HedgeMode::StockAndForwardVariance) gains += r.delta_fv * (op.fv[next] - op.fv[i]);
            if (p == 0) {
              rep.delta_stock.push_back(r.delta_stock);
              rep.delta_fv.push_back(mode == HedgeMode::StockAndForwardVariance ? r.delta_fv : 0.0);
            }
          }
        }
        rep.pnl_paths[p] = op.payoff - price0 - gains;
      }
      rep.summary = summarize_pnl(rep.pnl_paths);
      reports.push_back(std::move(rep));
    }
  }
  return reports;
}

}  // namespace volterra
