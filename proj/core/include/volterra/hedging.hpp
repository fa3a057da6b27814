#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "volterra/roughvol.hpp"

namespace volterra {

enum class HedgeMode { Unhedged, StockOnly, StockAndForwardVariance };

std::string to_string(HedgeMode mode);

struct HedgeSummary {
  double mean = 0.0;
  double std_dev = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
};

struct HedgeReport {
  HedgeMode mode = HedgeMode::Unhedged;
  std::size_t rebalance_count = 0;
  std::vector<double> times;        ///< rebalancing dates
  std::vector<double> delta_stock;  ///< positions along the first outer path
  std::vector<double> delta_fv;
  std::vector<double> pnl_paths;    ///< payoff - initial price - hedge gains
  double initial_price = 0.0;
  std::size_t unstable_ratios = 0;
  HedgeSummary summary;
};

struct HedgeExperimentConfig {
  std::size_t n_paths = 500;
  std::uint64_t seed = 1;
  /// Numbers of rebalancing dates; each must divide the grid's step count.
  std::vector<std::size_t> rebalance_counts{25, 50, 100};
  std::vector<HedgeMode> modes{HedgeMode::Unhedged, HedgeMode::StockOnly, HedgeMode::StockAndForwardVariance};
  HedgeRatioConfig ratios;
  std::size_t initial_price_paths = 20000;

  void validate(std::size_t n_steps) const;
};

/// Outer paths are simulated once; hedge ratios are computed by nested Monte
/// Carlo (seeds mixed from the outer path and the date) at the dates of the
/// finest rebalancing schedule and reused by the coarser ones. Positions are
/// held between rebalancing dates; the forward-variance leg trades hat^t_T.
/// Returns one report per (mode, rebalance count), modes outermost.
std::vector<HedgeReport> pnl_experiment(const VolatilityModel& model, const Claim& claim,
                                        const HedgeExperimentConfig& cfg);

HedgeSummary summarize_pnl(const std::vector<double>& pnl);

}  // namespace volterra
