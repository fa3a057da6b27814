#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "volterra/errors.hpp"
#include "volterra/hedging.hpp"

using namespace volterra;

namespace {

HedgeExperimentConfig small_config() {
  HedgeExperimentConfig cfg;
  cfg.n_paths = 60;
  cfg.seed = 3;
  cfg.rebalance_counts = {2, 8};
  cfg.ratios.pricing.n_paths = 400;
  cfg.initial_price_paths = 4000;
  return cfg;
}

Claim atm_call() {
  Claim c;
  c.terminal = Payoff::call(100.0);
  return c;
}

}  // namespace

TEST(Hedging, SummaryUsesLinearQuantiles) {
  std::vector<double> pnl;
  for (int i = 0; i <= 100; ++i) pnl.push_back(static_cast<double>(100 - i));
  const auto s = summarize_pnl(pnl);
  EXPECT_DOUBLE_EQ(s.mean, 50.0);
  EXPECT_DOUBLE_EQ(s.q05, 5.0);
  EXPECT_DOUBLE_EQ(s.q50, 50.0);
  EXPECT_DOUBLE_EQ(s.q95, 95.0);
  const auto m = oracle::mean_se(pnl);
  EXPECT_NEAR(s.std_dev, m.se * std::sqrt(101.0), 1e-12);
}

TEST(Hedging, ExperimentShapesAndOrdering) {
  RoughHestonParams p;
  p.vol_of_vol = 0.2;
  const auto model = VolatilityModel::heston(p, TimeGrid(0.5, 16));
  const auto reports = pnl_experiment(model, atm_call(), small_config());
  ASSERT_EQ(reports.size(), 6u);
  EXPECT_EQ(reports[0].mode, HedgeMode::Unhedged);
  EXPECT_EQ(reports[2].mode, HedgeMode::StockOnly);
  EXPECT_EQ(reports[5].mode, HedgeMode::StockAndForwardVariance);
  for (const auto& r : reports) {
    EXPECT_EQ(r.pnl_paths.size(), 60u);
    EXPECT_EQ(r.times.size(), r.rebalance_count);
    EXPECT_TRUE(std::all_of(r.pnl_paths.begin(), r.pnl_paths.end(), [](double x) { return std::isfinite(x); }));
  }
  // The unhedged P&L is payoff minus price, so its mean is zero up to noise.
  const auto& unhedged = reports[1];
  EXPECT_LT(std::abs(unhedged.summary.mean), 3.5 * unhedged.summary.std_dev / std::sqrt(60.0) + 0.2);
  // Delta hedging removes most of the spread of a call.
  EXPECT_LT(reports[3].summary.std_dev, 0.5 * unhedged.summary.std_dev);
  EXPECT_LT(reports[3].summary.std_dev, reports[2].summary.std_dev * 1.05);
  // Call deltas lie in [0, 1].
  for (double d : reports[3].delta_stock) {
    EXPECT_GE(d, -0.05);
    EXPECT_LE(d, 1.05);
  }
  EXPECT_EQ(to_string(reports[1].mode), "unhedged");
}

TEST(Hedging, ScheduleValidation) {
  auto cfg = small_config();
  cfg.rebalance_counts = {3};
  EXPECT_THROW(cfg.validate(16), ConfigError);
  cfg.rebalance_counts = {4, 6};
  EXPECT_THROW(cfg.validate(24), ConfigError);
  cfg.rebalance_counts = {4, 8};
  EXPECT_NO_THROW(cfg.validate(24));
  EXPECT_EQ(to_string(HedgeMode::StockAndForwardVariance), "stock_and_fv");
}
