#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "volterra/coefficients.hpp"
#include "volterra/grid.hpp"
#include "volterra/kernel.hpp"
#include "volterra/payoff.hpp"
#include "volterra/roughvol.hpp"
#include "volterra_cli/config.hpp"

namespace volterra::cli {

/// Relative file references in a scenario resolve against its directory.
struct ParseContext {
  std::filesystem::path base_dir;
};

TimeGrid parse_grid(const Node& node);
KernelSpec parse_kernel(const Node& node, const ParseContext& ctx);
Payoff parse_payoff(const Node& node, const ParseContext& ctx);
/// "zero" or "square".
RunningCost parse_running(const Node& parent, const std::string& key);

/// A scalar process for the generic modules: Gaussian Volterra, Brownian or
/// driftless lognormal (exact-in-law only on the Brownian clock).
struct ProcessModel {
  std::string type;
  KernelSpec kernel;
  CoefficientSpec coeff;
  double x0 = 0.0;
  double sigma = 0.0;  ///< lognormal volatility
  bool gaussian() const noexcept { return type != "lognormal"; }
};
ProcessModel parse_process(const Node& node, const ParseContext& ctx);

RoughHestonParams parse_heston(const Node& node);
RoughBergomiParams parse_bergomi(const Node& node);

/// Rough volatility model of a pricing or hedging scenario.
struct VolModelConfig {
  std::variant<RoughHestonParams, RoughBergomiParams> params;
  VolatilityModel build(const TimeGrid& grid) const;
  std::string type() const;
};
VolModelConfig parse_vol_model(const Node& node);

Claim parse_claim(const Node& node, const ParseContext& ctx);

}  // namespace volterra::cli
