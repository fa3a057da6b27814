#include "volterra_cli/commands.hpp"

namespace volterra::cli {

const std::vector<CommandInfo>& command_table() {
  static const std::vector<CommandInfo> table{
      {"simulate", "simulate a Volterra process and write its paths", &parse_simulate},
      {"verify-ito", "telescoping check of the functional Ito formula", &parse_verify_ito},
      {"solve-linear", "Gaussian conditional-expectation functional: tower, drift, PPDE and pairing checks",
       &parse_solve_linear},
      {"solve-bsde", "least-squares Monte Carlo BSDE solver with closed-form references", &parse_solve_bsde},
      {"price", "rough volatility pricing against an oracle", &parse_price},
      {"hedge", "hedging P&L experiment", &parse_hedge},
      {"diagnose", "moment, scaling and covariance diagnostics", &parse_diagnose},
  };
  return table;
}

const CommandInfo* find_command(const std::string& name) {
  for (const auto& c : command_table())
    if (c.name == name) return &c;
  return nullptr;
}

ThresholdSpec parse_thresholds(const Node& section, const std::vector<std::string>& keys) {
  ThresholdSpec spec;
  const auto node = section.optional_child("thresholds");
  for (const auto& k : keys) spec.values.emplace_back(k, node ? optional_number(*node, k) : std::nullopt);
  if (node) node->finish();
  return spec;
}

void check_max(RunContext& ctx, const std::string& name, double observed, std::optional<double> bound) {
  if (bound) ctx.check_at_most(name, observed, *bound);
}

void check_min(RunContext& ctx, const std::string& name, double observed, std::optional<double> bound) {
  if (bound) ctx.check_at_least(name, observed, *bound);
}

}  // namespace volterra::cli
