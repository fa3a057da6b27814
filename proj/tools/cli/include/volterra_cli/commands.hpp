#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "volterra_cli/config.hpp"
#include "volterra_cli/models.hpp"
#include "volterra_cli/run_context.hpp"

namespace volterra::cli {

/// A fully parsed scenario, ready to compute.
using Job = std::function<void(RunContext&)>;

/// Reads the command-specific keys of the scenario root (and validates them)
/// without doing any numerical work.
using CommandParser = Job (*)(const Node& root, const ParseContext& ctx);

struct CommandInfo {
  std::string name;
  std::string summary;
  CommandParser parse;
};

const std::vector<CommandInfo>& command_table();
const CommandInfo* find_command(const std::string& name);

Job parse_simulate(const Node& root, const ParseContext& ctx);
Job parse_verify_ito(const Node& root, const ParseContext& ctx);
Job parse_solve_linear(const Node& root, const ParseContext& ctx);
Job parse_solve_bsde(const Node& root, const ParseContext& ctx);
Job parse_price(const Node& root, const ParseContext& ctx);
Job parse_hedge(const Node& root, const ParseContext& ctx);
Job parse_diagnose(const Node& root, const ParseContext& ctx);

inline std::optional<double> optional_number(const Node& node, const std::string& key) {
  if (!node.has(key)) return std::nullopt;
  return node.number(key);
}

/// Threshold block of a section: an optional "thresholds" object whose keys
/// are all optional numbers.
struct ThresholdSpec {
  std::vector<std::pair<std::string, std::optional<double>>> values;
  std::optional<double> get(const std::string& key) const {
    for (const auto& [k, v] : values)
      if (k == key) return v;
    return std::nullopt;
  }
};
ThresholdSpec parse_thresholds(const Node& section, const std::vector<std::string>& keys);

/// Applies `bound` with the given relation when it is set.
void check_max(RunContext& ctx, const std::string& name, double observed, std::optional<double> bound);
void check_min(RunContext& ctx, const std::string& name, double observed, std::optional<double> bound);

}  // namespace volterra::cli
