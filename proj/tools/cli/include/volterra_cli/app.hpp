#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace volterra::cli {

/// Process exit statuses.
enum ExitCode : int {
  kExitPass = 0,
  kExitThresholdFailed = 1,
  kExitSchemaError = 2,
  kExitNumericalError = 3,
  kExitIoError = 4,
};

struct RunRequest {
  std::string command;
  std::filesystem::path config;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed_override;
};

/// Parses, runs and writes one scenario. Returns the exit status.
int run_scenario(const RunRequest& request, std::ostream& out, std::ostream& err);

/// Prints the catalog entries matching `filter`, one per line.
int list_scenarios(const std::string& filter, std::ostream& out);

/// Full command line entry point (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace volterra::cli
