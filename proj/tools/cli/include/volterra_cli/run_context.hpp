#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace volterra::cli {

/// Failure of a numerical module while a scenario runs (exit status 3).
class ModuleFailure : public std::runtime_error {
 public:
  ModuleFailure(std::string module, const std::string& message)
      : std::runtime_error(message), module_(std::move(module)) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// Runs `body` and rethrows numerical and domain errors as ModuleFailure.
template <class F>
decltype(auto) in_module(const std::string& module, F&& body);

/// A CSV table whose numbers are written in shortest round-trip form, so
/// equal inputs give byte-identical files.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  class Row {
   public:
    Row& operator<<(double v);
    Row& operator<<(std::size_t v);
    Row& operator<<(std::string_view v);
    ~Row();
    Row(const Row&) = delete;
    Row& operator=(const Row&) = delete;

   private:
    friend class CsvTable;
    explicit Row(CsvTable& table) : table_(table) {}
    CsvTable& table_;
    std::vector<std::string> cells_;
  };
  Row row() { return Row(*this); }
  std::string str() const;
  std::size_t rows() const noexcept { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct ThresholdResult {
  std::string name;
  double observed = 0.0;
  std::string relation;  ///< "<=" or ">="
  double bound = 0.0;
  bool passed = false;
};

/// Collects the artifacts, report entries and threshold checks of one run.
/// Nothing touches the file system until write().
class RunContext {
 public:
  RunContext(std::string command, std::uint64_t seed) : command_(std::move(command)), seed_(seed) {}

  const std::string& command() const noexcept { return command_; }
  std::uint64_t seed() const noexcept { return seed_; }

  void add_artifact(const std::string& file, std::string content);
  void add_csv(const std::string& file, const CsvTable& table) { add_artifact(file, table.str()); }
  nlohmann::json& report() noexcept { return report_; }

  bool check_at_most(const std::string& name, double observed, double bound);
  bool check_at_least(const std::string& name, double observed, double bound);
  const std::vector<ThresholdResult>& thresholds() const noexcept { return thresholds_; }
  bool passed() const noexcept;

  struct ManifestInput {
    std::string scenario_name;
    std::string config_text;
    std::filesystem::path config_path;
    std::size_t threads = 0;
  };
  /// Writes every artifact, report.json and manifest.json into `dir`.
  /// Returns the paths written.
  std::vector<std::filesystem::path> write(const std::filesystem::path& dir, const ManifestInput& in) const;

 private:
  std::string command_;
  std::uint64_t seed_;
  std::vector<std::pair<std::string, std::string>> artifacts_;
  nlohmann::json report_ = nlohmann::json::object();
  std::vector<ThresholdResult> thresholds_;
};

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace volterra::cli

#include "volterra/errors.hpp"

namespace volterra::cli {

template <class F>
decltype(auto) in_module(const std::string& module, F&& body) {
  try {
    return body();
  } catch (const NumericalError& e) {
    throw ModuleFailure(module, e.what());
  } catch (const DomainError& e) {
    throw ModuleFailure(module, e.what());
  }
}

}  // namespace volterra::cli
