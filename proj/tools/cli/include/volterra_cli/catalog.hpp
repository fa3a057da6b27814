#pragma once

#include <string>
#include <vector>

namespace volterra::cli {

/// A reproduction scenario shipped with the tool.
struct CatalogEntry {
  std::string name;     ///< also the file stem under the scenario directory
  std::string command;
  std::string checks;   ///< the property the scenario certifies
  std::vector<int> criteria;  ///< acceptance criteria the scenario maps to
};

const std::vector<CatalogEntry>& scenario_catalog();

/// Entries whose name, command or description contains `filter`
/// (case-insensitive). An empty filter selects everything.
std::vector<CatalogEntry> filter_catalog(const std::string& filter);

}  // namespace volterra::cli
