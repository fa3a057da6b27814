#include "volterra/version.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

namespace volterra {

std::string library_version() { return VOLTERRA_VERSION; }

std::vector<std::pair<std::string, std::string>> build_versions() {
  const std::string eigen = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION);
  const std::string boost = std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) +
                            "." + std::to_string(BOOST_VERSION % 100);
#if defined(__clang__)
  const std::string compiler = "clang " __clang_version__;
#elif defined(__GNUC__)
  const std::string compiler = "gcc " __VERSION__;
#else
  const std::string compiler = "unknown";
#endif
  return {{"volterra", library_version()}, {"compiler", compiler}, {"eigen", eigen}, {"boost", boost}};
}

}  // namespace volterra
