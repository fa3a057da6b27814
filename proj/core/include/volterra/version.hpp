#pragma once

#include <string>
#include <utility>
#include <vector>

namespace volterra {

std::string library_version();

/// (name, version) of the compiler and of the numerical dependencies built in.
std::vector<std::pair<std::string, std::string>> build_versions();

}  // namespace volterra
