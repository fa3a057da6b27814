#include <iostream>
#include <string>
#include <vector>

#include "volterra_cli/app.hpp"

int main(int argc, char** argv) {
  return volterra::cli::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
