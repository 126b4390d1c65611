#include <iostream>
#include <string>
#include <vector>

#include "tsecon/cli/app.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return tsecon::cli::run_command(args, std::cout, std::cerr);
}
