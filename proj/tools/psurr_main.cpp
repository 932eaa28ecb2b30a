#include <iostream>
#include <string>
#include <vector>

#include "psurr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return psurr::cli::run(args, std::cout, std::cerr);
}
