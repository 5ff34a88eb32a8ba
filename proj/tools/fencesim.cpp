#include <iostream>
#include <string>
#include <vector>

#include "fencesim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fencesim::runCli(args, std::cout, std::cerr);
}
