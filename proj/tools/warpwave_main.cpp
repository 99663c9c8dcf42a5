#include <iostream>
#include <string>
#include <vector>

#include "warpwave/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return warpwave::run_cli(args, std::cout, std::cerr);
}
