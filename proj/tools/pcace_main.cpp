#include <iostream>
#include <string>
#include <vector>

#include "pcace/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return pcace::run_cli(args, std::cout, std::cerr);
}
