#include <iostream>
#include <string>
#include <vector>

#include "diophlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return diophlab::run_cli(args, std::cout, std::cerr);
}
