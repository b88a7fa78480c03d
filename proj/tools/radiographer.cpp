#include <iostream>
#include <string>
#include <vector>

#include "radiographer/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return radiographer::run_cli(args, std::cout, std::cerr);
}
