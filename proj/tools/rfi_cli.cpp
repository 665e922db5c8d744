#include <iostream>
#include <string>
#include <vector>

#include "rfi/experiments.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rfi::cli_main(args, std::cout, std::cerr);
}
