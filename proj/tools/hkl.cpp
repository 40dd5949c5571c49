#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "hkl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hkl::cli::run_cli(args, std::cin, std::cout, std::cerr, isatty(fileno(stderr)) != 0);
}
