#include <iostream>
#include <string>
#include <vector>

#include "fringeworks/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fringeworks::run_cli(std::move(args), std::cout, std::cerr);
}
