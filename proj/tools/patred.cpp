#include <iostream>
#include <string>
#include <vector>

#include "patred/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return patred::cli::run(args, std::cout, std::cerr);
}
