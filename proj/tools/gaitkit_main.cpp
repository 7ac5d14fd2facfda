#include <iostream>
#include <string>
#include <vector>

#include "gaitkit/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return gaitkit::cli::run(args, std::cout, std::cerr);
}
