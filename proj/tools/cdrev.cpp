#include <iostream>
#include <string>
#include <vector>

#include "cdrev/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return cdrev::cli::run(args, std::cout, std::cerr);
}
