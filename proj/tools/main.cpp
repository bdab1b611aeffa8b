#include <iostream>
#include <string>
#include <vector>

#include "sqpbs/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return sqpbs::cli::run(args, std::cout, std::cerr);
}
