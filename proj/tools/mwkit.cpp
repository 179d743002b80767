#include <iostream>
#include <string>
#include <vector>

#include "mwkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mwkit::cli::run(args, std::cout, std::cerr);
}
