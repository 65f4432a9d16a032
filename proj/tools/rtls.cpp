#include <iostream>
#include <string>
#include <vector>

#include "wtls/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wtls::cli::run_cli(args, std::cout, std::cerr);
}
