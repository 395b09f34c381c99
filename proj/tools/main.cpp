#include <iostream>
#include <string>
#include <vector>

#include "quotesurvey/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return quotesurvey::run_cli(args, std::cout, std::cerr);
}
