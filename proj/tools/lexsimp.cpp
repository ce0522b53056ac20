#include <iostream>
#include <string>
#include <vector>

#include "lexsimp/harness.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lexsimp::run_command(args, std::cout, std::cerr);
}
