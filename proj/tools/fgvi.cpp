#include <iostream>
#include <string>
#include <vector>

#include "fgvi/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return fgvi::cli::main_entry(args, std::cout, std::cerr);
}
