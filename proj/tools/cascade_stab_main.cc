#include <iostream>
#include <string>
#include <vector>

#include "cascade_stab/cli.h"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return cascade_stab::run_cli(args, std::cout, std::cerr);
}
