#include <iostream>
#include <string>
#include <vector>

#include "confkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return confkit::run(args, std::cout, std::cerr);
}
