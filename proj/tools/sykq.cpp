#include <iostream>
#include <string>
#include <vector>

#include "sykq/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sykq::dispatch(args, std::cout);
}
