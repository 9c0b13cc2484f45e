#include <iostream>
#include <string>
#include <vector>

#include "noisynn_cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return noisynn::cli::dispatch(args, std::cout, std::cerr);
}
