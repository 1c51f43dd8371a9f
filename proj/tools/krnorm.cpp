#include <iostream>

#include "krnorm/cli.hpp"

int main(int argc, char** argv) {
  return krnorm::run_cli(argc, argv, std::cout, std::cerr);
}
