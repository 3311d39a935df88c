#include <iostream>

#include "cfld/cli.hpp"

int main(int argc, char** argv) {
  return cfld::cli::run(argc, argv, std::cout, std::cerr);
}
