#include <iostream>

#include "mvred/cli.hpp"

int main(int argc, char** argv) {
  return mvred::cli::run_cli(argc, argv, std::cout, std::cerr);
}
